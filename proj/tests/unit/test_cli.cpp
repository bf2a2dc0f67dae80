#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scriptorium/image_io.hpp"
#include "support/schema_check.hpp"

namespace fs = std::filesystem;
using scriptorium::testing::load_schema;
using scriptorium::testing::schema_errors;

namespace {

const fs::path& work_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("scriptorium-cli-" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

// Runs the CLI with `args` (already shell-quoted where needed).
Run cli(const std::string& args) {
  const fs::path out = work_dir() / "stdout.txt";
  const fs::path err = work_dir() / "stderr.txt";
  const std::string cmd = std::string("'") + SCRIPTORIUM_CLI_PATH + "' " + args + " >'" + out.string() +
                          "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

void check_schema(const fs::path& doc, const std::string& schema) {
  const auto s = load_schema(fs::path(SCRIPTORIUM_SOURCE_DIR) / "schemas" / schema);
  const auto errors = schema_errors(nlohmann::json::parse(slurp(doc)), s);
  for (const auto& e : errors) MESSAGE(doc.string() << ": " << e);
  CHECK(errors.empty());
}

// Synthetic page and corpus shared by the tests below.
const fs::path& synth_dir() {
  static const fs::path dir = [] {
    const auto d = work_dir() / "synth";
    const Run r = cli("synth --random 6 --min-length 8 --max-length 20 --seed 3 --page -o " + q(d));
    REQUIRE(r.code == 0);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("help and usage errors") {
  for (const char* sub : {"", "segment ", "ocr ", "cluster ", "synth ", "train ", "eval ", "serve "}) {
    const Run r = cli(std::string(sub) + "--help");
    CHECK_MESSAGE(r.code == 0, sub);
    CHECK_FALSE(r.out.empty());
  }
  CHECK(cli("").code == 2);
  CHECK(cli("nonsense").code == 2);
  CHECK(cli("segment").code == 2);
  CHECK(cli("cluster --threshold -1 x.png").code == 2);
  CHECK(cli("segment x.png -o " + q(work_dir() / "x") + " --connectivity 5").code == 2);
}

TEST_CASE("synth writes a valid manifest") {
  const auto d = synth_dir();
  const auto lines = slurp(d / "manifest.jsonl");
  const auto schema = load_schema(fs::path(SCRIPTORIUM_SOURCE_DIR) / "schemas" / "manifest-record.schema.json");
  std::istringstream in(lines);
  std::string line;
  int count = 0;
  while (std::getline(in, line)) {
    const auto rec = nlohmann::json::parse(line);
    CHECK(schema_errors(rec, schema).empty());
    CHECK(fs::exists(d / rec["image_path"].get<std::string>()));
    CHECK(rec["seed"] == (3 ^ count));
    ++count;
  }
  CHECK(count == 6);

  const auto again = work_dir() / "synth-again";
  REQUIRE(cli("synth --random 6 --min-length 8 --max-length 20 --seed 3 --page --threads 1 -o " + q(again)).code == 0);
  CHECK(slurp(again / "manifest.jsonl") == lines);
  CHECK(slurp(again / "page.png") == slurp(d / "page.png"));

  const auto atlas = work_dir() / "atlas";
  REQUIRE(cli("synth --random 1 --write-atlas " + q(atlas) + " -o " + q(work_dir() / "synth-atlas")).code == 0);
  check_schema(atlas / "atlas.json", "atlas.schema.json");
  const auto from_atlas = work_dir() / "synth-from-atlas";
  REQUIRE(cli("synth --atlas " + q(atlas) + " --random 6 --min-length 8 --max-length 20 --seed 3 -o " + q(from_atlas)).code == 0);
  CHECK(slurp(from_atlas / "manifest.jsonl") == lines);
}

TEST_CASE("segment is deterministic and schema-valid") {
  const auto page = synth_dir() / "page.png";
  const auto a = work_dir() / "seg-a";
  const auto b = work_dir() / "seg-b";
  REQUIRE(cli("segment " + q(page) + " -o " + q(a) + " --chain-code").code == 0);
  REQUIRE(cli("segment " + q(page) + " -o " + q(b) + " --chain-code").code == 0);
  for (const char* f : {"seg.json", "overlay.png", "outlines.scc"}) {
    CHECK(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  check_schema(a / "seg.json", "page-segmentation.schema.json");
  const auto seg = nlohmann::json::parse(slurp(a / "seg.json"));
  CHECK(seg["lines"].size() == 6);

  const auto params = work_dir() / "params.json";
  std::ofstream(params) << R"({"connectivity": 4, "small_blob_area": 12, "line_gap": 6, "reading_order": "ltr"})";
  check_schema(params, "seg-params.schema.json");
  REQUIRE(cli("segment " + q(page) + " -o " + q(work_dir() / "seg-c") + " --params " + q(params)).code == 0);
  const auto c = nlohmann::json::parse(slurp(work_dir() / "seg-c" / "seg.json"));
  CHECK(c["params"]["connectivity"] == 4);
  CHECK(c["params"]["line_gap"] == 6);
}

TEST_CASE("segment error exits") {
  CHECK(cli("segment " + q(work_dir() / "missing.png") + " -o " + q(work_dir() / "m")).code == 3);
  const auto junk = work_dir() / "junk.png";
  std::ofstream(junk) << "not an image";
  CHECK(cli("segment " + q(junk) + " -o " + q(work_dir() / "m")).code == 3);
  const auto bad = work_dir() / "bad-params.json";
  std::ofstream(bad) << R"({"line_gap": -2})";
  const Run r = cli("segment " + q(synth_dir() / "page.png") + " -o " + q(work_dir() / "m") + " --params " + q(bad));
  CHECK(r.code == 2);
  CHECK(r.err.find("line_gap") != std::string::npos);
}

TEST_CASE("eval reports error rates") {
  const auto ref = work_dir() / "ref.txt";
  const auto hyp = work_dir() / "hyp.txt";
  std::ofstream(ref) << "kitten\n";
  std::ofstream(hyp) << "sitting\n";
  Run r = cli("eval --format text -r " + q(ref) + " -y " + q(hyp));
  CHECK(r.code == 0);
  CHECK(r.out.find("CER 0.500000 (3 errors / 6 symbols)") != std::string::npos);
  r = cli("eval -r " + q(synth_dir() / "page.txt") + " -y " + q(synth_dir() / "page.txt"));
  CHECK(r.code == 0);
  CHECK(r.out.find("CER 0.000000") != std::string::npos);
  std::ofstream(hyp) << "a\nb\n";
  CHECK(cli("eval --format text -r " + q(ref) + " -y " + q(hyp)).code == 2);
}

TEST_CASE("train and ocr round trip") {
  const auto corpus = work_dir() / "train-corpus";
  REQUIRE(cli("synth --ngrams --random 150 --seed 11 -o " + q(corpus)).code == 0);
  const auto model = work_dir() / "model.ckpt";
  const auto curve = work_dir() / "curve.json";
  Run r = cli("train -m " + q(corpus / "manifest.jsonl") + " -o " + q(model) +
              " --epochs 4 --loss-curve " + q(curve));
  REQUIRE(r.code == 0);
  const auto model2 = work_dir() / "model2.ckpt";
  REQUIRE(cli("train -m " + q(corpus / "manifest.jsonl") + " -o " + q(model2) + " --epochs 4").code == 0);
  CHECK(slurp(model) == slurp(model2));
  const auto losses = nlohmann::json::parse(slurp(curve))["loss"];
  CHECK(losses.size() == 4);
  CHECK(losses.back().get<double>() < losses.front().get<double>());

  std::ifstream header_in(model, std::ios::binary);
  std::string header;
  std::getline(header_in, header);
  const auto header_schema = load_schema(fs::path(SCRIPTORIUM_SOURCE_DIR) / "schemas" / "checkpoint-header.schema.json");
  CHECK(schema_errors(nlohmann::json::parse(header), header_schema).empty());

  const auto page = synth_dir() / "page.png";
  const auto report = work_dir() / "report.json";
  r = cli("ocr " + q(page) + " --model " + q(model) + " --refs " + q(synth_dir() / "page.txt") + " --report " +
          q(report));
  REQUIRE(r.code == 0);
  check_schema(report, "ocr-report.schema.json");
  const auto rep = nlohmann::json::parse(slurp(report));
  CHECK(rep["lines"].size() == 6);
  CHECK(rep["cer"].get<double>() < 0.2);
  const Run again = cli("ocr " + q(page) + " --model " + q(model));
  CHECK(again.out == r.out);

  // A config file with paths relative to itself.
  const auto cfg = work_dir() / "ocr.json";
  std::ofstream(cfg) << R"({"model": "model.ckpt", "window": 7, "atlas": "builtin"})";
  CHECK(cli("ocr " + q(page) + " -c " + q(cfg)).out == r.out);
  std::ofstream(cfg) << R"({"model": "model.ckpt", "colour": 1})";
  CHECK(cli("ocr " + q(page) + " -c " + q(cfg)).code == 2);

  // Window that does not fit the checkpoint.
  CHECK(cli("ocr " + q(page) + " --model " + q(model) + " --window 5").code == 4);

  const auto blank = work_dir() / "blank.png";
  scriptorium::save_png(blank, scriptorium::GrayImage(120, 80, 255));
  r = cli("ocr " + q(blank) + " --model " + q(model));
  CHECK(r.code == 0);
  CHECK(r.out.empty());

  CHECK(cli("ocr " + q(page) + " --model " + q(work_dir() / "none.ckpt")).code == 3);

  // A mirrored page read right to left yields the same frames, hence the
  // same transcript.
  const auto gray = scriptorium::load_image(page);
  scriptorium::GrayImage mirrored(gray.width(), gray.height());
  for (int y = 0; y < gray.height(); ++y) {
    for (int x = 0; x < gray.width(); ++x) mirrored.set(gray.width() - 1 - x, y, gray.at(x, y));
  }
  const auto mirror_path = work_dir() / "mirrored.png";
  scriptorium::save_png(mirror_path, mirrored);
  r = cli("ocr " + q(mirror_path) + " --model " + q(model) + " --reading-order rtl");
  CHECK(r.code == 0);
  CHECK(r.out == again.out);
}

TEST_CASE("diverging training exits 4 and keeps the last finite model") {
  const auto corpus = work_dir() / "tiny-corpus";
  REQUIRE(cli("synth --random 4 --min-length 3 --max-length 6 --seed 2 -o " + q(corpus)).code == 0);
  const auto model = work_dir() / "diverged.ckpt";
  const Run r = cli("train -m " + q(corpus / "manifest.jsonl") + " -o " + q(model) + " --epochs 3 --lr 1e308");
  CHECK(r.code == 4);
  CHECK_FALSE(fs::exists(model));
  CHECK(fs::exists(work_dir() / "diverged.ckpt.last-finite"));
  CHECK(cli("train -m " + q(corpus / "manifest.jsonl") + " -o " + q(model) + " --lr -1").code == 2);
}

TEST_CASE("cluster output is stable") {
  // Separate copies of three glyphs: 1 2 1 3 2 1.
  const auto plan = work_dir() / "cluster-plan.txt";
  std::ofstream(plan) << "1 11 2 11 1 11 3 11 2 11 1\n";
  const auto dir = work_dir() / "cluster-page";
  REQUIRE(cli("synth --plan " + q(plan) + " --page -o " + q(dir)).code == 0);
  const auto page = dir / "page.png";
  const auto a = work_dir() / "cl-a.json";
  const auto b = work_dir() / "cl-b.json";
  const auto m = work_dir() / "cl.csv";
  REQUIRE(cli("cluster " + q(page) + " -t 0.05 --threads 1 -o " + q(a) + " --matrix " + q(m)).code == 0);
  REQUIRE(cli("cluster " + q(page) + " -t 0.05 --threads 3 -o " + q(b)).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(fs::exists(m));
  check_schema(a, "clustering.schema.json");
  const auto doc = nlohmann::json::parse(slurp(a));
  REQUIRE(doc["labels"].size() == 6);
  CHECK(doc["items"].size() == 6);
  const auto& l = doc["labels"];
  CHECK(l[0] == l[2]);
  CHECK(l[0] == l[5]);
  CHECK(l[1] == l[4]);
  CHECK(l[0] != l[1]);
  CHECK(l[3] != l[0]);
  CHECK(l[3] != l[1]);
  CHECK(cli("cluster " + q(page) + " " + q(page) + " -t 0.05").code == 0);
  CHECK(cli("cluster " + q(work_dir() / "nope.png") + " -t 0.1").code == 3);
}
