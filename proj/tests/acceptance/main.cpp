// One PASS/FAIL line per primary acceptance criterion. Exit status is the
// number of failed criteria (capped at 1), so ctest reports any failure.

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "scriptorium/corpus.hpp"
#include "scriptorium/ctc.hpp"
#include "scriptorium/evaluation.hpp"
#include "scriptorium/matching.hpp"
#include "scriptorium/outlines.hpp"
#include "scriptorium/segmentation.hpp"
#include "scriptorium/skeleton.hpp"
#include "scriptorium/toy_model.hpp"
#include "support/oracles.hpp"
#include "support/schema_check.hpp"

namespace fs = std::filesystem;
using namespace scriptorium;
namespace oracle = scriptorium::testing;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& name, double time_limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (time_limit_s > 0 && secs > time_limit_s) {
    o.pass = false;
    o.detail += "; over the " + std::to_string(static_cast<int>(time_limit_s)) + " s limit";
  }
  if (!o.pass) ++failures;
  std::printf("%s  %-28s %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

LabelSequence random_label(std::mt19937_64& rng, int max_len, int alphabet, std::size_t frames) {
  for (;;) {
    LabelSequence y(rng() % static_cast<unsigned>(max_len + 1));
    for (int& v : y) v = 1 + static_cast<int>(rng() % static_cast<unsigned>(alphabet));
    if (min_frames(y) <= frames) return y;
  }
}

// ------------------------------------------------------------------ CTC

Outcome ctc_oracle() {
  std::mt19937_64 rng(1);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const int frames = 1 + static_cast<int>(rng() % 8);
    const int alphabet = 1 + static_cast<int>(rng() % 3);
    const auto p = oracle::random_log_probs(rng, frames, alphabet + 1);
    const auto y = random_label(rng, 3, alphabet, static_cast<std::size_t>(frames));
    worst = std::max(worst, std::abs(ctc_loss(p, y) - oracle::brute_force_ctc(p, y)));
  }
  return {worst <= 1e-9, "500 instances, max |dp - enumeration| = " + fmt("%.3g", worst)};
}

Outcome ctc_gradient() {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 1.5);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto frames = static_cast<std::size_t>(1 + rng() % 12);
    const int alphabet = 1 + static_cast<int>(rng() % 5);
    LogProbMatrix logits(frames, static_cast<std::size_t>(alphabet + 1));
    for (std::size_t t = 0; t < frames; ++t) {
      for (std::size_t k = 0; k < logits.classes(); ++k) logits(t, k) = n(rng);
    }
    const auto y = random_label(rng, 6, alphabet, frames);
    const auto g = ctc_grad(log_softmax(logits), y);
    const double h = 1e-6;
    for (std::size_t t = 0; t < frames; ++t) {
      for (std::size_t k = 0; k < logits.classes(); ++k) {
        LogProbMatrix up = logits;
        LogProbMatrix down = logits;
        up(t, k) += h;
        down(t, k) -= h;
        const double fd = (ctc_loss(log_softmax(up), y) - ctc_loss(log_softmax(down), y)) / (2 * h);
        worst = std::max(worst, std::abs(fd - g(t, k)) / std::max({std::abs(fd), std::abs(g(t, k)), 1e-2}));
      }
    }
  }
  return {worst <= 1e-5, "100 instances, max relative error = " + fmt("%.3g", worst)};
}

Outcome ctc_underflow() {
  const std::size_t frames = 50000;
  const std::size_t classes = 71;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> jitter(-0.01, 0.01);
  LogProbMatrix logits(frames, classes);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t k = 0; k < classes; ++k) logits(t, k) = jitter(rng);
  }
  LabelSequence y(500);
  for (int& v : y) v = 1 + static_cast<int>(rng() % 70);
  const double loss = ctc_loss(log_softmax(logits), y);
  // Every path has probability about (1/71)^T, far below the smallest double.
  const bool ok = std::isfinite(loss) && loss <= static_cast<double>(frames) * std::log(71.0) + 10;
  return {ok, "T=50000, A=70, loss = " + fmt("%.6g", loss)};
}

// ------------------------------------------------------------ outlines

Outcome outline_lossless() {
  const auto blobs = oracle::random_blobs(4, 200);
  int bad_graph = 0;
  int bad_sweep = 0;
  int disagree = 0;
  for (const Blob& b : blobs) {
    const int w = b.bbox.x1 + 1;
    const int h = b.bbox.y1 + 1;
    const BinaryImage mask = oracle::blob_mask(b, w, h);
    auto g = trace_graph(b);
    auto s = trace_sweep(b);
    if (!(rasterize(g, w, h) == mask)) ++bad_graph;
    if (!(rasterize(s, w, h) == mask)) ++bad_sweep;
    canonicalize(g);
    canonicalize(s);
    if (!(g.cycles == s.cycles)) ++disagree;
  }
  const bool ok = bad_graph == 0 && bad_sweep == 0 && disagree == 0;
  return {ok, "200 blobs: graph mismatches " + std::to_string(bad_graph) + ", sweep mismatches " +
                  std::to_string(bad_sweep) + ", tracer disagreements " + std::to_string(disagree)};
}

Outcome outline_conservation() {
  const auto blobs = oracle::random_blobs(5, 200);
  int bad_area = 0;
  int bad_outer = 0;
  int bad_holes = 0;
  for (const Blob& b : blobs) {
    const auto o = trace_graph(b);
    long long sum = 0;
    int outer = 0;
    int inner = 0;
    for (const auto& c : o.cycles) {
      sum += c.signed_area;
      (c.orientation > 0 ? outer : inner) += 1;
    }
    if (sum != static_cast<long long>(b.pixels.size())) ++bad_area;
    if (outer != 1) ++bad_outer;
    if (inner != oracle::count_holes(oracle::blob_mask(b, b.bbox.x1 + 1, b.bbox.y1 + 1))) ++bad_holes;
  }
  const bool ok = bad_area == 0 && bad_outer == 0 && bad_holes == 0;
  return {ok, "200 blobs: area mismatches " + std::to_string(bad_area) + ", outer-cycle count errors " +
                  std::to_string(bad_outer) + ", hole count errors " + std::to_string(bad_holes)};
}

// Synthetic page laid out like `synth --page`, scaled up by an integer
// factor to scanning resolution.
Outcome data_reduction() {
  const GlyphSet gs = builtin_glyph_set();
  const auto texts = random_lines(gs, 10, 30, 30, 1);
  const auto lines = synthesize_corpus(gs, texts, 1, 0.0, 1);
  int glyphs = 0;
  for (const auto& t : texts) glyphs += static_cast<int>(std::count_if(t.begin(), t.end(), [&](int id) {
                                         return id != gs.space_id;
                                       }));
  const int margin = 20;
  const int pitch = 2 * gs.height();
  int width = 0;
  for (const auto& l : lines) width = std::max(width, l.image.width());
  BinaryImage page(width + 2 * margin, 2 * margin + pitch * static_cast<int>(lines.size()));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const BinaryImage& img = lines[i].image;
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        if (img.at(x, y)) page.set(margin + x, margin + pitch * static_cast<int>(i) + y, true);
      }
    }
  }
  // 12-row glyphs at x5 are 60 px tall, about 12 pt type scanned at 300 dpi.
  const int k = 5;
  BinaryImage scanned(page.width() * k, page.height() * k);
  for (int y = 0; y < scanned.height(); ++y) {
    for (int x = 0; x < scanned.width(); ++x) scanned.set(x, y, page.at(x / k, y / k));
  }
  const auto seg = segment_page(scanned, SegParams{});
  const auto outlines = trace_page(seg);
  const auto report = compression_ratio(scanned.width(), scanned.height(), outlines);
  const auto decoded = decode_chain_code(encode_chain_code(scanned.width(), scanned.height(), outlines));
  const bool round_trip = decoded.outlines == outlines;
  const bool ok = glyphs >= 200 && report.ratio >= 10.0 && round_trip;
  return {ok, std::to_string(glyphs) + " glyphs on " + std::to_string(scanned.width()) + "x" +
                  std::to_string(scanned.height()) + ": " + std::to_string(report.bitmap_bytes) + " / " +
                  std::to_string(report.chain_code_bytes) + " bytes, ratio " + fmt("%.2f", report.ratio) +
                  (round_trip ? "" : ", decode mismatch")};
}

// ------------------------------------------------------------- skeleton

Outcome skeleton_topology() {
  const auto blobs = oracle::random_blobs(1, 200);
  int topology = 0;
  int thick = 0;
  int outside = 0;
  for (const Blob& b : blobs) {
    const BinaryImage tight = oracle::blob_mask(b, b.bbox.x1 + 1, b.bbox.y1 + 1);
    BinaryImage mask(tight.width() + 2, tight.height() + 2);
    for (int y = 0; y < tight.height(); ++y) {
      for (int x = 0; x < tight.width(); ++x) mask.set(x + 1, y + 1, tight.at(x, y));
    }
    const Skeleton s = skeletonize(mask);
    if (oracle::count_components(s.mask, 8) != oracle::count_components(mask, 8) ||
        oracle::count_holes(s.mask) != oracle::count_holes(mask)) {
      ++topology;
    }
    if (find_full_block(s.mask)) ++thick;
    for (int y = 0; y < mask.height(); ++y) {
      for (int x = 0; x < mask.width(); ++x) {
        if (s.mask.at(x, y) && !mask.at(x, y)) {
          ++outside;
          y = mask.height();
          break;
        }
      }
    }
  }
  const bool ok = topology == 0 && thick == 0 && outside == 0;
  return {ok, "200 blobs: topology changes " + std::to_string(topology) + ", blobs with a full 2x2 block " +
                  std::to_string(thick) + ", pixels outside source " + std::to_string(outside)};
}

// ----------------------------------------------------------- clustering

Shape glyph_shape(const BinaryImage& img, int min_area) {
  std::vector<OutlineCycle> outer;
  for (const Blob& b : extract_blobs(img, 8)) {
    if (static_cast<int>(b.pixels.size()) < min_area) continue;
    for (const auto& c : trace_graph(b).cycles) {
      if (c.orientation > 0) outer.push_back(c);
    }
  }
  return {normalize_group(outer, 64)};
}

BinaryImage place(const BinaryImage& glyph, int dx, int dy, int scale) {
  BinaryImage out(glyph.width() * scale + dx + 2, glyph.height() * scale + dy + 2);
  for (int y = 0; y < glyph.height() * scale; ++y) {
    for (int x = 0; x < glyph.width() * scale; ++x) out.set(x + dx, y + dy, glyph.at(x / scale, y / scale));
  }
  return out;
}

Outcome clustering() {
  const GlyphSet gs = builtin_glyph_set();
  const int min_area = 12;
  ClusterOptions options;

  // Threshold from the clean glyphs only: 3/4 of the closest pair of
  // distinct glyphs.
  std::vector<Shape> clean;
  for (const auto& [id, g] : gs.glyphs) clean.push_back(glyph_shape(place(g, 2, 2, 1), min_area));
  double closest = INFINITY;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    for (std::size_t j = i + 1; j < clean.size(); ++j) {
      closest = std::min(closest, shape_distance(clean[i], clean[j], options));
    }
  }
  const double threshold = 0.75 * closest;

  std::vector<BinaryImage> copies;
  std::vector<int> classes;
  for (const auto& [id, g] : gs.glyphs) {
    for (int c = 0; c < 20; ++c) {
      const LabelSequence text{id};
      copies.push_back(synthesize_line(gs, text, static_cast<std::uint64_t>(1000 * id + c), 0.02).image);
      classes.push_back(id);
    }
  }
  std::vector<Shape> shapes;
  for (const auto& img : copies) shapes.push_back(glyph_shape(place(img, 2, 2, 1), min_area));
  const Clustering base = cluster_shapes(shapes, threshold, options);
  const double purity = cluster_purity(base.labels, classes);

  // Same copies moved and scaled; the speck filter scales with the area.
  std::mt19937_64 rng(7);
  std::vector<Shape> moved;
  for (const auto& img : copies) {
    const int scale = 1 + static_cast<int>(rng() % 3);
    const int dx = static_cast<int>(rng() % 30);
    const int dy = static_cast<int>(rng() % 30);
    moved.push_back(glyph_shape(place(img, dx, dy, scale), min_area * scale * scale));
  }
  const Clustering after = cluster_shapes(moved, threshold, options);
  const bool same_partition = after.labels == base.labels;

  const bool ok = purity >= 0.99 && same_partition;
  return {ok, "200 copies, threshold " + fmt("%.4f", threshold) + ": " + std::to_string(base.cluster_count()) +
                  " clusters, purity " + fmt("%.4f", purity) + ", partition after move/scale " +
                  (same_partition ? "identical" : "changed")};
}

// ------------------------------------------------------- end to end OCR

Outcome end_to_end() {
  const GlyphSet gs = builtin_glyph_set(1);
  const int window = 7;
  const auto plan = build_plan(gs).strings;
  auto texts = plan;
  const auto random = random_lines(gs, 500, 20, 60, 11);
  texts.insert(texts.end(), random.begin(), random.end());
  const auto train_lines = synthesize_corpus(gs, texts, 11);

  TrainingSet data;
  for (const auto& l : train_lines) data.samples.push_back({make_frames(l.image, window), l.labels});
  TrainOptions options;
  options.epochs = 8;
  options.learning_rate = 0.05;
  options.batch_size = 8;
  options.seed = 1;
  const ToyModel model = train_toy(ToyModel(gs.height() * window, 32, gs.class_count(), 1), data, options);

  const auto held_texts = random_lines(gs, 100, 20, 60, 12345);
  const auto held = synthesize_corpus(gs, held_texts, 12345);
  std::vector<LabelSequence> refs;
  std::vector<LabelSequence> hyps;
  for (const auto& l : held) {
    refs.push_back(l.labels);
    hyps.push_back(model.decode(make_frames(l.image, window)));
  }
  const double accuracy = 1.0 - cer(refs, hyps);
  return {accuracy >= 0.97, std::to_string(plan.size()) + " plan + 500 random lines, 8 epochs; held-out accuracy " +
                                fmt("%.4f", accuracy) + " on 100 lines"};
}

// -------------------------------------------------------- edit distance

Outcome edit_distance_check() {
  std::vector<LabelSequence> all{{}};
  for (std::size_t start = 0, len = 0; len < 6; ++len) {
    const std::size_t end = all.size();
    for (std::size_t i = start; i < end; ++i) {
      for (int s = 1; s <= 3; ++s) {
        LabelSequence next = all[i];
        next.push_back(s);
        all.push_back(std::move(next));
      }
    }
    start = end;
  }
  std::size_t mismatches = 0;
  for (const auto& a : all) {
    for (const auto& b : all) {
      if (edit_distance(a, b) != oracle::naive_edit_distance(a, b)) ++mismatches;
    }
  }
  const std::size_t kitten = edit_distance(utf8_codepoints("kitten"), utf8_codepoints("sitting"));
  LabelSequence ref(60);
  for (int i = 0; i < 60; ++i) ref[static_cast<std::size_t>(i)] = 1 + i % 5;
  LabelSequence hyp = ref;
  hyp[30] = 9;
  const std::vector<LabelSequence> refs{ref};
  const std::vector<LabelSequence> hyps{hyp};
  const double rate = cer(refs, hyps);
  const bool ok = mismatches == 0 && kitten == 3 && std::abs(rate - 0.0167) <= 0.0001;
  return {ok, std::to_string(all.size() * all.size()) + " pairs, " + std::to_string(mismatches) +
                  " mismatches; kitten/sitting " + std::to_string(kitten) + "; one in 60 -> CER " + fmt("%.6f", rate)};
}

// --------------------------------------------------------- CLI outputs

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args, const fs::path& out) {
  const std::string cmd =
      std::string("'") + SCRIPTORIUM_CLI_PATH + "' " + args + " >'" + out.string() + "' 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

class CliCheck {
 public:
  explicit CliCheck(fs::path dir) : dir_(std::move(dir)) {}

  // Runs `args` (with {out} replaced by a fresh directory) twice and
  // compares the listed outputs byte for byte. "stdout" names the captured
  // standard output.
  void twice(const std::string& name, const std::string& args, const std::vector<std::string>& files) {
    std::vector<std::string> first;
    for (int round = 0; round < 2; ++round) {
      const fs::path out = dir_ / (name + "-" + std::to_string(round));
      fs::create_directories(out);
      std::string cmd = args;
      for (std::size_t pos; (pos = cmd.find("{out}")) != std::string::npos;) cmd.replace(pos, 5, out.string());
      const int code = run_cli(cmd, out / "stdout");
      if (code != 0) {
        problems_.push_back(name + " exited " + std::to_string(code));
        return;
      }
      for (std::size_t i = 0; i < files.size(); ++i) {
        const std::string bytes = slurp(out / files[i]);
        if (round == 0) {
          first.push_back(bytes);
        } else if (bytes != first[i]) {
          problems_.push_back(name + ": " + files[i] + " differs between runs");
        }
      }
    }
    ++commands_;
  }

  void schema(const json& doc, const std::string& schema_file, const std::string& what) {
    const auto schema = oracle::load_schema(fs::path(SCRIPTORIUM_SOURCE_DIR) / "schemas" / schema_file);
    for (const auto& e : oracle::schema_errors(doc, schema)) problems_.push_back(what + ": " + e);
    ++documents_;
  }

  void problem(const std::string& p) { problems_.push_back(p); }
  fs::path run_dir(const std::string& name) const { return dir_ / (name + "-0"); }

  Outcome outcome() const {
    std::string detail = std::to_string(commands_) + " commands deterministic checks, " +
                         std::to_string(documents_) + " documents schema-checked";
    for (const auto& p : problems_) detail += "; " + p;
    return {problems_.empty(), detail};
  }

 private:
  fs::path dir_;
  std::vector<std::string> problems_;
  int commands_ = 0;
  int documents_ = 0;
};

// Starts `scriptorium serve` on a free port, fetches every API document
// twice and compares.
void check_serve(CliCheck& check, const fs::path& images, const fs::path& dir) {
  const fs::path log = dir / "serve.log";
  const pid_t pid = fork();
  if (pid == 0) {
    const std::string log_path = log.string();
    if (!std::freopen(log_path.c_str(), "w", stderr) || !std::freopen("/dev/null", "w", stdout)) _exit(126);
    const std::string images_arg = images.string();
    execl(SCRIPTORIUM_CLI_PATH, SCRIPTORIUM_CLI_PATH, "serve", "--images", images_arg.c_str(), "--port", "0",
          static_cast<char*>(nullptr));
    _exit(127);
  }
  int port = 0;
  for (int i = 0; i < 100 && port == 0; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    const std::string text = slurp(log);
    const auto at = text.find("http://127.0.0.1:");
    if (at != std::string::npos) port = std::atoi(text.c_str() + at + 17);
  }
  if (port == 0) {
    check.problem("serve did not report a port");
  } else {
    httplib::Client client("127.0.0.1", port);
    const std::string body = R"({"image_id": "page.png"})";
    auto a = client.Post("/api/segment", body, "application/json");
    auto b = client.Post("/api/segment", body, "application/json");
    auto p = client.Get("/api/params");
    auto o1 = client.Get("/api/overlay/page.png?line_gap=8");
    auto o2 = client.Get("/api/overlay/page.png?line_gap=8");
    if (!a || !b || !p || !o1 || !o2 || a->status != 200 || p->status != 200 || o1->status != 200) {
      check.problem("serve requests failed");
    } else {
      if (a->body != b->body || o1->body != o2->body) check.problem("serve responses differ between requests");
      check.schema(json::parse(a->body), "page-segmentation.schema.json", "/api/segment");
      check.schema(json::parse(p->body), "seg-params.schema.json", "/api/params");
    }
  }
  kill(pid, SIGTERM);
  waitpid(pid, nullptr, 0);
}

Outcome cli_determinism() {
  const fs::path dir = fs::temp_directory_path() / ("scriptorium-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  CliCheck check(dir);

  check.twice("synth",
              "synth --ngrams --random 60 --min-length 10 --max-length 30 --seed 5 --page --write-atlas {out}/atlas "
              "-o {out}",
              {"manifest.jsonl", "page.png", "page.txt", "lines/000000.png", "lines/000200.png", "atlas/atlas.json",
               "atlas/1.pgm"});
  const fs::path corpus = check.run_dir("synth");
  {
    std::istringstream in(slurp(corpus / "manifest.jsonl"));
    std::string line;
    int n = 0;
    while (std::getline(in, line) && n < 50) {
      check.schema(json::parse(line), "manifest-record.schema.json", "manifest line " + std::to_string(++n));
    }
    check.schema(json::parse(slurp(corpus / "atlas" / "atlas.json")), "atlas.schema.json", "atlas.json");
  }

  check.twice("train", "train -m " + q(corpus / "manifest.jsonl") + " --epochs 2 --seed 3 -o {out}/model.ckpt " +
                           "--loss-curve {out}/loss.json",
              {"model.ckpt", "loss.json"});
  const fs::path model = check.run_dir("train") / "model.ckpt";
  {
    std::ifstream in(model, std::ios::binary);
    std::string header;
    std::getline(in, header);
    check.schema(json::parse(header), "checkpoint-header.schema.json", "checkpoint header");
  }

  const fs::path page = corpus / "page.png";
  check.twice("segment", "segment " + q(page) + " --chain-code -o {out}", {"seg.json", "overlay.png", "outlines.scc"});
  check.schema(json::parse(slurp(check.run_dir("segment") / "seg.json")), "page-segmentation.schema.json",
               "seg.json");

  check.twice("ocr",
              "ocr " + q(page) + " --model " + q(model) + " --refs " + q(corpus / "page.txt") +
                  " --report {out}/report.json -o {out}/transcript.txt",
              {"report.json", "transcript.txt"});
  check.schema(json::parse(slurp(check.run_dir("ocr") / "report.json")), "ocr-report.schema.json", "ocr report");

  check.twice("small", "synth --random 3 --min-length 8 --max-length 12 --seed 9 --page -o {out}", {"page.png"});
  check.twice("cluster", "cluster " + q(check.run_dir("small") / "page.png") + " -t 0.1 --matrix {out}/matrix.csv -o {out}/clusters.json",
              {"clusters.json", "matrix.csv"});
  check.schema(json::parse(slurp(check.run_dir("cluster") / "clusters.json")), "clustering.schema.json",
               "clustering");

  check.twice("eval", "eval -r " + q(corpus / "page.txt") + " -y " + q(check.run_dir("ocr") / "transcript.txt"),
              {"stdout"});

  const fs::path images = dir / "images";
  fs::create_directories(images);
  fs::copy_file(page, images / "page.png");
  check_serve(check, images, dir);

  check.schema(json::parse(slurp(fs::path(SCRIPTORIUM_SOURCE_DIR) / "data" / "eq_digits.json")),
               "eq-map.schema.json", "data/eq_digits.json");
  return check.outcome();
}

}  // namespace

int main() {
  std::printf("scriptorium acceptance\n");
  criterion("ctc-oracle", 30, ctc_oracle);
  criterion("ctc-gradient", 60, ctc_gradient);
  criterion("ctc-underflow", 10, ctc_underflow);
  criterion("outline-lossless", 0, outline_lossless);
  criterion("outline-conservation", 0, outline_conservation);
  criterion("data-reduction", 0, data_reduction);
  criterion("skeleton-topology", 0, skeleton_topology);
  criterion("clustering", 0, clustering);
  criterion("end-to-end-ocr", 600, end_to_end);
  criterion("edit-distance", 0, edit_distance_check);
  criterion("cli-determinism", 0, cli_determinism);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
