#include "scriptorium/commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "scriptorium/common.hpp"
#include "scriptorium/corpus.hpp"
#include "scriptorium/error.hpp"
#include "scriptorium/evaluation.hpp"
#include "scriptorium/frames.hpp"
#include "scriptorium/image_io.hpp"
#include "scriptorium/matching.hpp"
#include "scriptorium/outlines.hpp"
#include "scriptorium/render.hpp"
#include "scriptorium/server.hpp"
#include "scriptorium/toy_model.hpp"

namespace scriptorium::cli {

namespace fs = std::filesystem;

namespace {

// Command-line overrides for SegParams; unset flags keep the file values.
struct SegOverrides {
  std::optional<int> connectivity;
  std::optional<int> small_blob_area;
  std::optional<int> line_gap;
  std::optional<std::string> reading_order;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--connectivity", connectivity, "Blob connectivity (4 or 8)");
    cmd->add_option("--small-blob-area", small_blob_area, "Blobs below this area are diacritics or noise");
    cmd->add_option("--line-gap", line_gap, "Largest centroid-y gap inside one text line");
    cmd->add_option("--reading-order", reading_order, "ltr or rtl");
  }

  SegParams apply(nlohmann::json doc) const {
    if (connectivity) doc["connectivity"] = *connectivity;
    if (small_blob_area) doc["small_blob_area"] = *small_blob_area;
    if (line_gap) doc["line_gap"] = *line_gap;
    if (reading_order) doc["reading_order"] = *reading_order;
    return checked_params(doc);
  }
};

// ---------------------------------------------------------------- segment

struct SegmentArgs {
  std::string image;
  std::string out;
  std::string params;
  bool chain_code = false;
  SegOverrides overrides;
};

void cmd_segment(const SegmentArgs& a) {
  const SegParams params = a.overrides.apply(a.params.empty() ? nlohmann::json::object() : read_json(a.params));
  const BinaryImage page = load_page(a.image);
  const PageSegmentation seg = segment_page(page, params);
  ensure_directory(a.out);
  write_text(fs::path(a.out) / "seg.json", dump(to_json(seg)));
  save_png(fs::path(a.out) / "overlay.png", render_overlay(page, seg));
  if (a.chain_code) {
    const auto outlines = trace_page(seg);
    write_bytes(fs::path(a.out) / "outlines.scc", encode_chain_code(seg.width, seg.height, outlines));
    const auto report = compression_ratio(seg.width, seg.height, outlines);
    std::fprintf(stderr, "bitmap %zu bytes, chain code %zu bytes, ratio %.2f\n", report.bitmap_bytes,
                 report.chain_code_bytes, report.ratio);
  }
  std::fprintf(stderr, "%zu blobs, %zu lines, %zu noise\n", seg.blobs.size(), seg.lines.size(),
               seg.noise_ids.size());
}

// -------------------------------------------------------------------- ocr

struct OcrArgs {
  std::string image;
  std::string config;
  std::string model;
  std::string atlas;
  std::string eq;
  std::string refs;
  std::string report;
  std::string output;
  std::optional<int> window;
  SegOverrides overrides;
};

// Relative paths in a config file are taken from the file's directory.
std::string config_path(const nlohmann::json& cfg, const char* key, const fs::path& base) {
  if (!cfg.contains(key)) return {};
  if (!cfg[key].is_string()) throw UsageError(std::string("config: ") + key + " must be a string");
  const std::string v = cfg[key].get<std::string>();
  if (v == "builtin" || fs::path(v).is_absolute()) return v;
  return (base / v).string();
}

void cmd_ocr(OcrArgs a) {
  nlohmann::json cfg = nlohmann::json::object();
  fs::path base = ".";
  if (!a.config.empty()) {
    cfg = read_json(a.config);
    if (!cfg.is_object()) throw UsageError("config must be a JSON object");
    base = fs::path(a.config).parent_path();
    if (base.empty()) base = ".";
  }
  for (const auto& [key, value] : cfg.items()) {
    if (key != "seg" && key != "window" && key != "atlas" && key != "model" && key != "eq" && key != "seed") {
      throw UsageError("config: unknown key '" + key + "'");
    }
  }
  if (a.model.empty()) a.model = config_path(cfg, "model", base);
  if (a.atlas.empty()) a.atlas = config_path(cfg, "atlas", base);
  if (a.eq.empty()) a.eq = config_path(cfg, "eq", base);
  if (a.atlas.empty()) a.atlas = "builtin";
  int window = 7;
  if (cfg.contains("window")) {
    if (!cfg["window"].is_number_integer()) throw UsageError("config: window must be an integer");
    window = cfg["window"].get<int>();
  }
  if (a.window) window = *a.window;
  if (window < 1) throw UsageError("window must be >= 1");
  if (a.model.empty()) throw UsageError("no model checkpoint given (config 'model' or --model)");
  const SegParams params = a.overrides.apply(cfg.value("seg", nlohmann::json::object()));

  // Everything referenced is loaded before the page is touched.
  const GlyphSet glyphs = load_glyphs(a.atlas);
  const ToyModel model = load_checkpoint(a.model);
  const EquivalenceMap eq = a.eq.empty() ? EquivalenceMap{} : load_equivalence(a.eq);
  std::vector<LabelSequence> refs;
  if (!a.refs.empty()) {
    for (const auto& line : read_lines(a.refs)) refs.push_back(parse_ids(line));
  }
  if (model.classes() != glyphs.class_count()) {
    throw Error(ErrorKind::DimensionMismatch,
                "model has " + std::to_string(model.classes()) + " classes but the alphabet needs " +
                    std::to_string(glyphs.class_count()));
  }
  if (model.input_dim() != glyphs.height() * window) {
    throw Error(ErrorKind::DimensionMismatch,
                "model input is " + std::to_string(model.input_dim()) + " values per frame but glyph height " +
                    std::to_string(glyphs.height()) + " x window " + std::to_string(window) + " gives " +
                    std::to_string(glyphs.height() * window));
  }

  const BinaryImage page = load_page(a.image);
  const PageSegmentation seg = segment_page(page, params);
  std::vector<LabelSequence> hyps;
  std::string transcript;
  for (const TextLine& line : seg.lines) {
    const BinaryImage band = line_band(line, seg.blobs, glyphs.height());
    hyps.push_back(model.decode(make_frames(band, window, params.reading_order)));
    transcript += format_ids(hyps.back()) + "\n";
  }
  if (a.output.empty()) {
    std::cout << transcript << std::flush;
  } else {
    write_text(a.output, transcript);
  }

  if (!a.refs.empty()) {
    const std::size_t n = std::max(refs.size(), hyps.size());
    refs.resize(n);
    hyps.resize(n);
    nlohmann::json lines = nlohmann::json::array();
    std::size_t errors = 0;
    std::size_t symbols = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t d = edit_distance(refs[i], hyps[i], eq);
      errors += d;
      symbols += refs[i].size();
      lines.push_back({{"line", i + 1}, {"errors", d}, {"symbols", refs[i].size()}});
    }
    const double rate = symbols == 0 ? (errors == 0 ? 0.0 : 1.0) : static_cast<double>(errors) / symbols;
    const nlohmann::json report = {{"lines", lines}, {"errors", errors}, {"symbols", symbols}, {"cer", rate}};
    if (!a.report.empty()) {
      write_text(a.report, dump(report));
    } else {
      for (const auto& l : lines) {
        std::fprintf(stderr, "line %zu: %zu errors / %zu symbols\n", l["line"].get<std::size_t>(),
                     l["errors"].get<std::size_t>(), l["symbols"].get<std::size_t>());
      }
      std::fprintf(stderr, "CER %.6f (%zu / %zu)\n", rate, errors, symbols);
    }
  }
}

// ---------------------------------------------------------------- cluster

struct ClusterArgs {
  std::vector<std::string> images;
  double threshold = 0.0;
  std::size_t samples = 64;
  std::size_t starts = 16;
  bool exhaustive = false;
  std::string metric = "dtw";
  int min_area = 12;
  int connectivity = 8;
  unsigned threads = 0;
  std::string out;
  std::string matrix;
};

void cmd_cluster(const ClusterArgs& a) {
  if (a.samples < 8) throw UsageError("--samples must be >= 8");
  ClusterOptions options;
  options.metric = a.metric == "broken" ? Metric::MinDtwBroken : Metric::SymmetricDtw;
  options.starts = a.exhaustive ? a.samples : a.starts;
  options.threads = a.threads;

  std::vector<NormalizedCycle> outlines;
  nlohmann::json items = nlohmann::json::array();
  std::vector<std::string> ids;
  for (const auto& image : a.images) {
    const BinaryImage page = load_page(image);
    for (const Blob& blob : extract_blobs(page, a.connectivity)) {
      if (static_cast<int>(blob.area) < a.min_area) continue;
      BlobOutline outline = trace_graph(blob);
      canonicalize(outline);
      for (const auto& cycle : outline.cycles) {
        if (cycle.orientation > 0) outlines.push_back(normalize(cycle, a.samples));
      }
      items.push_back({{"image", fs::path(image).filename().string()}, {"blob_id", blob.id}});
      ids.push_back(fs::path(image).filename().string() + ":" + std::to_string(blob.id));
    }
  }
  std::fprintf(stderr, "clustering %zu outlines\n", outlines.size());

  const std::size_t n = outlines.size();
  const DistanceMatrix m = distance_matrix(
      n,
      [&](std::size_t i, std::size_t j) {
        const double d = dtw_distance(outlines[i], outlines[j], options.starts);
        if (options.metric == Metric::SymmetricDtw) return d;
        return std::min(d, match_broken(std::span(&outlines[i], 1), outlines[j]));
      },
      options.threads);
  const Clustering c = single_link(m, a.threshold);
  nlohmann::json doc = to_json(c);
  doc["items"] = items;
  if (a.out.empty()) {
    std::cout << dump(doc) << std::flush;
  } else {
    write_text(a.out, dump(doc));
  }
  if (!a.matrix.empty()) write_text(a.matrix, distance_matrix_csv(m, ids));
  std::fprintf(stderr, "%d clusters\n", c.cluster_count());
}

// ------------------------------------------------------------------ synth

struct SynthArgs {
  std::string atlas = "builtin";
  std::optional<int> join_overlap;
  std::string plan;
  bool ngrams = false;
  std::string extras;
  int random = 0;
  int min_length = 20;
  int max_length = 60;
  std::uint64_t seed = 1;
  double salt = 0.0;
  unsigned threads = 0;
  std::string out;
  bool page = false;
  std::string write_atlas;
};

std::vector<LabelSequence> read_id_lines(const std::string& path) {
  std::vector<LabelSequence> out;
  for (const auto& line : read_lines(path)) {
    try {
      LabelSequence ids = parse_ids(line);
      if (!ids.empty()) out.push_back(std::move(ids));
    } catch (const Error& e) {
      throw UsageError(path + ": " + e.what());
    }
  }
  return out;
}

void cmd_synth(const SynthArgs& a) {
  GlyphSet glyphs = load_glyphs(a.atlas);
  if (a.join_overlap) {
    glyphs.join_overlap = *a.join_overlap;
    try {
      glyphs.validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  if (!a.write_atlas.empty()) save_atlas(a.write_atlas, glyphs);

  std::vector<LabelSequence> texts;
  if (!a.plan.empty()) texts = read_id_lines(a.plan);
  if (!a.extras.empty() && !a.ngrams) throw UsageError("--extras needs --ngrams");
  if (a.ngrams) {
    const auto extras = a.extras.empty() ? std::vector<LabelSequence>{} : read_id_lines(a.extras);
    NgramPlan plan;
    try {
      plan = build_plan(glyphs, extras);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    texts.insert(texts.end(), plan.strings.begin(), plan.strings.end());
  }
  if (a.random > 0) {
    const auto lines = random_lines(glyphs, a.random, a.min_length, a.max_length, a.seed);
    texts.insert(texts.end(), lines.begin(), lines.end());
  }
  if (texts.empty()) {
    if (!a.write_atlas.empty()) return;
    throw UsageError("nothing to synthesize: give --plan, --ngrams or --random");
  }
  if (a.out.empty()) throw UsageError("--out is required when synthesizing");
  for (const auto& t : texts) {
    for (int id : t) {
      if (!glyphs.has_symbol(id)) throw UsageError("plan uses unknown symbol " + std::to_string(id));
    }
  }

  const auto lines = synthesize_corpus(glyphs, texts, a.seed, a.salt, a.threads);
  const fs::path out(a.out);
  ensure_directory(out / "lines");
  std::string manifest;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "lines/%06zu.png", i);
    save_png(out / name, line_to_gray(lines[i].image));
    const nlohmann::json record = {{"image_path", name},
                                   {"label_ids", lines[i].labels},
                                   {"seed", a.seed ^ static_cast<std::uint64_t>(i)}};
    manifest += record.dump() + "\n";
  }
  write_text(out / "manifest.jsonl", manifest);

  if (a.page) {
    // All lines stacked on one page, for trying out segment and ocr.
    const int margin = 20;
    const int pitch = 2 * glyphs.height();
    int width = 0;
    for (const auto& l : lines) width = std::max(width, l.image.width());
    BinaryImage page(width + 2 * margin, 2 * margin + pitch * static_cast<int>(lines.size()));
    std::string truth;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const BinaryImage& img = lines[i].image;
      const int y0 = margin + pitch * static_cast<int>(i);
      for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
          if (img.at(x, y)) page.set(margin + x, y0 + y, true);
        }
      }
      truth += format_ids(lines[i].labels) + "\n";
    }
    save_png(out / "page.png", line_to_gray(page));
    write_text(out / "page.txt", truth);
  }
  std::fprintf(stderr, "wrote %zu lines to %s\n", lines.size(), a.out.c_str());
}

// ------------------------------------------------------------------ train

struct TrainArgs {
  std::string manifest;
  std::string atlas = "builtin";
  std::string init;
  std::string out;
  std::string loss_curve;
  int window = 7;
  int state = 32;
  int epochs = 10;
  double lr = 0.05;
  int batch = 8;
  double clip = 5.0;
  std::uint64_t seed = 1;
};

void cmd_train(const TrainArgs& a) {
  if (a.window < 1 || a.state < 1 || a.epochs < 0 || a.batch < 1 || !(a.lr > 0.0) || !(a.clip > 0.0)) {
    throw UsageError("window, state and batch must be >= 1, epochs >= 0, lr and clip > 0");
  }
  const GlyphSet glyphs = load_glyphs(a.atlas);
  const fs::path base = fs::path(a.manifest).parent_path();
  TrainingSet data;
  const auto records = read_lines(a.manifest);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].empty()) continue;
    nlohmann::json rec;
    std::string image;
    LabelSequence labels;
    try {
      rec = nlohmann::json::parse(records[i]);
      image = rec.at("image_path").get<std::string>();
      labels = rec.at("label_ids").get<LabelSequence>();
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(a.manifest + ":" + std::to_string(i + 1) + ": " + e.what());
    }
    const fs::path path = fs::path(image).is_absolute() ? fs::path(image) : base / image;
    const BinaryImage line = load_line_image(path);
    if (line.height() != glyphs.height()) {
      throw Error(ErrorKind::DimensionMismatch, path.string() + " has height " + std::to_string(line.height()) +
                                                    ", alphabet glyphs have " + std::to_string(glyphs.height()));
    }
    data.samples.push_back({make_frames(line, a.window), std::move(labels)});
  }
  if (data.samples.empty()) throw UsageError("manifest has no records");

  ToyModel model = a.init.empty() ? ToyModel(glyphs.height() * a.window, a.state, glyphs.class_count(), a.seed)
                                  : load_checkpoint(a.init);
  if (model.input_dim() != glyphs.height() * a.window || model.classes() != glyphs.class_count()) {
    throw Error(ErrorKind::DimensionMismatch, "initial checkpoint does not fit the alphabet and window");
  }
  TrainOptions options;
  options.epochs = a.epochs;
  options.learning_rate = a.lr;
  options.seed = a.seed;
  options.batch_size = a.batch;
  options.clip_norm = a.clip;
  const int first = model.epoch();
  options.on_epoch = [&](int epoch, double loss) {
    std::fprintf(stderr, "epoch %d/%d loss %.6f\n", first + epoch, first + a.epochs, loss);
  };
  std::fprintf(stderr, "training on %zu lines, %zu parameters\n", data.samples.size(), model.parameters().size());
  try {
    model = train_toy(std::move(model), data, options);
  } catch (const TrainingDiverged& e) {
    const std::string keep = a.out + ".last-finite";
    save_checkpoint(keep, e.last_finite());
    std::fprintf(stderr, "last finite model saved to %s\n", keep.c_str());
    throw;
  }
  save_checkpoint(a.out, model);
  if (!a.loss_curve.empty()) write_text(a.loss_curve, dump(nlohmann::json{{"loss", model.loss_curve()}}));
}

// ------------------------------------------------------------------- eval

struct EvalArgs {
  std::string ref;
  std::string hyp;
  std::string format = "ids";
  std::string eq;
};

void cmd_eval(const EvalArgs& a) {
  const EquivalenceMap eq = a.eq.empty() ? EquivalenceMap{} : load_equivalence(a.eq);
  auto parse = [&](const std::string& path) {
    std::vector<LabelSequence> out;
    for (const auto& line : read_lines(path)) {
      try {
        out.push_back(a.format == "text" ? utf8_codepoints(line) : parse_ids(line));
      } catch (const Error& e) {
        throw UsageError(path + ": " + e.what());
      }
    }
    return out;
  };
  const auto refs = parse(a.ref);
  const auto hyps = parse(a.hyp);
  if (refs.size() != hyps.size()) {
    throw UsageError("reference has " + std::to_string(refs.size()) + " lines, hypothesis has " +
                     std::to_string(hyps.size()));
  }
  std::size_t errors = 0;
  std::size_t symbols = 0;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    errors += edit_distance(refs[i], hyps[i], eq);
    symbols += refs[i].size();
  }
  if (symbols == 0) throw UsageError("reference contains no symbols");
  std::printf("CER %.6f (%zu errors / %zu symbols), accuracy %.6f\n", static_cast<double>(errors) / symbols,
              errors, symbols, 1.0 - static_cast<double>(errors) / symbols);
}

// ------------------------------------------------------------------ serve

struct ServeArgs {
  std::string images;
  std::string ui;
  std::string host = "127.0.0.1";
  int port = 8080;
};

void cmd_serve(const ServeArgs& a) {
  if (!fs::is_directory(a.images)) throw Error(ErrorKind::Io, "image directory not found: " + a.images);
  ApiServer server(a.images, a.ui);
  if (!server.bind(a.host, a.port)) {
    throw Error(ErrorKind::Io, "cannot bind " + a.host + ":" + std::to_string(a.port));
  }
  std::fprintf(stderr, "serving %s on http://%s:%d/\n", a.images.c_str(), a.host.c_str(), server.port());
  server.run();
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"scriptorium: document image OCR toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "scriptorium 0.1.0");

  SegmentArgs seg;
  auto* segment = app.add_subcommand("segment", "Binarize a page, find blobs and text lines");
  segment->add_option("image", seg.image, "Page image (PNG or PGM)")->required();
  segment->add_option("-o,--out", seg.out, "Output directory for seg.json and overlay.png")->required();
  segment->add_option("--params", seg.params, "SegParams JSON file");
  segment->add_flag("--chain-code", seg.chain_code, "Also write outlines.scc and report the compression ratio");
  seg.overrides.add_to(segment);
  segment->callback([&] { cmd_segment(seg); });

  OcrArgs ocr;
  auto* ocr_cmd = app.add_subcommand("ocr", "Transcribe every text line of a page with a trained model");
  ocr_cmd->add_option("image", ocr.image, "Page image")->required();
  ocr_cmd->add_option("-c,--config", ocr.config, "Pipeline config JSON (seg, window, atlas, model, eq, seed)");
  ocr_cmd->add_option("--model", ocr.model, "Model checkpoint (overrides config)");
  ocr_cmd->add_option("--atlas", ocr.atlas, "Glyph atlas directory or 'builtin' (overrides config)");
  ocr_cmd->add_option("--eq", ocr.eq, "Equivalence map JSON used for scoring");
  ocr_cmd->add_option("--window", ocr.window, "Frame width in columns (overrides config)");
  ocr_cmd->add_option("--refs", ocr.refs, "Reference ids, one line per text line, for a CER report");
  ocr_cmd->add_option("--report", ocr.report, "Write the CER report as JSON here instead of stderr");
  ocr_cmd->add_option("-o,--output", ocr.output, "Write the transcript here instead of stdout");
  ocr.overrides.add_to(ocr_cmd);
  ocr_cmd->callback([&] { cmd_ocr(ocr); });

  ClusterArgs cl;
  auto* cluster_cmd = app.add_subcommand("cluster", "Group blob outlines by shape");
  cluster_cmd->add_option("images", cl.images, "Page images")->required();
  cluster_cmd->add_option("-t,--threshold", cl.threshold, "Single-link distance cutoff")->required()->check(CLI::NonNegativeNumber);
  cluster_cmd->add_option("--samples", cl.samples, "Points per normalized outline")->capture_default_str();
  cluster_cmd->add_option("--starts", cl.starts, "Cyclic start offsets tried by DTW")->capture_default_str()->check(CLI::PositiveNumber);
  cluster_cmd->add_flag("--exhaustive", cl.exhaustive, "Try every start offset");
  cluster_cmd->add_option("--metric", cl.metric, "dtw or broken")->check(CLI::IsMember({"dtw", "broken"}))->capture_default_str();
  cluster_cmd->add_option("--min-area", cl.min_area, "Ignore blobs smaller than this")->capture_default_str();
  cluster_cmd->add_option("--connectivity", cl.connectivity, "4 or 8")->check(CLI::IsMember({4, 8}))->capture_default_str();
  cluster_cmd->add_option("--threads", cl.threads, "Worker threads (0: all cores)");
  cluster_cmd->add_option("-o,--out", cl.out, "Clustering JSON (default stdout)");
  cluster_cmd->add_option("--matrix", cl.matrix, "Also write the distance matrix as CSV");
  cluster_cmd->callback([&] { cmd_cluster(cl); });

  SynthArgs sy;
  auto* synth = app.add_subcommand("synth", "Render training lines from a glyph atlas");
  synth->add_option("--atlas", sy.atlas, "Atlas directory or 'builtin'")->capture_default_str();
  synth->add_option("--join-overlap", sy.join_overlap, "Override the atlas join overlap");
  synth->add_option("--plan", sy.plan, "Text file, one line of symbol ids per sample");
  synth->add_flag("--ngrams", sy.ngrams, "Add the unigram, bigram and space-trigram plan");
  synth->add_option("--extras", sy.extras, "Extra n-grams (ids per line) appended to --ngrams");
  synth->add_option("--random", sy.random, "Number of random lines to add")->check(CLI::NonNegativeNumber);
  synth->add_option("--min-length", sy.min_length, "Shortest random line")->capture_default_str();
  synth->add_option("--max-length", sy.max_length, "Longest random line")->capture_default_str();
  synth->add_option("--seed", sy.seed, "Base seed; line i uses seed xor i")->capture_default_str();
  synth->add_option("--salt", sy.salt, "Probability of a background pixel turning to ink")->check(CLI::Range(0.0, 1.0));
  synth->add_option("--threads", sy.threads, "Worker threads (0: all cores)");
  synth->add_option("-o,--out", sy.out, "Output directory (lines/*.png, manifest.jsonl)");
  synth->add_flag("--page", sy.page, "Also stack the lines into page.png with page.txt ground truth");
  synth->add_option("--write-atlas", sy.write_atlas, "Save the glyph set as an atlas directory");
  synth->callback([&] { cmd_synth(sy); });

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "Train the toy recurrent model with CTC");
  train->add_option("-m,--manifest", tr.manifest, "Corpus manifest (JSON lines)")->required();
  train->add_option("-o,--out", tr.out, "Checkpoint to write")->required();
  train->add_option("--atlas", tr.atlas, "Atlas directory or 'builtin'")->capture_default_str();
  train->add_option("--init", tr.init, "Continue from this checkpoint");
  train->add_option("--window", tr.window, "Frame width in columns")->capture_default_str();
  train->add_option("--state", tr.state, "Recurrent state size")->capture_default_str();
  train->add_option("--epochs", tr.epochs, "Epochs")->capture_default_str();
  train->add_option("--lr", tr.lr, "Learning rate")->capture_default_str();
  train->add_option("--batch", tr.batch, "Minibatch size")->capture_default_str();
  train->add_option("--clip", tr.clip, "Gradient norm clip")->capture_default_str();
  train->add_option("--seed", tr.seed, "Initialization and shuffling seed")->capture_default_str();
  train->add_option("--loss-curve", tr.loss_curve, "Write per-epoch mean losses as JSON");
  train->callback([&] { cmd_train(tr); });

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Character error rate of hypothesis lines against references");
  eval->add_option("-r,--ref", ev.ref, "Reference file, one line per sample")->required();
  eval->add_option("-y,--hyp", ev.hyp, "Hypothesis file, same line count")->required();
  eval->add_option("--format", ev.format, "ids (whitespace-separated) or text (UTF-8 code points)")
      ->check(CLI::IsMember({"ids", "text"}))
      ->capture_default_str();
  eval->add_option("--eq", ev.eq, "Equivalence map JSON");
  eval->callback([&] { cmd_eval(ev); });

  ServeArgs sv;
  auto* serve = app.add_subcommand("serve", "Serve the segmentation API and tuner UI");
  serve->add_option("--images", sv.images, "Directory of page images")->required();
  serve->add_option("--ui", sv.ui, "Directory of built UI assets");
  serve->add_option("--host", sv.host, "Bind address")->capture_default_str();
  serve->add_option("-p,--port", sv.port, "Port (0: any free port)")->capture_default_str()->check(CLI::Range(0, 65535));
  serve->callback([&] { cmd_serve(sv); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadArgs;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadArgs;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    const bool io = e.kind() == ErrorKind::Io || e.kind() == ErrorKind::UnsupportedFormat;
    return io ? kIoFailure : kPipelineFailure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kPipelineFailure;
  }
  return kOk;
}

}  // namespace scriptorium::cli
