#include "scriptorium/toy_model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

namespace scriptorium {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using VectorMap = Eigen::Map<Eigen::VectorXd>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

struct Offsets {
  std::size_t w_in, w_rec, b_state, w_out, b_out, total;

  Offsets(int d, int s, int c) {
    const auto D = static_cast<std::size_t>(d);
    const auto S = static_cast<std::size_t>(s);
    const auto C = static_cast<std::size_t>(c);
    w_in = 0;
    w_rec = w_in + S * D;
    b_state = w_rec + S * S;
    w_out = b_state + S;
    b_out = w_out + C * S;
    total = b_out + C;
  }
};

template <typename Span, typename MapT>
auto mat(Span data, std::size_t offset, int rows, int cols) {
  return MapT(data.data() + offset, rows, cols);
}

RowMatrix frame_matrix(const FrameSequence& frames) {
  RowMatrix x(frames.count(), static_cast<Eigen::Index>(frames.frame_size()));
  for (int t = 0; t < frames.count(); ++t) {
    const auto f = frames.frame(t);
    for (std::size_t i = 0; i < f.size(); ++i) x(t, static_cast<Eigen::Index>(i)) = f[i];
  }
  return x;
}

struct ForwardPass {
  RowMatrix inputs;  // T x D
  RowMatrix states;  // T x S
  LogProbMatrix log_probs;
};

}  // namespace

ToyModel::ToyModel(int input_dim, int state_size, int classes, std::uint64_t seed)
    : input_dim_(input_dim), state_size_(state_size), classes_(classes), seed_(seed) {
  if (input_dim < 1 || state_size < 1 || classes < 2) {
    throw Error(ErrorKind::InvalidArgument, "ToyModel: dimensions must be positive and classes >= 2");
  }
  const Offsets o(input_dim, state_size, classes);
  params_.assign(o.total, 0.0);
  std::mt19937_64 rng(seed);
  auto fill = [&](std::size_t offset, std::size_t count, int fan_in, int fan_out) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (std::size_t i = 0; i < count; ++i) params_[offset + i] = dist(rng);
  };
  const auto S = static_cast<std::size_t>(state_size);
  fill(o.w_in, S * static_cast<std::size_t>(input_dim), input_dim, state_size);
  fill(o.w_rec, S * S, state_size, state_size);
  fill(o.w_out, static_cast<std::size_t>(classes) * S, state_size, classes);
}

std::size_t ToyModel::parameter_count(int input_dim, int state_size, int classes) {
  return Offsets(input_dim, state_size, classes).total;
}

ToyModel ToyModel::from_parameters(int input_dim, int state_size, int classes, std::uint64_t seed,
                                   int epoch, std::vector<double> params,
                                   std::vector<double> loss_curve) {
  if (input_dim < 1 || state_size < 1 || classes < 2) {
    throw Error(ErrorKind::DimensionMismatch, "ToyModel: bad dimensions");
  }
  if (params.size() != parameter_count(input_dim, state_size, classes)) {
    throw Error(ErrorKind::DimensionMismatch,
                "ToyModel: expected " + std::to_string(parameter_count(input_dim, state_size, classes)) +
                    " parameters, got " + std::to_string(params.size()));
  }
  ToyModel m;
  m.input_dim_ = input_dim;
  m.state_size_ = state_size;
  m.classes_ = classes;
  m.seed_ = seed;
  m.epoch_ = epoch;
  m.params_ = std::move(params);
  m.loss_curve_ = std::move(loss_curve);
  return m;
}

void ToyModel::check_frames(const FrameSequence& frames) const {
  if (static_cast<int>(frames.frame_size()) != input_dim_) {
    throw Error(ErrorKind::DimensionMismatch,
                "model expects " + std::to_string(input_dim_) + " inputs per frame, got " +
                    std::to_string(frames.frame_size()) + " (" + std::to_string(frames.height()) +
                    "x" + std::to_string(frames.window()) + ")");
  }
  if (frames.count() < 1) throw Error(ErrorKind::EmptyInput, "model: no frames");
}

namespace {

ForwardPass run_forward(std::span<const double> params, int d, int s, int c,
                        const FrameSequence& frames) {
  const Offsets o(d, s, c);
  const auto w_in = mat<std::span<const double>, ConstMatrixMap>(params, o.w_in, s, d);
  const auto w_rec = mat<std::span<const double>, ConstMatrixMap>(params, o.w_rec, s, s);
  const ConstVectorMap b_state(params.data() + o.b_state, s);
  const auto w_out = mat<std::span<const double>, ConstMatrixMap>(params, o.w_out, c, s);
  const ConstVectorMap b_out(params.data() + o.b_out, c);

  ForwardPass f;
  f.inputs = frame_matrix(frames);
  const int steps = frames.count();
  RowMatrix driven = f.inputs * w_in.transpose();  // T x S
  f.states.resize(steps, s);
  Eigen::VectorXd h = Eigen::VectorXd::Zero(s);
  for (int t = 0; t < steps; ++t) {
    Eigen::VectorXd a = driven.row(t).transpose() + w_rec * h + b_state;
    h = a.array().tanh();
    f.states.row(t) = h.transpose();
  }
  RowMatrix logits = f.states * w_out.transpose();
  logits.rowwise() += b_out.transpose();

  f.log_probs = LogProbMatrix(static_cast<std::size_t>(steps), static_cast<std::size_t>(c));
  for (int t = 0; t < steps; ++t) {
    const double hi = logits.row(t).maxCoeff();
    const double norm = hi + std::log((logits.row(t).array() - hi).exp().sum());
    for (int k = 0; k < c; ++k) {
      f.log_probs(static_cast<std::size_t>(t), static_cast<std::size_t>(k)) = logits(t, k) - norm;
    }
  }
  return f;
}

}  // namespace

LogProbMatrix ToyModel::forward(const FrameSequence& frames) const {
  check_frames(frames);
  return run_forward(params_, input_dim_, state_size_, classes_, frames).log_probs;
}

LabelSequence ToyModel::decode(const FrameSequence& frames) const {
  return decode_best_path(forward(frames));
}

double ToyModel::accumulate_gradient(const FrameSequence& frames, std::span<const int> labels,
                                     std::span<double> grad) const {
  check_frames(frames);
  if (grad.size() != params_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "gradient buffer size mismatch");
  }
  const int d = input_dim_;
  const int s = state_size_;
  const int c = classes_;
  const Offsets o(d, s, c);
  const ForwardPass f = run_forward(params_, d, s, c, frames);
  const CtcResult ctc = ctc_loss_and_grad(f.log_probs, labels);

  const int steps = frames.count();
  const std::span<const double> params = params_;
  const auto w_rec = mat<std::span<const double>, ConstMatrixMap>(params, o.w_rec, s, s);
  const auto w_out = mat<std::span<const double>, ConstMatrixMap>(params, o.w_out, c, s);

  const ConstMatrixMap g_logits(ctc.grad.values().data(), steps, c);
  auto gw_in = mat<std::span<double>, MatrixMap>(grad, o.w_in, s, d);
  auto gw_rec = mat<std::span<double>, MatrixMap>(grad, o.w_rec, s, s);
  VectorMap gb_state(grad.data() + o.b_state, s);
  auto gw_out = mat<std::span<double>, MatrixMap>(grad, o.w_out, c, s);
  VectorMap gb_out(grad.data() + o.b_out, c);

  gw_out.noalias() += g_logits.transpose() * f.states;
  gb_out += g_logits.colwise().sum().transpose();

  RowMatrix d_states = g_logits * w_out;  // T x S, direct contribution
  RowMatrix d_pre(steps, s);
  Eigen::VectorXd carry = Eigen::VectorXd::Zero(s);
  for (int t = steps - 1; t >= 0; --t) {
    const Eigen::VectorXd dh = d_states.row(t).transpose() + carry;
    const Eigen::ArrayXd h = f.states.row(t).transpose().array();
    const Eigen::VectorXd da = (dh.array() * (1.0 - h * h)).matrix();
    d_pre.row(t) = da.transpose();
    carry.noalias() = w_rec.transpose() * da;
  }

  gw_in.noalias() += d_pre.transpose() * f.inputs;
  if (steps > 1) {
    gw_rec.noalias() += d_pre.bottomRows(steps - 1).transpose() * f.states.topRows(steps - 1);
  }
  gb_state += d_pre.colwise().sum().transpose();
  return ctc.loss;
}

ToyModel train_toy(ToyModel model, const TrainingSet& data, const TrainOptions& options) {
  if (options.epochs < 0) throw Error(ErrorKind::InvalidArgument, "train: negative epoch count");
  if (options.batch_size < 1) throw Error(ErrorKind::InvalidArgument, "train: batch size must be >= 1");
  if (options.epochs == 0) return model;
  if (data.samples.empty()) throw Error(ErrorKind::EmptyInput, "train: no samples");

  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> order(data.samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> grad(model.parameters().size());

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    const ToyModel before = model;
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t first = 0; first < order.size(); first += static_cast<std::size_t>(options.batch_size)) {
      const std::size_t last = std::min(order.size(), first + static_cast<std::size_t>(options.batch_size));
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t i = first; i < last; ++i) {
        const TrainingSample& sample = data.samples[order[i]];
        epoch_loss += model.accumulate_gradient(sample.frames, sample.labels, grad);
      }
      const double scale = 1.0 / static_cast<double>(last - first);
      double norm2 = 0.0;
      for (double& g : grad) {
        g *= scale;
        norm2 += g * g;
      }
      const double norm = std::sqrt(norm2);
      double step = options.learning_rate;
      if (norm > options.clip_norm) step *= options.clip_norm / norm;
      auto params = model.parameters();
      for (std::size_t k = 0; k < params.size(); ++k) params[k] -= step * grad[k];
    }
    const double mean = epoch_loss / static_cast<double>(order.size());
    const auto params = model.parameters();
    const bool finite = std::isfinite(mean) &&
                        std::all_of(params.begin(), params.end(), [](double v) { return std::isfinite(v); });
    if (!finite) {
      throw TrainingDiverged("training diverged in epoch " + std::to_string(model.epoch() + 1),
                             before);
    }
    model.record_epoch(mean);
    if (options.on_epoch) options.on_epoch(epoch + 1, mean);
  }
  return model;
}

namespace {

constexpr const char* kCheckpointFormat = "scriptorium-toy-rnn";

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xff) << (8 * (7 - i));
    return r;
  }
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ToyModel& model) {
  const nlohmann::json header = {
      {"format", kCheckpointFormat},
      {"version", 1},
      {"input_dim", model.input_dim()},
      {"state_size", model.state_size()},
      {"classes", model.classes()},
      {"seed", model.seed()},
      {"epoch", model.epoch()},
      {"parameter_count", model.parameters().size()},
      {"loss_curve", model.loss_curve()},
  };
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write checkpoint " + path.string());
  const std::string text = header.dump() + "\n";
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (double v : model.parameters()) {
    const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(v));
    char bytes[8];
    std::memcpy(bytes, &bits, 8);
    out.write(bytes, 8);
  }
  if (!out) throw Error(ErrorKind::Io, "checkpoint write failed: " + path.string());
}

ToyModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open checkpoint " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::UnsupportedFormat, "checkpoint: missing header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::UnsupportedFormat, std::string("checkpoint header: ") + e.what());
  }
  try {
    if (header.at("format") != kCheckpointFormat || header.at("version") != 1) {
      throw Error(ErrorKind::UnsupportedFormat, "checkpoint: unknown format or version");
    }
    const auto count = header.at("parameter_count").get<std::size_t>();
    std::vector<double> params(count);
    for (std::size_t i = 0; i < count; ++i) {
      char bytes[8];
      if (!in.read(bytes, 8)) throw Error(ErrorKind::UnsupportedFormat, "checkpoint: truncated parameters");
      std::uint64_t bits;
      std::memcpy(&bits, bytes, 8);
      params[i] = std::bit_cast<double>(to_little_endian(bits));
    }
    if (in.peek() != std::char_traits<char>::eof()) {
      throw Error(ErrorKind::UnsupportedFormat, "checkpoint: trailing bytes");
    }
    return ToyModel::from_parameters(header.at("input_dim").get<int>(), header.at("state_size").get<int>(),
                                     header.at("classes").get<int>(), header.at("seed").get<std::uint64_t>(),
                                     header.at("epoch").get<int>(), std::move(params),
                                     header.value("loss_curve", std::vector<double>{}));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::UnsupportedFormat, std::string("checkpoint header: ") + e.what());
  }
}

}  // namespace scriptorium
