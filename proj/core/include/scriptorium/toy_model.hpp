#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "scriptorium/ctc.hpp"
#include "scriptorium/error.hpp"
#include "scriptorium/frames.hpp"

namespace scriptorium {

/// Elman recurrent frame model:
///   h_t = tanh(W_in x_t + W_rec h_{t-1} + b_state)
///   log p_t = log_softmax(W_out h_t + b_out)
/// with x_t the flattened binary frame. Parameters are stored in one flat
/// vector in the order W_in, W_rec, b_state, W_out, b_out (matrices
/// row-major), which is also the checkpoint order.
class ToyModel {
 public:
  ToyModel() = default;
  /// Uniform Glorot initialization from `seed`; biases start at zero.
  ToyModel(int input_dim, int state_size, int classes, std::uint64_t seed);

  int input_dim() const { return input_dim_; }
  int state_size() const { return state_size_; }
  int classes() const { return classes_; }
  std::uint64_t seed() const { return seed_; }
  int epoch() const { return epoch_; }

  std::span<const double> parameters() const { return params_; }
  std::span<double> parameters() { return params_; }
  const std::vector<double>& loss_curve() const { return loss_curve_; }

  LogProbMatrix forward(const FrameSequence& frames) const;
  LabelSequence decode(const FrameSequence& frames) const;

  /// CTC loss of one sample; its parameter gradient is added into `grad`
  /// (same layout as parameters()).
  double accumulate_gradient(const FrameSequence& frames, std::span<const int> labels,
                             std::span<double> grad) const;

  /// Rebuilds a model from stored parts; throws Error{DimensionMismatch} if
  /// the parameter count does not fit the dimensions.
  static ToyModel from_parameters(int input_dim, int state_size, int classes, std::uint64_t seed,
                                  int epoch, std::vector<double> params,
                                  std::vector<double> loss_curve = {});

  static std::size_t parameter_count(int input_dim, int state_size, int classes);

  void record_epoch(double mean_loss) {
    ++epoch_;
    loss_curve_.push_back(mean_loss);
  }

  friend bool operator==(const ToyModel&, const ToyModel&) = default;

 private:
  void check_frames(const FrameSequence& frames) const;

  int input_dim_ = 0;
  int state_size_ = 0;
  int classes_ = 0;
  std::uint64_t seed_ = 0;
  int epoch_ = 0;
  std::vector<double> params_;
  std::vector<double> loss_curve_;
};

struct TrainingSample {
  FrameSequence frames;
  LabelSequence labels;
};

struct TrainingSet {
  std::vector<TrainingSample> samples;
};

struct TrainOptions {
  int epochs = 10;
  double learning_rate = 0.01;
  std::uint64_t seed = 1;
  int batch_size = 8;
  double clip_norm = 5.0;
  /// Called after every finished epoch with its index (from 1) and mean loss.
  std::function<void(int, double)> on_epoch;
};

/// Thrown when a mean epoch loss stops being finite. Carries the model as it
/// was after the last finite epoch.
class TrainingDiverged : public Error {
 public:
  TrainingDiverged(const std::string& what, ToyModel last_finite)
      : Error(ErrorKind::Diverged, what), last_finite_(std::move(last_finite)) {}

  const ToyModel& last_finite() const { return last_finite_; }

 private:
  ToyModel last_finite_;
};

/// Minibatch SGD on the mean per-sample CTC loss, with the batch gradient
/// clipped to `clip_norm` in L2. Sample order is shuffled each epoch from
/// `options.seed`, so runs are bit-reproducible. The mean loss of every
/// epoch is appended to the model's loss curve.
ToyModel train_toy(ToyModel model, const TrainingSet& data, const TrainOptions& options);

/// Checkpoint: one line of JSON header, '\n', then the parameters as
/// little-endian IEEE-754 doubles (see docs/checkpoint.md).
void save_checkpoint(const std::filesystem::path& path, const ToyModel& model);
ToyModel load_checkpoint(const std::filesystem::path& path);

}  // namespace scriptorium
