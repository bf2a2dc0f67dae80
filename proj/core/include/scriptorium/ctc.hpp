#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace scriptorium {

/// Class 0 is the CTC blank; symbols are 1..A.
inline constexpr int kBlank = 0;

struct Alphabet {
  int size = 0;  // A, not counting the blank

  int classes() const { return size + 1; }
  bool contains(int id) const { return id >= 1 && id <= size; }
};

using LabelSequence = std::vector<int>;

/// T x (A+1) matrix of per-frame log-probabilities, row-major.
class LogProbMatrix {
 public:
  LogProbMatrix() = default;
  LogProbMatrix(std::size_t frames, std::size_t classes, double fill = 0.0)
      : frames_(frames), classes_(classes), values_(frames * classes, fill) {}

  std::size_t frames() const { return frames_; }
  std::size_t classes() const { return classes_; }

  double& operator()(std::size_t t, std::size_t k) { return values_[t * classes_ + k]; }
  double operator()(std::size_t t, std::size_t k) const { return values_[t * classes_ + k]; }

  std::span<double> row(std::size_t t) { return {values_.data() + t * classes_, classes_}; }
  std::span<const double> row(std::size_t t) const {
    return {values_.data() + t * classes_, classes_};
  }
  std::span<const double> values() const { return values_; }

 private:
  std::size_t frames_ = 0;
  std::size_t classes_ = 0;
  std::vector<double> values_;
};

/// log(sum(exp(values))) shifted by the maximum. Returns -inf only when every
/// input is -inf. Throws Error{EmptyInput} for an empty list.
double stable_logsumexp(std::span<const double> values);

/// log(exp(a) + exp(b)) without leaving the log domain.
double log_add(double a, double b);

/// Row-wise log-softmax of raw logits.
LogProbMatrix log_softmax(const LogProbMatrix& logits);

/// Minimum frame count for a label: its length plus one per adjacent repeat.
std::size_t min_frames(std::span<const int> labels);

/// -log of the total probability of all frame paths that collapse to
/// `labels`, by the log-domain forward recursion. Throws
/// Error{InfeasibleLabel} if the label cannot fit in the available frames and
/// Error{InvalidArgument} for ids outside 1..classes-1.
double ctc_loss(const LogProbMatrix& log_probs, std::span<const int> labels);

struct CtcResult {
  double loss = 0.0;
  /// d loss / d logits, assuming log_probs = log_softmax(logits).
  LogProbMatrix grad;
};

/// Forward-backward in the log domain. The gradient for frame t and class k
/// is softmax_k - posterior occupancy of k at t.
CtcResult ctc_loss_and_grad(const LogProbMatrix& log_probs, std::span<const int> labels);

inline LogProbMatrix ctc_grad(const LogProbMatrix& log_probs, std::span<const int> labels) {
  return ctc_loss_and_grad(log_probs, labels).grad;
}

/// Merge runs of equal ids, then drop blanks.
LabelSequence collapse(std::span<const int> path);

/// Per-frame argmax (ties to the lowest id), then collapse.
LabelSequence decode_best_path(const LogProbMatrix& log_probs);

}  // namespace scriptorium
