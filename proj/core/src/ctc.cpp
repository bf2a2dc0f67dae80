#include "scriptorium/ctc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "scriptorium/error.hpp"

namespace scriptorium {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

double stable_logsumexp(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "logsumexp of an empty list");
  const double hi = *std::max_element(values.begin(), values.end());
  if (hi == kNegInf || std::isinf(hi)) return hi;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - hi);
  return hi + std::log(sum);
}

LogProbMatrix log_softmax(const LogProbMatrix& logits) {
  LogProbMatrix out(logits.frames(), logits.classes());
  for (std::size_t t = 0; t < logits.frames(); ++t) {
    const double norm = stable_logsumexp(logits.row(t));
    for (std::size_t k = 0; k < logits.classes(); ++k) out(t, k) = logits(t, k) - norm;
  }
  return out;
}

std::size_t min_frames(std::span<const int> labels) {
  std::size_t n = labels.size();
  for (std::size_t i = 1; i < labels.size(); ++i) {
    if (labels[i] == labels[i - 1]) ++n;
  }
  return n;
}

namespace {

// Blank-augmented label: blank, l1, blank, l2, ..., lL, blank.
std::vector<int> extend(std::span<const int> labels) {
  std::vector<int> ext(2 * labels.size() + 1, kBlank);
  for (std::size_t i = 0; i < labels.size(); ++i) ext[2 * i + 1] = labels[i];
  return ext;
}

void check_inputs(const LogProbMatrix& p, std::span<const int> labels) {
  if (p.frames() == 0) throw Error(ErrorKind::EmptyInput, "ctc: no frames");
  for (int id : labels) {
    if (id <= kBlank || static_cast<std::size_t>(id) >= p.classes()) {
      throw Error(ErrorKind::InvalidArgument, "ctc: label id " + std::to_string(id) +
                                                  " outside 1.." + std::to_string(p.classes() - 1));
    }
  }
  const std::size_t need = min_frames(labels);
  if (p.frames() < need) {
    throw Error(ErrorKind::InfeasibleLabel,
                "ctc: label needs at least " + std::to_string(need) + " frames, got " +
                    std::to_string(p.frames()));
  }
}

// Whether state s may be entered directly from s - 2 (skipping a blank).
bool can_skip(const std::vector<int>& ext, std::size_t s) {
  return s >= 2 && ext[s] != kBlank && ext[s] != ext[s - 2];
}

}  // namespace

double ctc_loss(const LogProbMatrix& p, std::span<const int> labels) {
  check_inputs(p, labels);
  const auto ext = extend(labels);
  const std::size_t states = ext.size();
  const std::size_t frames = p.frames();

  std::vector<double> prev(states, kNegInf);
  std::vector<double> cur(states, kNegInf);
  prev[0] = p(0, kBlank);
  if (states > 1) prev[1] = p(0, static_cast<std::size_t>(ext[1]));

  for (std::size_t t = 1; t < frames; ++t) {
    // States that can still reach the end, and that the start can reach.
    const std::size_t remaining = frames - t;
    const std::size_t lo = states > 2 * remaining ? states - 2 * remaining : 0;
    const std::size_t hi = std::min(states - 1, 2 * t + 1);
    std::fill(cur.begin(), cur.end(), kNegInf);
    for (std::size_t s = lo; s <= hi; ++s) {
      double acc = prev[s];
      if (s >= 1) acc = log_add(acc, prev[s - 1]);
      if (can_skip(ext, s)) acc = log_add(acc, prev[s - 2]);
      if (acc != kNegInf) acc += p(t, static_cast<std::size_t>(ext[s]));
      cur[s] = acc;
    }
    std::swap(prev, cur);
  }

  double total = prev[states - 1];
  if (states > 1) total = log_add(total, prev[states - 2]);
  return -total;
}

CtcResult ctc_loss_and_grad(const LogProbMatrix& p, std::span<const int> labels) {
  check_inputs(p, labels);
  const auto ext = extend(labels);
  const std::size_t states = ext.size();
  const std::size_t frames = p.frames();
  auto emit = [&](std::size_t t, std::size_t s) { return p(t, static_cast<std::size_t>(ext[s])); };

  // alpha includes the emission at t; beta covers frames t+1.. only.
  std::vector<double> alpha(frames * states, kNegInf);
  std::vector<double> beta(frames * states, kNegInf);
  auto a = [&](std::size_t t, std::size_t s) -> double& { return alpha[t * states + s]; };
  auto b = [&](std::size_t t, std::size_t s) -> double& { return beta[t * states + s]; };

  a(0, 0) = emit(0, 0);
  if (states > 1) a(0, 1) = emit(0, 1);
  for (std::size_t t = 1; t < frames; ++t) {
    for (std::size_t s = 0; s < states; ++s) {
      double acc = a(t - 1, s);
      if (s >= 1) acc = log_add(acc, a(t - 1, s - 1));
      if (can_skip(ext, s)) acc = log_add(acc, a(t - 1, s - 2));
      a(t, s) = acc == kNegInf ? kNegInf : acc + emit(t, s);
    }
  }

  b(frames - 1, states - 1) = 0.0;
  if (states > 1) b(frames - 1, states - 2) = 0.0;
  for (std::size_t t = frames - 1; t-- > 0;) {
    for (std::size_t s = 0; s < states; ++s) {
      double acc = b(t + 1, s) + emit(t + 1, s);
      if (s + 1 < states) acc = log_add(acc, b(t + 1, s + 1) + emit(t + 1, s + 1));
      if (s + 2 < states && can_skip(ext, s + 2)) {
        acc = log_add(acc, b(t + 1, s + 2) + emit(t + 1, s + 2));
      }
      b(t, s) = acc;
    }
  }

  double log_total = a(frames - 1, states - 1);
  if (states > 1) log_total = log_add(log_total, a(frames - 1, states - 2));

  CtcResult out;
  out.loss = -log_total;
  out.grad = LogProbMatrix(frames, p.classes());
  std::vector<double> occupancy(p.classes());
  for (std::size_t t = 0; t < frames; ++t) {
    std::fill(occupancy.begin(), occupancy.end(), kNegInf);
    for (std::size_t s = 0; s < states; ++s) {
      const std::size_t k = static_cast<std::size_t>(ext[s]);
      occupancy[k] = log_add(occupancy[k], a(t, s) + b(t, s));
    }
    for (std::size_t k = 0; k < p.classes(); ++k) {
      const double posterior = occupancy[k] == kNegInf ? 0.0 : std::exp(occupancy[k] - log_total);
      out.grad(t, k) = std::exp(p(t, k)) - posterior;
    }
  }
  return out;
}

LabelSequence collapse(std::span<const int> path) {
  LabelSequence out;
  int previous = -1;
  for (int id : path) {
    if (id != previous && id != kBlank) out.push_back(id);
    previous = id;
  }
  return out;
}

LabelSequence decode_best_path(const LogProbMatrix& p) {
  std::vector<int> path(p.frames());
  for (std::size_t t = 0; t < p.frames(); ++t) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < p.classes(); ++k) {
      if (p(t, k) > p(t, best)) best = k;
    }
    path[t] = static_cast<int>(best);
  }
  return collapse(path);
}

}  // namespace scriptorium
