#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "scriptorium/ctc.hpp"
#include "scriptorium/raster.hpp"
#include "scriptorium/segmentation.hpp"

// Deliberately naive reference implementations. They share no code with the
// library so agreement means something.
namespace scriptorium::testing {

/// Components by BFS flood fill.
int count_components(const BinaryImage& img, int connectivity);

/// Background components (4-connected) that do not reach the image border.
int count_holes(const BinaryImage& img);

/// Random ink with probability `density`, then `smooth_passes` rounds of a
/// 3x3 majority filter so shapes get thick strokes and real holes.
BinaryImage random_image(std::mt19937_64& rng, int width, int height, double density, int smooth_passes);

/// `count` blobs drawn from random images of varied size and texture,
/// including single pixels, thin diagonals and blobs with holes.
std::vector<Blob> random_blobs(std::uint64_t seed, int count);

/// Blob pixels painted into an image of the given size.
BinaryImage blob_mask(const Blob& blob, int width, int height);

/// -log sum over all (A+1)^T paths that collapse to `labels`.
double brute_force_ctc(const LogProbMatrix& log_probs, std::span<const int> labels);

/// Plain recursive Levenshtein with memo table keyed by suffix positions.
std::size_t naive_edit_distance(std::span<const int> a, std::span<const int> b);

/// Random normalized log-probability rows.
LogProbMatrix random_log_probs(std::mt19937_64& rng, int frames, int classes, double spread = 3.0);

}  // namespace scriptorium::testing
