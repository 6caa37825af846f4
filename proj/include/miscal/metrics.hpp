#ifndef MISCAL_METRICS_HPP
#define MISCAL_METRICS_HPP

#include <filesystem>
#include <span>
#include <vector>

#include "miscal/synth.hpp"

namespace miscal {

/// Matched pixel pair read from or written to a correspondence CSV.
struct PixelMatch {
  Pixel<double> left;
  Pixel<double> right;
};

/// RMS vertical offset between matches; in rectified images the epipolar
/// line of a left point is its row. Throws EmptyMatches.
[[nodiscard]] double epipolar_error(std::span<const PixelMatch> matches);
[[nodiscard]] double epipolar_error(std::span<const Correspondence> matches);

struct SpearmanResult {
  double rho = 0.0;
  double p = 1.0;
};

inline constexpr int kSpearmanPermutations = 10000;

/// Ranks starting at 1; ties receive their average rank.
[[nodiscard]] std::vector<double> average_ranks(std::span<const double> values);

/// Spearman rank correlation with a two-sided permutation p-value
/// p = (1 + #{|rho_perm| >= |rho|}) / (permutations + 1), fixed internal seed.
/// Throws LengthMismatch, or DegenerateInput for n < 3 or a constant input.
[[nodiscard]] SpearmanResult spearman(std::span<const double> x, std::span<const double> y,
                                      int permutations = kSpearmanPermutations);

/// Reads a CSV with header xl,yl,xr,yr (columns in any order).
[[nodiscard]] std::vector<PixelMatch> read_matches_csv(const std::filesystem::path& path);

}  // namespace miscal

#endif  // MISCAL_METRICS_HPP
