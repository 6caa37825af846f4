#include "miscal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "miscal/csv.hpp"
#include "miscal/rng.hpp"

namespace miscal {

namespace {

constexpr std::uint64_t kPermutationSeed = 0x5EA4A11ULL;

template <typename Match>
double rms_row_offset(std::span<const Match> matches) {
  if (matches.empty()) throw Error(ErrorCode::EmptyMatches, "no matches to evaluate");
  double sum = 0.0;
  for (const Match& m : matches) {
    const double dy = m.left.y() - m.right.y();
    sum += dy * dy;
  }
  return std::sqrt(sum / static_cast<double>(matches.size()));
}

// Centered copy scaled to unit norm, so correlation is a dot product.
std::vector<double> standardize(std::vector<double> v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double& e : v) {
    e -= mean;
    ss += e * e;
  }
  if (!(ss > 0.0)) throw Error(ErrorCode::DegenerateInput, "constant input has undefined rank correlation");
  const double inv = 1.0 / std::sqrt(ss);
  for (double& e : v) e *= inv;
  return v;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

double epipolar_error(std::span<const PixelMatch> matches) { return rms_row_offset(matches); }

double epipolar_error(std::span<const Correspondence> matches) { return rms_row_offset(matches); }

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

SpearmanResult spearman(std::span<const double> x, std::span<const double> y, int permutations) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch, "spearman inputs differ in length");
  }
  if (x.size() < 3) throw Error(ErrorCode::DegenerateInput, "spearman needs at least 3 pairs");
  const std::vector<double> rx = standardize(average_ranks(x));
  std::vector<double> ry = standardize(average_ranks(y));

  SpearmanResult out;
  out.rho = std::clamp(dot(rx, ry), -1.0, 1.0);

  // Relative slack so permutations tied with the observed statistic count.
  const double threshold = std::abs(out.rho) * (1.0 - 1e-12);
  CounterRng rng(kPermutationSeed);
  int extreme = 0;
  for (int k = 0; k < permutations; ++k) {
    for (std::size_t i = ry.size() - 1; i > 0; --i) {
      std::swap(ry[i], ry[rng.below(i + 1)]);
    }
    if (std::abs(dot(rx, ry)) >= threshold) ++extreme;
  }
  out.p = (1.0 + extreme) / (1.0 + permutations);
  return out;
}

std::vector<PixelMatch> read_matches_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  const std::size_t xl = table.column("xl"), yl = table.column("yl"), xr = table.column("xr"),
                    yr = table.column("yr");
  std::vector<PixelMatch> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out.push_back({{table.number(r, xl), table.number(r, yl)},
                   {table.number(r, xr), table.number(r, yr)}});
  }
  return out;
}

}  // namespace miscal
