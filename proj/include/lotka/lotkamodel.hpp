#pragma once

// Discrete power law p(k) = k^-alpha / zeta(alpha, xmin), k >= xmin.
//
// With alpha = 2 and xmin = 1 this is the inverse-square law of scientific
// productivity: p(1) = 6/pi^2 ~ 0.6079.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lotka/errors.hpp"
#include "lotka/freqdata.hpp"

namespace lotka {

/// Hurwitz zeta: sum over k >= xmin of k^-alpha.
///
/// Sums the leading terms directly until the running level reaches 20, then
/// closes the tail with Euler-Maclaurin through the B_18 correction. For
/// alpha in (1, 10] the truncation error is below 1e-14 relative.
inline double zeta(double alpha, Level xmin) {
  if (!(alpha > 1.0)) throw InputError("zeta diverges for alpha <= 1");
  if (xmin < 1) throw InputError("zeta needs xmin >= 1");
  constexpr Level kDirectUntil = 20;
  // B_2j / (2j)!
  constexpr std::array<double, 9> kBernoulliOverFactorial = {
      1.0 / 6.0 / 2.0,
      -1.0 / 30.0 / 24.0,
      1.0 / 42.0 / 720.0,
      -1.0 / 30.0 / 40320.0,
      5.0 / 66.0 / 3628800.0,
      -691.0 / 2730.0 / 479001600.0,
      7.0 / 6.0 / 87178291200.0,
      -3617.0 / 510.0 / 20922789888000.0,
      43867.0 / 798.0 / 6402373705728000.0,
  };

  double direct = 0.0;
  Level k = xmin;
  for (; k < kDirectUntil; ++k) direct += std::pow(static_cast<double>(k), -alpha);

  const double a = static_cast<double>(k);
  const double a_pow = std::pow(a, -alpha);
  double tail = a * a_pow / (alpha - 1.0) + 0.5 * a_pow;
  // j-th term: B_2j/(2j)! * alpha(alpha+1)...(alpha+2j-2) * a^(-alpha-2j+1)
  double rising = alpha;
  double a_term = a_pow / a;
  for (std::size_t j = 0; j < kBernoulliOverFactorial.size(); ++j) {
    tail += kBernoulliOverFactorial[j] * rising * a_term;
    const double m = alpha + 2.0 * static_cast<double>(j);
    rising *= (m + 1.0) * (m + 2.0);
    a_term /= a * a;
  }
  return direct + tail;
}

class PowerLawModel {
 public:
  PowerLawModel(double alpha, Level xmin = 1) : alpha_(alpha), xmin_(xmin) {
    if (!(alpha > 1.0))
      throw InputError("power-law exponent must exceed 1 (got " +
                       std::to_string(alpha) + ")");
    if (xmin < 1) throw InputError("xmin must be >= 1");
    norm_ = zeta(alpha_, xmin_);
  }

  double alpha() const { return alpha_; }
  Level xmin() const { return xmin_; }
  /// zeta(alpha, xmin); the constant of x^alpha * y = const is its reciprocal.
  double normalizer() const { return norm_; }

 private:
  double alpha_;
  Level xmin_;
  double norm_;
};

inline void require_in_support(Level level, const PowerLawModel& m) {
  if (level < m.xmin())
    throw InputError("level " + std::to_string(level) + " below xmin " +
                     std::to_string(m.xmin()));
}

inline double predicted_fraction(Level level, const PowerLawModel& m) {
  require_in_support(level, m);
  return std::pow(static_cast<double>(level), -m.alpha()) / m.normalizer();
}

/// P(X >= level).
inline double ccdf(Level level, const PowerLawModel& m) {
  require_in_support(level, m);
  if (level == m.xmin()) return 1.0;
  return zeta(m.alpha(), level) / m.normalizer();
}

struct ExpectedCount {
  Level level = 1;
  double authors = 0.0;
};

/// total_authors * p(k) for k = xmin..max_level, unrounded.
inline std::vector<ExpectedCount> expected_counts(Count total_authors,
                                                  const PowerLawModel& m,
                                                  Level max_level) {
  if (total_authors < 1) throw InputError("total_authors must be >= 1");
  if (max_level < m.xmin()) throw InputError("max_level below xmin");
  std::vector<ExpectedCount> out;
  out.reserve(static_cast<std::size_t>(max_level - m.xmin() + 1));
  for (Level k = m.xmin(); k <= max_level; ++k)
    out.push_back({k, static_cast<double>(total_authors) *
                          predicted_fraction(k, m)});
  return out;
}

/// Rounds expected counts to the nearest integer and drops empty levels.
inline FrequencyDistribution round_to_distribution(
    std::span<const ExpectedCount> counts, std::string name = {}) {
  std::vector<FrequencyEntry> entries;
  for (const auto& c : counts) {
    const auto n = static_cast<Count>(std::llround(c.authors));
    if (n > 0) entries.push_back({c.level, n});
  }
  return FrequencyDistribution(std::move(entries), std::move(name));
}

// ---------------------------------------------------------------------------
// Sampling
//
// Reproducibility contract: the generator is std::mt19937_64 seeded with the
// 64-bit seed, and a uniform variate is (engine() >> 11) * 2^-53, in [0, 1).
// Both are fully specified by the standard, so a fixed seed gives the same
// stream everywhere. Do not swap in std::uniform_real_distribution, whose
// algorithm is implementation-defined.

using Engine = std::mt19937_64;

inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// SplitMix64 finaliser; derives independent stream seeds from
/// (master seed, index) so replicate results do not depend on scheduling.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Inverse-CDF sampler. The CDF is tabulated from xmin until the
/// 1 - 1e-9 quantile or kMaxTable levels, whichever comes first; draws
/// beyond the table are resolved by exponential search and bisection on
/// the exact tail zeta(alpha, k) / zeta(alpha, xmin).
class PowerLawSampler {
 public:
  static constexpr std::size_t kMaxTable = 1u << 14;
  static constexpr double kTableQuantile = 1.0 - 1e-9;

  explicit PowerLawSampler(const PowerLawModel& m) : model_(m) {
    double cum = 0.0;
    for (Level k = m.xmin(); cdf_.size() < kMaxTable; ++k) {
      cum += std::pow(static_cast<double>(k), -m.alpha()) / m.normalizer();
      cdf_.push_back(cum);
      if (cum >= kTableQuantile) break;
    }
  }

  const PowerLawModel& model() const { return model_; }

  template <typename URBG>
  Level operator()(URBG& eng) const {
    return level_for(uniform01(eng));
  }

  /// Smallest level k with CDF(k) > u.
  Level level_for(double u) const {
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it != cdf_.end())
      return model_.xmin() + static_cast<Level>(it - cdf_.begin());
    return extend(u);
  }

 private:
  // P(X >= k)
  double tail(Level k) const {
    return zeta(model_.alpha(), k) / model_.normalizer();
  }

  Level extend(double u) const {
    constexpr Level kLimit = Level{1} << 62;
    const double v = 1.0 - u;
    // Invariant: CDF(lo) <= u, i.e. tail(lo + 1) >= v.
    Level lo = model_.xmin() + static_cast<Level>(cdf_.size()) - 1;
    Level hi = lo + 1;
    while (tail(hi + 1) >= v) {
      if (hi >= kLimit / 2) return kLimit;
      lo = hi;
      hi *= 2;
    }
    while (hi - lo > 1) {
      const Level mid = lo + (hi - lo) / 2;
      if (tail(mid + 1) < v)
        hi = mid;
      else
        lo = mid;
    }
    return hi;
  }

  PowerLawModel model_;
  std::vector<double> cdf_;
};

/// `count` independent draws tallied into a frequency distribution.
inline FrequencyDistribution sample(const PowerLawModel& m, Count count,
                                    std::uint64_t seed) {
  if (count < 1) throw InputError("sample count must be >= 1");
  const PowerLawSampler draw(m);
  Engine eng(seed);
  std::map<Level, Count> tally;
  for (Count i = 0; i < count; ++i) ++tally[draw(eng)];
  return from_tally(tally, "simulated");
}

}  // namespace lotka
