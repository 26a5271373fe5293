#pragma once

// Discrete maximum-likelihood power-law fitting with KS-based xmin selection
// and a semi-parametric bootstrap goodness-of-fit test, plus the side-by-side
// comparison with the historical log-log estimator.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "lotka/errors.hpp"
#include "lotka/freqdata.hpp"
#include "lotka/loglogfit.hpp"
#include "lotka/lotkamodel.hpp"

namespace lotka {

inline constexpr double kAlphaLower = 1.01;
inline constexpr double kAlphaUpper = 10.0;
inline constexpr double kAlphaTolerance = 1e-6;

struct MleResult {
  double alpha_hat = 0.0;
  Level xmin = 1;
  double ks = 0.0;
  Count n_tail = 0;
  double log_likelihood = 0.0;
};

/// Maximises a unimodal f on the interval between a and b (either order)
/// until the bracket is narrower than tol; returns the bracket midpoint.
template <typename F>
double golden_section_maximize(F&& f, double a, double b, double tol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (std::abs(b - a) > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

namespace detail {

// Populated levels >= xmin, i.e. a suffix of dist.populated().
struct Tail {
  std::span<const FrequencyEntry> entries;
  Count n = 0;
  double sum_log_level = 0.0;  // sum of authors * ln(level)
};

inline Tail make_tail(std::span<const FrequencyEntry> populated, Level xmin) {
  const auto first = std::lower_bound(
      populated.begin(), populated.end(), xmin,
      [](const FrequencyEntry& e, Level l) { return e.level < l; });
  Tail t;
  t.entries = populated.subspan(static_cast<std::size_t>(first - populated.begin()));
  for (const auto& e : t.entries) {
    t.n += e.authors;
    t.sum_log_level +=
        static_cast<double>(e.authors) * std::log(static_cast<double>(e.level));
  }
  return t;
}

inline double tail_log_likelihood(const Tail& t, double alpha, Level xmin) {
  return -alpha * t.sum_log_level -
         static_cast<double>(t.n) * std::log(zeta(alpha, xmin));
}

// KS distance between the empirical tail and the model, both conditioned on
// level >= xmin, evaluated at the observed levels. zeta(alpha, k + 1) is
// accumulated from the top level down, summing short gaps term by term.
inline double tail_ks(const Tail& t, double alpha, Level xmin) {
  constexpr Level kMaxGapSum = 64;
  const auto& e = t.entries;
  if (e.empty()) throw InputError("no authors at levels >= xmin");
  const double norm = zeta(alpha, xmin);
  std::vector<double> above(e.size());  // zeta(alpha, level + 1)
  above.back() = zeta(alpha, e.back().level + 1);
  for (std::size_t i = e.size() - 1; i-- > 0;) {
    const Level from = e[i].level + 1;
    const Level to = e[i + 1].level;  // adds levels from..to
    if (to - from + 1 > kMaxGapSum) {
      above[i] = zeta(alpha, from);
      continue;
    }
    double s = above[i + 1];
    for (Level j = to; j >= from; --j)
      s += std::pow(static_cast<double>(j), -alpha);
    above[i] = s;
  }
  double worst = 0.0;
  Count cum = 0;
  const auto n = static_cast<double>(t.n);
  for (std::size_t i = 0; i < e.size(); ++i) {
    cum += e[i].authors;
    const double empirical = static_cast<double>(cum) / n;
    const double model = 1.0 - above[i] / norm;
    worst = std::max(worst, std::abs(empirical - model));
  }
  return std::min(worst, 1.0);
}

inline MleResult fit_tail(const Tail& t, Level xmin) {
  std::size_t distinct = t.entries.size();
  if (distinct < 2)
    throw FitError("degenerate tail: fewer than 2 distinct populated levels >= " +
                   std::to_string(xmin));
  const auto ll = [&](double a) { return tail_log_likelihood(t, a, xmin); };
  const double alpha =
      golden_section_maximize(ll, kAlphaLower, kAlphaUpper, kAlphaTolerance);
  constexpr double kEdge = 1e-4;
  if (alpha - kAlphaLower < kEdge || kAlphaUpper - alpha < kEdge)
    throw FitError("degenerate tail: likelihood maximised at the search "
                   "bracket edge (alpha ~ " + std::to_string(alpha) + ")");
  MleResult r;
  r.alpha_hat = alpha;
  r.xmin = xmin;
  r.n_tail = t.n;
  r.log_likelihood = ll(alpha);
  r.ks = tail_ks(t, alpha, xmin);
  return r;
}

}  // namespace detail

inline double log_likelihood(const FrequencyDistribution& dist,
                             const PowerLawModel& model) {
  const auto pop = dist.populated();
  const auto t = detail::make_tail(pop, model.xmin());
  if (t.n == 0) throw InputError("no authors at levels >= xmin");
  return detail::tail_log_likelihood(t, model.alpha(), model.xmin());
}

inline double ks_distance(const FrequencyDistribution& dist,
                          const PowerLawModel& model) {
  const auto pop = dist.populated();
  const auto t = detail::make_tail(pop, model.xmin());
  return detail::tail_ks(t, model.alpha(), model.xmin());
}

/// Exponent maximising the discrete likelihood over [1.01, 10] at fixed xmin.
inline MleResult mle_alpha(const FrequencyDistribution& dist, Level xmin) {
  if (xmin < 1) throw InputError("xmin must be >= 1");
  const auto pop = dist.populated();
  return detail::fit_tail(detail::make_tail(pop, xmin), xmin);
}

/// Tries every observed level except the top two as xmin and keeps the fit
/// with the smallest KS distance (ties go to the smaller xmin).
inline MleResult select_xmin(const FrequencyDistribution& dist) {
  const auto pop = dist.populated();
  if (pop.size() < 3)
    throw FitError("xmin selection needs at least 3 distinct populated levels");
  std::optional<MleResult> best;
  std::string last_error;
  for (std::size_t i = 0; i + 2 < pop.size(); ++i) {
    const Level xmin = pop[i].level;
    try {
      auto r = detail::fit_tail(detail::make_tail(pop, xmin), xmin);
      if (!best || r.ks < best->ks) best = r;
    } catch (const FitError& e) {
      last_error = e.what();
    }
  }
  if (!best) throw FitError("no candidate xmin produced a fit: " + last_error);
  return *best;
}

// ---------------------------------------------------------------------------
// Bootstrap

struct BootstrapOptions {
  // Re-select xmin in every replicate; false keeps xmin fixed at result.xmin.
  bool refit_xmin = true;
  // 0 = hardware concurrency. Results do not depend on this.
  unsigned threads = 0;
};

/// Synthetic dataset for replicate `index`: same author total as `dist`;
/// each author is drawn from the fitted tail with probability n_tail/n and
/// otherwise resampled from the empirical levels below xmin.
inline FrequencyDistribution bootstrap_dataset(const FrequencyDistribution& dist,
                                               const MleResult& result,
                                               std::uint64_t seed,
                                               std::uint64_t index) {
  const PowerLawSampler tail_draw(PowerLawModel(result.alpha_hat, result.xmin));
  std::vector<Level> body_levels;
  std::vector<Count> body_cum;
  Count n_body = 0;
  for (const auto& e : dist.entries()) {
    if (e.level >= result.xmin || e.authors == 0) continue;
    n_body += e.authors;
    body_levels.push_back(e.level);
    body_cum.push_back(n_body);
  }
  const Count n = dist.total_authors();
  const double p_tail =
      static_cast<double>(n - n_body) / static_cast<double>(n);

  Engine eng(derive_seed(seed, index));
  std::map<Level, Count> tally;
  for (Count i = 0; i < n; ++i) {
    if (n_body == 0 || uniform01(eng) < p_tail) {
      ++tally[tail_draw(eng)];
    } else {
      const auto pick = static_cast<Count>(uniform01(eng) *
                                           static_cast<double>(n_body));
      const auto it = std::upper_bound(body_cum.begin(), body_cum.end(), pick);
      ++tally[body_levels[static_cast<std::size_t>(it - body_cum.begin())]];
    }
  }
  return from_tally(tally, "bootstrap");
}

/// KS distance of the refitted replicate, or nullopt when the synthetic data
/// admits no fit (too few distinct levels).
inline std::optional<double> bootstrap_replicate_ks(
    const FrequencyDistribution& dist, const MleResult& result,
    std::uint64_t seed, std::uint64_t index, bool refit_xmin = true) {
  const auto synthetic = bootstrap_dataset(dist, result, seed, index);
  try {
    return refit_xmin ? select_xmin(synthetic).ks
                      : mle_alpha(synthetic, result.xmin).ks;
  } catch (const FitError&) {
    return std::nullopt;
  }
}

/// Fraction of replicates whose KS distance is at least the observed one.
/// Replicates that cannot be fitted are left out of both counts.
inline double gof_bootstrap(const FrequencyDistribution& dist,
                            const MleResult& result, int n_boot,
                            std::uint64_t seed, BootstrapOptions opts = {}) {
  if (n_boot < 100) throw InputError("bootstrap needs at least 100 replicates");
  std::vector<std::optional<double>> ks(static_cast<std::size_t>(n_boot));
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < ks.size();)
      ks[i] = bootstrap_replicate_ks(dist, result, seed, i, opts.refit_xmin);
  };
  unsigned n_threads =
      opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(n_boot));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
  }
  int valid = 0, exceed = 0;
  for (const auto& k : ks) {
    if (!k) continue;
    ++valid;
    if (*k >= result.ks) ++exceed;
  }
  if (valid == 0) throw FitError("no bootstrap replicate could be fitted");
  return static_cast<double>(exceed) / static_cast<double>(valid);
}

// ---------------------------------------------------------------------------
// Historical vs modern

struct ComparisonReport {
  std::optional<FitResult> historical;
  std::optional<MleResult> modern;
  Level cutoff_used = 1;
  std::optional<double> divergence;  // |historical.exponent - modern.alpha_hat|
  std::optional<TruncationReport> truncation;
  std::vector<std::string> notes;
};

inline ComparisonReport compare_methods(const FrequencyDistribution& dist,
                                        Level cutoff) {
  ComparisonReport rep;
  rep.cutoff_used = cutoff;
  try {
    rep.historical = fit_historical(dist, cutoff, Denominator::full());
  } catch (const std::exception& e) {
    rep.notes.push_back(std::string("historical log-log fit failed: ") + e.what());
  }
  try {
    rep.modern = select_xmin(dist);
  } catch (const std::exception& e) {
    rep.notes.push_back(std::string("maximum-likelihood fit failed: ") + e.what());
  }
  if (cutoff >= 1 && cutoff <= dist.max_level()) {
    rep.truncation = truncation_report(dist, cutoff);
    const auto& t = *rep.truncation;
    rep.notes.push_back(
        "truncation at " + std::to_string(cutoff) + " removes " +
        std::to_string(t.removed_level_range) + " levels (" +
        format_percent(t.pct_range) + " of the range) and " +
        std::to_string(t.removed_works) + " works (" +
        format_percent(t.pct_works) + "); " +
        std::to_string(t.removed_authors_physical) +
        " authors lie above the cutoff but stay in the denominator");
  } else {
    rep.notes.push_back("cutoff " + std::to_string(cutoff) +
                        " is at or beyond the maximum level " +
                        std::to_string(dist.max_level()) +
                        "; nothing truncated");
  }
  if (rep.historical && rep.modern)
    rep.divergence = std::abs(rep.historical->exponent - rep.modern->alpha_hat);
  return rep;
}

struct BiasRow {
  std::optional<Level> cutoff;  // nullopt: no truncation
  int n_hist = 0;
  double mean_hist_err = 0.0;
  double sd_hist_err = 0.0;
  int n_mle = 0;
  double mean_mle_err = 0.0;
  double sd_mle_err = 0.0;
};

struct BiasTable {
  double alpha = 2.0;
  Count authors = 0;
  int replicates = 0;
  std::uint64_t seed = 0;
  std::vector<BiasRow> rows;
};

namespace detail {

inline std::pair<double, double> mean_sd(std::span<const double> v) {
  if (v.empty()) return {std::nan(""), std::nan("")};
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) /
                      static_cast<double>(v.size());
  if (v.size() < 2) return {mean, std::nan("")};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

}  // namespace detail

/// Samples `replicates` populations from the law with exponent alpha (xmin 1).
/// For each cutoff the historical estimator runs on the right-truncated
/// sample with the full author denominator; the maximum-likelihood estimator
/// (with xmin selection) runs on the untruncated sample, since right
/// truncation is not part of that method. Errors are estimate - alpha.
inline BiasTable bias_experiment(double alpha, Count authors,
                                 const std::vector<std::optional<Level>>& cutoffs,
                                 int replicates, std::uint64_t seed) {
  if (replicates < 10) throw InputError("bias experiment needs >= 10 replicates");
  if (cutoffs.empty()) throw InputError("no cutoffs given");
  const PowerLawModel model(alpha, 1);

  std::vector<std::vector<double>> hist_err(cutoffs.size());
  std::vector<double> mle_err;
  for (int r = 0; r < replicates; ++r) {
    const auto data =
        sample(model, authors, derive_seed(seed, static_cast<std::uint64_t>(r)));
    try {
      mle_err.push_back(select_xmin(data).alpha_hat - alpha);
    } catch (const FitError&) {
    }
    for (std::size_t c = 0; c < cutoffs.size(); ++c) {
      try {
        hist_err[c].push_back(
            fit_historical(data, cutoffs[c], Denominator::full()).exponent - alpha);
      } catch (const std::exception&) {
        // too few populated levels at or below this cutoff in this replicate
      }
    }
  }

  BiasTable table{alpha, authors, replicates, seed, {}};
  const auto [mle_mean, mle_sd] = detail::mean_sd(mle_err);
  for (std::size_t c = 0; c < cutoffs.size(); ++c) {
    if (hist_err[c].empty())
      throw FitError("cutoff " +
                     (cutoffs[c] ? std::to_string(*cutoffs[c]) : "max") +
                     " gives fewer than 3 regression points in every replicate");
    const auto [mean, sd] = detail::mean_sd(hist_err[c]);
    table.rows.push_back({cutoffs[c], static_cast<int>(hist_err[c].size()), mean,
                          sd, static_cast<int>(mle_err.size()), mle_mean, mle_sd});
  }
  return table;
}

}  // namespace lotka
