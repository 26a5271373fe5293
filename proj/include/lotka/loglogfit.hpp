#pragma once

// Historical estimator: percent-of-authors normalisation, log10 on both axes,
// unweighted ordinary least squares.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lotka/errors.hpp"
#include "lotka/freqdata.hpp"

namespace lotka {

struct PercentPoint {
  Level level = 1;
  double percent = 0.0;
};

struct PercentSeries {
  std::vector<PercentPoint> points;
  Count denominator = 1;
};

/// Which author total the percentages are taken against.
class Denominator {
 public:
  enum class Kind { full, truncated, explicit_count };

  /// Author total of the distribution before any right truncation.
  static Denominator full() { return Denominator(Kind::full, 0); }
  /// Author total of whatever levels survive truncation.
  static Denominator truncated() { return Denominator(Kind::truncated, 0); }
  static Denominator of(Count n) {
    if (n <= 0) throw InputError("denominator must be positive");
    return Denominator(Kind::explicit_count, n);
  }

  Kind kind() const { return kind_; }
  Count count() const { return count_; }

 private:
  Denominator(Kind k, Count n) : kind_(k), count_(n) {}
  Kind kind_;
  Count count_;
};

inline PercentSeries to_percent_series(const FrequencyDistribution& dist,
                                       Count denominator) {
  if (denominator <= 0) throw InputError("denominator must be positive");
  PercentSeries s{{}, denominator};
  for (const auto& e : dist.entries()) {
    if (e.authors == 0) continue;
    s.points.push_back({e.level, 100.0 * static_cast<double>(e.authors) /
                                     static_cast<double>(denominator)});
  }
  return s;
}

/// Full and truncated both resolve to `dist`'s own author total here; the
/// distinction matters in fit_historical, which sees the untruncated data.
inline PercentSeries to_percent_series(const FrequencyDistribution& dist,
                                       Denominator denominator) {
  const Count n = denominator.kind() == Denominator::Kind::explicit_count
                      ? denominator.count()
                      : dist.total_authors();
  return to_percent_series(dist, n);
}

// ---------------------------------------------------------------------------
// Simple linear regression

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rss = 0.0;  // residual sum of squares
  double tss = 0.0;  // total sum of squares about the mean of y
  double r_squared = 0.0;
  double f_stat = 0.0;
  std::int64_t dof = 0;
  std::int64_t n_points = 0;
};

inline double residual_sum_of_squares(std::span<const double> x,
                                      std::span<const double> y, double slope,
                                      double intercept) {
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    rss += r * r;
  }
  return rss;
}

/// Ordinary least squares y = intercept + slope*x, with R^2 = 1 - RSS/TSS
/// and F = dof*R^2/(1-R^2), dof = n - 2. F is +inf for a perfect fit.
inline LinearFit ols_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("x and y differ in length");
  const auto n = x.size();
  if (n < 3) throw FitError("need at least 3 points for a fit with dof >= 1");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, tss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    tss += dy * dy;
  }
  if (sxx == 0.0) throw FitError("zero variance in x: all levels identical");
  if (tss == 0.0)
    throw FitError("zero variance in y: degenerate fit, F undefined");

  LinearFit f;
  f.n_points = static_cast<std::int64_t>(n);
  f.dof = f.n_points - 2;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.tss = tss;
  f.rss = residual_sum_of_squares(x, y, f.slope, f.intercept);
  f.r_squared = 1.0 - f.rss / tss;
  if (f.r_squared < 0.0) f.r_squared = 0.0;
  f.f_stat = f.r_squared < 1.0
                 ? static_cast<double>(f.dof) * f.r_squared / (1.0 - f.r_squared)
                 : std::numeric_limits<double>::infinity();
  return f;
}

// ---------------------------------------------------------------------------

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;  // log10 percent at level 1 on the fitted line
  double exponent = 0.0;   // |slope|
  double r_squared = 0.0;
  double f_stat = 0.0;
  std::int64_t dof = 0;
  std::int64_t n_points = 0;
  Count denominator = 0;
  std::optional<Level> cutoff;
};

inline FitResult ols_loglog(const PercentSeries& series) {
  std::vector<double> x, y;
  x.reserve(series.points.size());
  y.reserve(series.points.size());
  for (const auto& p : series.points) {
    if (p.level < 1 || !(p.percent > 0.0))
      throw InputError("log-log fit needs positive levels and percents");
    x.push_back(std::log10(static_cast<double>(p.level)));
    y.push_back(std::log10(p.percent));
  }
  const auto lf = ols_fit(x, y);
  FitResult r;
  r.slope = lf.slope;
  r.intercept = lf.intercept;
  r.exponent = std::abs(lf.slope);
  r.r_squared = lf.r_squared;
  r.f_stat = lf.f_stat;
  r.dof = lf.dof;
  r.n_points = lf.n_points;
  r.denominator = series.denominator;
  return r;
}

/// truncate -> percent -> OLS. With no cutoff the whole distribution is fitted.
inline FitResult fit_historical(const FrequencyDistribution& dist,
                                std::optional<Level> cutoff,
                                Denominator denominator = Denominator::full()) {
  const auto kept = cutoff ? truncate_right(dist, *cutoff) : dist;
  Count n = 0;
  switch (denominator.kind()) {
    case Denominator::Kind::full: n = dist.total_authors(); break;
    case Denominator::Kind::truncated: n = kept.total_authors(); break;
    case Denominator::Kind::explicit_count: n = denominator.count(); break;
  }
  auto r = ols_loglog(to_percent_series(kept, n));
  r.cutoff = cutoff;
  return r;
}

}  // namespace lotka
