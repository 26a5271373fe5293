#pragma once

// JSON and plain-text renderings of fit results and reports. JSON keeps full
// double precision; text rounds the way the historical tables print
// (percent 2 dp, exponent 3 dp, R^2 2 dp, F 1 dp).

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>

#include <json.hpp>

#include "lotka/freqdata.hpp"
#include "lotka/loglogfit.hpp"
#include "lotka/modernfit.hpp"

namespace lotka {

using Json = nlohmann::ordered_json;

namespace detail {

inline Json number_or_null(double v) {
  return std::isfinite(v) ? Json(v) : Json(nullptr);
}

inline std::string fixed(double v, int decimals) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace detail

inline Json to_json(const FitResult& f) {
  Json j;
  j["slope"] = f.slope;
  j["intercept"] = f.intercept;
  j["exponent"] = f.exponent;
  j["r_squared"] = f.r_squared;
  j["f_stat"] = detail::number_or_null(f.f_stat);
  j["dof"] = f.dof;
  j["n_points"] = f.n_points;
  j["denominator"] = f.denominator;
  j["cutoff"] = f.cutoff ? Json(*f.cutoff) : Json(nullptr);
  return j;
}

inline FitResult fit_result_from_json(const Json& j) {
  try {
    FitResult f;
    f.slope = j.at("slope").get<double>();
    f.intercept = j.at("intercept").get<double>();
    f.exponent = j.at("exponent").get<double>();
    f.r_squared = j.at("r_squared").get<double>();
    const auto& fs = j.at("f_stat");
    f.f_stat = fs.is_null() ? INFINITY : fs.get<double>();
    f.dof = j.at("dof").get<std::int64_t>();
    f.n_points = j.at("n_points").get<std::int64_t>();
    f.denominator = j.at("denominator").get<Count>();
    if (const auto& c = j.at("cutoff"); !c.is_null()) f.cutoff = c.get<Level>();
    return f;
  } catch (const Json::exception& e) {
    throw InputError(std::string("fit JSON: ") + e.what());
  }
}

inline Json to_json(const MleResult& m) {
  Json j;
  j["alpha_hat"] = m.alpha_hat;
  j["xmin"] = m.xmin;
  j["ks"] = m.ks;
  j["n_tail"] = m.n_tail;
  j["log_likelihood"] = m.log_likelihood;
  return j;
}

inline Json to_json(const TruncationReport& r) {
  Json j;
  j["cutoff"] = r.cutoff;
  j["max_level"] = r.max_level;
  j["removed_level_range"] = r.removed_level_range;
  j["removed_works"] = r.removed_works;
  j["removed_authors_from_denominator"] = r.removed_authors_from_denominator;
  j["removed_authors_physical"] = r.removed_authors_physical;
  j["total_works"] = r.total_works;
  j["total_authors"] = r.total_authors;
  j["pct_range"] = r.pct_range;
  j["pct_works"] = r.pct_works;
  j["pct_authors"] = r.pct_authors;
  return j;
}

inline Json to_json(const ComparisonReport& c) {
  Json j;
  j["historical"] = c.historical ? to_json(*c.historical) : Json(nullptr);
  j["modern"] = c.modern ? to_json(*c.modern) : Json(nullptr);
  j["cutoff_used"] = c.cutoff_used;
  j["divergence"] = c.divergence ? Json(*c.divergence) : Json(nullptr);
  j["truncation"] = c.truncation ? to_json(*c.truncation) : Json(nullptr);
  j["notes"] = c.notes;
  return j;
}

inline std::string cutoff_label(const std::optional<Level>& c) {
  return c ? std::to_string(*c) : "max";
}

inline Json to_json(const BiasTable& t) {
  Json j;
  j["alpha"] = t.alpha;
  j["authors"] = t.authors;
  j["replicates"] = t.replicates;
  j["seed"] = t.seed;
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    Json row;
    row["cutoff"] = r.cutoff ? Json(*r.cutoff) : Json("max");
    row["n_hist"] = r.n_hist;
    row["mean_hist_err"] = detail::number_or_null(r.mean_hist_err);
    row["sd_hist_err"] = detail::number_or_null(r.sd_hist_err);
    row["n_mle"] = r.n_mle;
    row["mean_mle_err"] = detail::number_or_null(r.mean_mle_err);
    row["sd_mle_err"] = detail::number_or_null(r.sd_mle_err);
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

// ---------------------------------------------------------------------------
// Text

/// Author, range and works columns with their percentages, two spaces apart.
inline std::string format_truncation(const TruncationReport& r,
                                     const std::string& name = {}) {
  std::string s;
  s += "right truncation";
  if (!name.empty()) s += " of " + name;
  s += " at level " + std::to_string(r.cutoff) + " (max level " +
       std::to_string(r.max_level) + ", " + std::to_string(r.total_authors) +
       " authors, " + std::to_string(r.total_works) + " works)\n";
  s += "authors  pct_authors  range  pct_range  works  pct_works\n";
  s += std::to_string(r.removed_authors_from_denominator) + "  " +
       format_percent(r.pct_authors) + "  " +
       std::to_string(r.removed_level_range) + "  " +
       format_percent(r.pct_range) + "  " + std::to_string(r.removed_works) +
       "  " + format_percent(r.pct_works) + "\n";
  s += "authors above cutoff (kept in denominator): " +
       std::to_string(r.removed_authors_physical) + "\n";
  return s;
}

inline std::string format_fit(const FitResult& f) {
  return "slope " + detail::fixed(f.slope, 3) + "  exponent " +
         detail::fixed(f.exponent, 3) + "  R^2 " + detail::fixed(f.r_squared, 2) +
         "  F " + detail::fixed(f.f_stat, 1) + "  dof " + std::to_string(f.dof) +
         "  (points " + std::to_string(f.n_points) + ", denominator " +
         std::to_string(f.denominator) + ", cutoff " + cutoff_label(f.cutoff) +
         ")\n";
}

inline std::string format_mle(const MleResult& m) {
  return "alpha " + detail::fixed(m.alpha_hat, 3) + "  xmin " +
         std::to_string(m.xmin) + "  ks " + detail::fixed(m.ks, 4) +
         "  n_tail " + std::to_string(m.n_tail) + "  loglik " +
         detail::fixed(m.log_likelihood, 2) + "\n";
}

inline std::string format_comparison(const ComparisonReport& c) {
  std::string s;
  s += "historical (log-log OLS, cutoff " + std::to_string(c.cutoff_used) + "): ";
  s += c.historical ? format_fit(*c.historical) : "failed\n";
  s += "modern (discrete MLE, KS-selected xmin): ";
  s += c.modern ? format_mle(*c.modern) : "failed\n";
  if (c.divergence) s += "divergence " + detail::fixed(*c.divergence, 3) + "\n";
  for (const auto& n : c.notes) s += "note: " + n + "\n";
  return s;
}

inline constexpr std::string_view kBiasHeader =
    "cutoff,mean_hist_err,sd_hist_err,mean_mle_err,sd_mle_err";

inline std::string format_bias_rows(const BiasTable& t) {
  std::string s(kBiasHeader);
  s += '\n';
  for (const auto& r : t.rows) {
    s += cutoff_label(r.cutoff) + "," + detail::fixed(r.mean_hist_err, 6) + "," +
         detail::fixed(r.sd_hist_err, 6) + "," + detail::fixed(r.mean_mle_err, 6) +
         "," + detail::fixed(r.sd_mle_err, 6) + "\n";
  }
  return s;
}

}  // namespace lotka
