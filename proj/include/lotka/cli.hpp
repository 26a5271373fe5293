#pragma once

// Command-line front end. run() is the whole program minus process plumbing,
// so tests can drive it with in-memory streams.
//
// Exit codes: 0 success, 2 input/format/usage errors, 3 numeric or
// degenerate-fit failures.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lotka/errors.hpp"
#include "lotka/freqdata.hpp"
#include "lotka/loglogfit.hpp"
#include "lotka/lotkamodel.hpp"
#include "lotka/modernfit.hpp"
#include "lotka/plot.hpp"
#include "lotka/report.hpp"

namespace lotka::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumeric = 3;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(path + ": cannot open for writing");
  out << content;
  if (!out) throw InputError(path + ": write failed");
}

inline FrequencyDistribution read_distribution(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open for reading");
  try {
    return parse_distribution(in, std::filesystem::path(path).stem().string());
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline Denominator parse_denominator(const std::string& s) {
  if (s == "full") return Denominator::full();
  if (s == "truncated") return Denominator::truncated();
  const auto n = detail::parse_int(s);
  if (!n || *n <= 0)
    throw InputError("--denominator must be full, truncated or a positive integer");
  return Denominator::of(*n);
}

inline std::vector<std::optional<Level>> parse_cutoffs(const std::string& s) {
  std::vector<std::optional<Level>> out;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ',');) {
    const auto t = detail::trim(tok);
    if (t == "max") {
      out.push_back(std::nullopt);
      continue;
    }
    const auto n = detail::parse_int(t);
    if (!n || *n < 1)
      throw InputError("--cutoffs: '" + std::string(t) +
                       "' is not a positive integer or 'max'");
    out.push_back(*n);
  }
  if (out.empty()) throw InputError("--cutoffs is empty");
  return out;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"Lotka's law: historical log-log fitting beside discrete "
               "maximum likelihood"};
  app.name("lotka");
  app.require_subcommand(1);

  // ingest
  std::string records_path, out_path;
  auto* ingest = app.add_subcommand(
      "ingest", "Tally senior-author credits from a records file");
  ingest->add_option("--records", records_path, "paper_id,position,author file")
      ->required();
  ingest->add_option("--out", out_path, "Distribution file to write")->required();

  // fit
  auto* fit = app.add_subcommand("fit", "Estimate the exponent");
  fit->require_subcommand(1);
  std::string dist_path, denominator_text = "full";
  std::optional<Level> truncate;
  bool json_flag = false, text_flag = false;
  auto* fit_loglog =
      fit->add_subcommand("loglog", "Least squares on log10 percent vs log10 level");
  fit_loglog->add_option("--dist", dist_path)->required();
  fit_loglog->add_option("--truncate", truncate, "Drop levels above N");
  fit_loglog->add_option("--denominator", denominator_text,
                         "full | truncated | INT (default full)");
  fit_loglog->add_flag("--json", json_flag, "JSON output (the default)");
  fit_loglog->add_flag("--text", text_flag, "Rounded one-line summary instead of JSON");

  std::string xmin_text = "auto";
  std::optional<int> bootstrap;
  std::optional<std::uint64_t> seed;
  auto* fit_mle = fit->add_subcommand("mle", "Discrete maximum likelihood");
  fit_mle->add_option("--dist", dist_path)->required();
  fit_mle->add_option("--xmin", xmin_text, "auto | N (default auto)");
  auto* boot_opt =
      fit_mle->add_option("--bootstrap", bootstrap, "Goodness-of-fit replicates");
  auto* seed_opt = fit_mle->add_option("--seed", seed);
  boot_opt->needs(seed_opt);

  // report
  auto* report = app.add_subcommand("report", "Tabular reports");
  report->require_subcommand(1);
  Level cutoff = 0;
  auto* report_trunc =
      report->add_subcommand("truncation", "Scale of a right truncation");
  report_trunc->add_option("--dist", dist_path)->required();
  report_trunc->add_option("--cutoff", cutoff)->required();

  // simulate
  double alpha = 2.0;
  Count authors = 0;
  std::uint64_t sim_seed = 0;
  auto* simulate =
      app.add_subcommand("simulate", "Sample authors from the discrete power law");
  simulate->add_option("--alpha", alpha)->required();
  simulate->add_option("--authors", authors)->required();
  simulate->add_option("--seed", sim_seed)->required();
  simulate->add_option("--out", out_path)->required();

  // compare
  Level compare_cutoff = 0;
  auto* compare =
      app.add_subcommand("compare", "Historical and modern estimates side by side");
  compare->add_option("--dist", dist_path)->required();
  compare->add_option("--truncate", compare_cutoff)->required();
  compare->add_flag("--json", json_flag);

  // bias
  std::string cutoffs_text;
  int replicates = 0;
  auto* bias = app.add_subcommand(
      "bias", "Error of both estimators on simulated populations");
  bias->add_option("--alpha", alpha)->required();
  bias->add_option("--authors", authors)->required();
  bias->add_option("--cutoffs", cutoffs_text, "N[,N...]; 'max' = no truncation")
      ->required();
  bias->add_option("--replicates", replicates)->required();
  bias->add_option("--seed", sim_seed)->required();
  bias->add_flag("--json", json_flag);

  // plot
  auto* plot = app.add_subcommand("plot", "SVG figure plus coordinate sidecar");
  plot->require_subcommand(1);
  std::string fit_path;
  Level bin_width = 1;
  auto* plot_hist = plot->add_subcommand("histogram", "Binned author counts");
  auto* plot_loglog = plot->add_subcommand("loglog", "Log-log scatter");
  for (auto* p : {plot_hist, plot_loglog}) {
    p->add_option("--dist", dist_path)->required();
    p->add_option("--fit", fit_path, "FitResult JSON; draws the trendline");
    p->add_option("--bin-width", bin_width);
    p->add_option("--out", out_path)->required();
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "lotka: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (*ingest) {
      std::ifstream in(records_path);
      if (!in) throw InputError(records_path + ": cannot open for reading");
      std::vector<AuthorRecord> records;
      try {
        records = parse_records(in);
      } catch (const InputError& e) {
        throw InputError(records_path + ": " + e.what());
      }
      const auto dist = from_author_records(records);
      write_file(out_path, serialize_distribution(dist));
      out << "wrote " << out_path << " (" << dist.total_authors() << " authors, "
          << dist.total_works() << " works)\n";
    } else if (*fit_loglog) {
      const auto dist = read_distribution(dist_path);
      const auto r = fit_historical(dist, truncate, parse_denominator(denominator_text));
      out << (text_flag ? format_fit(r) : dump(to_json(r)));
    } else if (*fit_mle) {
      const auto dist = read_distribution(dist_path);
      MleResult r;
      const bool auto_xmin = xmin_text == "auto";
      if (auto_xmin) {
        r = select_xmin(dist);
      } else {
        const auto x = detail::parse_int(xmin_text);
        if (!x || *x < 1) throw InputError("--xmin must be 'auto' or a positive integer");
        r = mle_alpha(dist, *x);
      }
      auto j = to_json(r);
      if (bootstrap) {
        j["n_boot"] = *bootstrap;
        j["seed"] = *seed;
        j["p_value"] = gof_bootstrap(dist, r, *bootstrap, *seed,
                                     {.refit_xmin = auto_xmin, .threads = 0});
      }
      out << dump(j);
    } else if (*report_trunc) {
      const auto dist = read_distribution(dist_path);
      out << format_truncation(truncation_report(dist, cutoff), dist.name());
    } else if (*simulate) {
      const auto dist = sample(PowerLawModel(alpha, 1), authors, sim_seed);
      write_file(out_path, serialize_distribution(dist));
      out << "wrote " << out_path << " (" << dist.total_authors() << " authors, max level "
          << dist.max_level() << ")\n";
    } else if (*compare) {
      const auto dist = read_distribution(dist_path);
      const auto rep = compare_methods(dist, compare_cutoff);
      out << (json_flag ? dump(to_json(rep)) : format_comparison(rep));
    } else if (*bias) {
      const auto table = bias_experiment(alpha, authors, parse_cutoffs(cutoffs_text),
                                         replicates, sim_seed);
      out << (json_flag ? dump(to_json(table)) : format_bias_rows(table));
    } else if (*plot_hist || *plot_loglog) {
      const auto dist = read_distribution(dist_path);
      std::optional<FitResult> f;
      if (!fit_path.empty()) {
        try {
          f = fit_result_from_json(Json::parse(read_file(fit_path)));
        } catch (const Json::parse_error& e) {
          throw InputError(fit_path + ": " + e.what());
        }
      }
      PlotSpec spec;
      spec.output_path = out_path;
      spec.bin_width = bin_width;
      if (*plot_hist) {
        spec.kind = PlotSpec::Kind::histogram;
        spec.x_label = "number of works (bins of " + std::to_string(bin_width) + ")";
        spec.y_label = "number of authors";
      } else {
        spec.kind = PlotSpec::Kind::loglog;
        spec.include_trendline = f.has_value();
        spec.x_label = "log10 number of works";
        spec.y_label = "log10 percent of authors";
      }
      const auto doc = emit_plot(dist, f, spec);
      write_file(out_path, doc.svg);
      write_file(sidecar_path(out_path), doc.sidecar);
      out << "wrote " << out_path << " and " << sidecar_path(out_path) << "\n";
    }
  } catch (const FitError& e) {
    err << "lotka: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "lotka: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace lotka::cli
