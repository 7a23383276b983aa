// Copyright 2026 The cbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cbo/app.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cbo/error.hpp"
#include "cbo/experiments.hpp"

namespace cbo {
namespace {

using ojson = nlohmann::ordered_json;

std::vector<std::string> indexed(const std::string& prefix, std::size_t d) {
  std::vector<std::string> names;
  for (std::size_t k = 1; k <= d; ++k) names.push_back(prefix + std::to_string(k));
  return names;
}

double distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(sum);
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

ojson diagnostics_json(const ValidationReport& report) {
  ojson list = ojson::array();
  for (const auto& d : report.diagnostics) {
    list.push_back({{"check", d.check}, {"status", to_string(d.status)}, {"message", d.message}});
  }
  return list;
}

ojson check_json(const InequalityCheck& c) {
  return {{"name", c.name}, {"pass", c.pass}, {"worst_margin", c.worst_margin},
          {"witness", c.witness}};
}

// Histogram normalized to a probability density.
CsvTable histogram(const std::string& filename, const Matrix& positions, std::size_t bins) {
  CsvTable table{filename, {"x", "density"}, {}};
  if (positions.rows() == 0) return table;
  const auto values = positions.values();
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double width = std::max(*hi_it - lo, 1e-12) / static_cast<double>(bins);
  std::vector<double> counts(bins, 0.0);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    counts[std::min(b, bins - 1)] += 1.0;
  }
  const double scale = 1.0 / (static_cast<double>(values.size()) * width);
  for (std::size_t b = 0; b < bins; ++b) {
    table.rows.push_back({lo + (static_cast<double>(b) + 0.5) * width, counts[b] * scale});
  }
  return table;
}

ExperimentReport run_optimize(const RunConfig& c, WorkerPool& pool) {
  ExperimentReport report;
  const Objective objective = make_objective(c.objective);
  const std::size_t d = c.params.dimension;
  const auto minimizer = objective.global_minimizer();
  ObservationSchedule schedule{c.stride, {}};

  CsvTable trajectory{"trajectory.csv", {"seed", "step", "time"}, {}};
  for (const auto& n : indexed("consensus_", d)) trajectory.header.push_back(n);
  for (const auto& n : indexed("x_star_", d)) trajectory.header.push_back(n);
  trajectory.header.insert(trajectory.header.end(), {"f_min", "f_max"});
  CsvTable stars{"x_star.csv", {"seed"}, {}};
  for (const auto& n : indexed("x_star_", d)) stars.header.push_back(n);
  stars.header.insert(stars.header.end(), {"objective", "error"});

  ojson runs = ojson::array();
  std::vector<double> errors;
  Matrix initial;
  for (std::size_t s = 0; s < c.seeds; ++s) {
    const std::uint64_t seed = c.seed + s;
    const NoisePlan plan{seed, Purpose::brownian, d};
    OptimizationResult r = run_optimization(c.params, objective, c.init, plan, schedule, &pool);
    const double error = distance(r.x_star, minimizer);
    errors.push_back(error);
    runs.push_back({{"seed", seed},
                    {"x_star", r.x_star},
                    {"raw_mean", r.raw_mean},
                    {"final_consensus", r.final_consensus},
                    {"objective_at_x_star", r.objective_at_x_star},
                    {"error", error}});
    for (const auto& snap : r.trajectory.snapshots) {
      std::vector<double> row{static_cast<double>(seed), static_cast<double>(snap.step),
                              snap.time};
      row.insert(row.end(), snap.consensus.begin(), snap.consensus.end());
      for (double m : snap.mean) row.push_back(m / c.params.kappa);
      row.insert(row.end(), {snap.f_min, snap.f_max});
      trajectory.rows.push_back(std::move(row));
    }
    std::vector<double> row{static_cast<double>(seed)};
    row.insert(row.end(), r.x_star.begin(), r.x_star.end());
    row.insert(row.end(), {r.objective_at_x_star, error});
    stars.rows.push_back(std::move(row));
    if (s == 0) initial = std::move(r.trajectory.initial_state.positions);
  }

  report.results["minimizer"] = minimizer;
  report.results["median_error"] = median(errors);
  report.results["runs"] = std::move(runs);
  report.tables.push_back(std::move(trajectory));
  report.tables.push_back(std::move(stars));

  std::ostringstream gp;
  gp << "# gnuplot script generated by cbo-lab\n"
     << "set datafile separator ','\n"
     << "set key top left\n";
  if (d == 1) {
    // Objective curve over a window covering the initial data and the minimizer.
    const double mean = c.init.kind == InitialDistribution::Kind::gaussian
                            ? c.init.first[0]
                            : 0.5 * (c.init.first[0] + c.init.second[0]);
    const double spread = c.init.kind == InitialDistribution::Kind::gaussian
                              ? 4.0 * std::sqrt(c.init.second[0])
                              : 0.5 * (c.init.second[0] - c.init.first[0]) + 1.0;
    const double lo = std::min(mean - spread, minimizer[0] - 2.0);
    const double hi = std::max(mean + spread, minimizer[0] + 2.0);
    CsvTable curve{"objective.csv", {"x", "f"}, {}};
    constexpr std::size_t kGrid = 2000;
    for (std::size_t k = 0; k <= kGrid; ++k) {
      const double x = lo + (hi - lo) * static_cast<double>(k) / kGrid;
      curve.rows.push_back({x, objective.evaluate(std::span<const double>(&x, 1))});
    }
    report.tables.push_back(std::move(curve));
    report.tables.push_back(histogram("initial_histogram.csv", initial, 60));
    gp << "set xlabel 'x'\nset ylabel 'f(x)'\nset y2label 'initial density'\n"
       << "set y2tics\nset ytics nomirror\nset style fill transparent solid 0.35\n"
       << "plot 'initial_histogram.csv' using 1:2 axes x1y2 with boxes title 'initial data', \\\n"
       << "     'objective.csv' using 1:2 with lines lw 2 title 'objective', \\\n"
       << "     'x_star.csv' using 2:3 with points pt 7 ps 1.5 title 'x_star'\n";
  } else {
    gp << "set xlabel 't'\nset ylabel 'x_star estimate'\n"
       << "plot for [k=1:" << d << "] 'trajectory.csv' using 3:(column(3+" << d
       << "+k)) with lines title sprintf('x_star_%d', k)\n";
  }
  report.plot_script = gp.str();
  return report;
}

ExperimentReport run_meanfield(const RunConfig& c, WorkerPool& pool) {
  ExperimentReport report;
  const Objective objective = make_objective(c.objective);
  MeanFieldOptions options;
  options.particle_counts = c.n_list;
  options.seeds = c.seeds;
  options.reference_size = c.m_ref;
  options.stride = c.stride;
  options.master_seed = c.seed;
  const MeanFieldCurve curve = meanfield_error_curve(c.params, objective, c.init, options, &pool);

  CsvTable summary{"meanfield.csv", {"N", "sup_t_mse", "stderr"}, {}};
  CsvTable series{"meanfield_series.csv", {"time"}, {}};
  ojson entries = ojson::array();
  for (const auto& e : curve.entries) {
    summary.rows.push_back({static_cast<double>(e.particles), e.sup_t_mse, e.std_error});
    series.header.push_back("mse_N" + std::to_string(e.particles));
    series.header.push_back("stderr_N" + std::to_string(e.particles));
    entries.push_back({{"N", e.particles},
                       {"sup_t_mse", e.sup_t_mse},
                       {"stderr", e.std_error},
                       {"per_time_mse", e.per_time_mse},
                       {"per_time_stderr", e.per_time_std_error}});
  }
  for (std::size_t t = 0; t < curve.times.size(); ++t) {
    std::vector<double> row{curve.times[t]};
    for (const auto& e : curve.entries) {
      row.push_back(e.per_time_mse[t]);
      row.push_back(e.per_time_std_error[t]);
    }
    series.rows.push_back(std::move(row));
  }
  report.results["slope"] = curve.slope;
  report.results["intercept"] = curve.intercept;
  report.results["seeds"] = curve.seeds_used;
  report.results["reference_size"] = curve.reference_size;
  report.results["floor_estimate"] = curve.floor_estimate;
  report.results["times"] = curve.times;
  report.results["entries"] = std::move(entries);
  report.results["validation"] =
      diagnostics_json(validate_params(c.params, c.level, c.kappa_threshold));
  report.tables.push_back(std::move(summary));
  report.tables.push_back(std::move(series));

  std::ostringstream gp;
  gp << "# gnuplot script generated by cbo-lab\n"
     << "set datafile separator ','\n"
     << "set multiplot layout 1,2\n"
     << "set logscale xy\nset xlabel 'N'\nset ylabel 'sup_t MSE'\n"
     << "f(x) = exp(" << format_double(curve.intercept) << ") * x**(" << format_double(curve.slope)
     << ")\n"
     << "plot 'meanfield.csv' using 1:2:3 with yerrorbars pt 7 title 'coupled error', \\\n"
     << "     f(x) with lines title sprintf('slope %.3f', " << format_double(curve.slope) << ")\n"
     << "unset logscale x\nset xlabel 't'\nset ylabel 'MSE(t)'\n"
     << "plot for [k=1:" << curve.entries.size()
     << "] 'meanfield_series.csv' using 1:(column(2*k)) with lines "
        "title columnheader(2*k)\n"
     << "unset multiplot\n";
  report.plot_script = gp.str();
  return report;
}

ExperimentReport run_moments(const RunConfig& c, WorkerPool& pool) {
  ExperimentReport report;
  const Objective objective = make_objective(c.objective);
  const auto series = averaged_moment_trajectory(c.params, objective, c.init, c.seed, c.seeds,
                                                 c.p_list, c.stride, &pool);
  CsvTable table{"moments.csv", {"time"}, {}};
  ojson list = ojson::array();
  for (const auto& s : series) {
    table.header.push_back("moment_p" + std::to_string(s.p));
    table.header.push_back("consensus_moment_p" + std::to_string(s.p));
    list.push_back({{"p", s.p},
                    {"late_to_early_ratio", late_to_early_ratio(s)},
                    {"moment", s.moment},
                    {"consensus_moment", s.consensus_moment}});
  }
  const std::size_t count = series.empty() ? 0 : series.front().times.size();
  for (std::size_t t = 0; t < count; ++t) {
    std::vector<double> row{series.front().times[t]};
    for (const auto& s : series) row.insert(row.end(), {s.moment[t], s.consensus_moment[t]});
    table.rows.push_back(std::move(row));
  }
  report.results["seeds"] = c.seeds;
  report.results["times"] = series.empty() ? std::vector<double>{} : series.front().times;
  report.results["series"] = std::move(list);
  report.results["validation"] =
      diagnostics_json(validate_params(c.params, c.level, c.kappa_threshold));
  report.tables.push_back(std::move(table));

  std::ostringstream gp;
  gp << "# gnuplot script generated by cbo-lab\n"
     << "set datafile separator ','\n"
     << "set logscale y\nset xlabel 't'\nset ylabel 'moment'\n"
     << "plot for [k=2:" << 1 + 2 * series.size()
     << "] 'moments.csv' using 1:k with lines title columnheader(k)\n";
  report.plot_script = gp.str();
  return report;
}

ExperimentReport run_ratio(const RunConfig& c, WorkerPool& pool) {
  ExperimentReport report;
  const Objective objective = make_objective(c.objective);
  RatioOptions options;
  options.sample_sizes = c.n_list;
  options.trials = c.trials;
  options.oracle_size = c.oracle_size;
  options.master_seed = c.seed;
  const RatioMseCurve curve =
      ratio_estimator_experiment(objective, c.init, c.params.alpha, options, &pool);

  CsvTable table{"ratio.csv", {"N", "mse", "stderr"}, {}};
  ojson entries = ojson::array();
  for (const auto& e : curve.entries) {
    table.rows.push_back({static_cast<double>(e.samples), e.mse, e.std_error});
    entries.push_back({{"N", e.samples}, {"mse", e.mse}, {"stderr", e.std_error}});
  }
  report.results["reference_R"] = curve.reference_R;
  report.results["oracle_sample_size"] = curve.oracle_sample_size;
  report.results["oracle_effective_size"] = curve.oracle_effective_size;
  report.results["slope"] = curve.slope;
  report.results["intercept"] = curve.intercept;
  report.results["entries"] = std::move(entries);
  report.tables.push_back(std::move(table));

  std::ostringstream gp;
  gp << "# gnuplot script generated by cbo-lab\n"
     << "set datafile separator ','\n"
     << "set logscale xy\nset xlabel 'N'\nset ylabel 'MSE'\n"
     << "f(x) = exp(" << format_double(curve.intercept) << ") * x**(" << format_double(curve.slope)
     << ")\n"
     << "plot 'ratio.csv' using 1:2:3 with yerrorbars pt 7 title 'estimator MSE', \\\n"
     << "     f(x) with lines title sprintf('slope %.3f', " << format_double(curve.slope) << ")\n";
  report.plot_script = gp.str();
  return report;
}

ExperimentReport run_validate(const RunConfig& c) {
  ExperimentReport report;
  const Objective objective = make_objective(c.objective);
  const ValidationReport v = validate_params(c.params, c.level, c.kappa_threshold);
  report.results["level"] = to_string(v.level);
  report.results["has_warnings"] = v.has_warnings();
  report.results["diagnostics"] = diagnostics_json(v);
  const AssumptionReport a = check_assumption(objective, 10'000, 10.0, c.seed);
  report.results["assumptions"] = {{"samples", a.samples},
                                   {"radius", a.radius},
                                   {"pass", a.pass()},
                                   {"checks",
                                    {check_json(a.bounded_below), check_json(a.lower_growth),
                                     check_json(a.upper_growth), check_json(a.lipschitz)}}};
  return report;
}

}  // namespace

ExperimentReport run_command(const RunConfig& config, WorkerPool& pool) {
  ExperimentReport report;
  switch (config.command) {
    case Command::optimize: report = run_optimize(config, pool); break;
    case Command::meanfield: report = run_meanfield(config, pool); break;
    case Command::moments: report = run_moments(config, pool); break;
    case Command::ratio: report = run_ratio(config, pool); break;
    case Command::validate: report = run_validate(config); break;
  }
  report.command = config.command;
  report.master_seed = config.seed;
  return report;
}

std::string summarize(const ExperimentReport& report) {
  std::ostringstream out;
  const auto& r = report.results;
  out << to_string(report.command) << " (master seed " << report.master_seed << ")\n";
  switch (report.command) {
    case Command::optimize:
      for (const auto& run : r["runs"]) {
        out << "  seed " << run["seed"] << ": x_star = " << run["x_star"].dump()
            << ", error " << run["error"].dump() << "\n";
      }
      out << "  median error " << r["median_error"].dump() << "\n";
      break;
    case Command::meanfield:
      for (const auto& e : r["entries"]) {
        out << "  N = " << e["N"] << ": sup_t mse " << e["sup_t_mse"].dump() << "\n";
      }
      out << "  log-log slope " << r["slope"].dump() << "\n";
      break;
    case Command::moments:
      for (const auto& s : r["series"]) {
        out << "  p = " << s["p"] << ": late/early ratio " << s["late_to_early_ratio"].dump()
            << "\n";
      }
      break;
    case Command::ratio:
      for (const auto& e : r["entries"]) {
        out << "  N = " << e["N"] << ": mse " << e["mse"].dump() << "\n";
      }
      out << "  log-log slope " << r["slope"].dump() << "\n";
      break;
    case Command::validate:
      for (const auto& d : r["diagnostics"]) {
        out << "  [" << d["status"].get<std::string>() << "] " << d["check"].get<std::string>()
            << ": " << d["message"].get<std::string>() << "\n";
      }
      out << "  objective assumptions " << (r["assumptions"]["pass"].get<bool>() ? "hold" : "FAIL")
          << " on the sampled ball\n";
      break;
  }
  return out.str();
}

}  // namespace cbo
