// SPDX-License-Identifier: Apache-2.0
#include "trendvar/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>

#include "trendvar/errors.hpp"
#include "trendvar/forecaster.hpp"
#include "trendvar/io.hpp"
#include "trendvar/likelihood.hpp"
#include "trendvar/metrics.hpp"
#include "trendvar/parallel.hpp"
#include "trendvar/simulation.hpp"
#include "trendvar/trainer.hpp"

namespace trendvar {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::string data;
  std::string trend;
  std::string model;
  std::optional<Index> horizon;
  std::optional<int> lag;
};

RunConfig load_config(const Options& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : read_run_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  cfg.train.seed = cfg.seed;
  if (o.lag) cfg.train.p = *o.lag;
  if (o.horizon) {
    if (*o.horizon < 1) throw Error(ErrorKind::HorizonZero, "--horizon must be >= 1");
    cfg.horizon = *o.horizon;
  }
  return cfg;
}

fs::path prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create output directory " + dir + ": " + ec.message());
  return fs::path(dir);
}

void write_manifest(const fs::path& dir, const std::string& command, const RunConfig& cfg,
                    const std::vector<std::string>& files, json extra = json::object()) {
  json doc = {{"command", command}, {"seed", cfg.seed}, {"files", files}};
  for (auto it = extra.begin(); it != extra.end(); ++it) doc[it.key()] = it.value();
  write_text_file((dir / "manifest.json").string(), doc.dump(2) + "\n");
}

Matrix panel_of(const TimeSeriesFrame& frame) { return frame.panel(); }

std::string name_of(const TimeSeriesFrame& frame, Index k) {
  if (static_cast<std::size_t>(k) < frame.names.size()) return frame.names[static_cast<std::size_t>(k)];
  return "y_" + std::to_string(k + 1);
}

// ---- simulate --------------------------------------------------------------

int cmd_simulate(const Options& o, std::ostream& out) {
  RunConfig cfg = load_config(o);
  SimSpec spec;
  spec.causal = cfg.sim.causal;
  if (!o.model.empty()) spec.causal = load_archive(o.model).model.causal;
  spec.length = cfg.sim.length;
  spec.replications = cfg.sim.replications;
  spec.seed = cfg.seed;
  spec.init = cfg.sim.init;
  spec.burn_in = cfg.sim.burn_in;
  const std::string trend = o.trend.empty() ? cfg.sim.trend : o.trend;
  if (trend == "zero") spec.trend = ZeroTrend{};
  else if (trend == "synthetic") spec.trend = SyntheticTrend{cfg.seed, {}};
  else spec.trend = TrendFile{trend};

  const fs::path dir = prepare_out(o.out);
  const std::vector<Matrix> panels = simulate(spec);
  std::vector<std::string> files;
  const Matrix mu = resolve_trend(spec.trend, spec.causal.dim(), spec.length);
  write_panel_csv((dir / "trend.csv").string(), mu, "mu");
  files.push_back("trend.csv");
  for (std::size_t r = 0; r < panels.size(); ++r) {
    char name[32];
    std::snprintf(name, sizeof name, "sim_%04zu.csv", r + 1);
    write_panel_csv((dir / name).string(), panels[r], "y");
    files.emplace_back(name);
  }
  write_manifest(dir, "simulate", cfg, files,
                 {{"length", spec.length}, {"replications", spec.replications},
                  {"init", spec.init == InitMode::Stationary ? "stationary" : "burn_in"},
                  {"trend", trend}});
  out << "simulated " << panels.size() << " series of length " << spec.length << " into "
      << dir.string() << "\n";
  return 0;
}

// ---- fit -----------------------------------------------------------------

int cmd_fit(const Options& o, std::ostream& out) {
  if (o.data.empty()) throw Error(ErrorKind::Usage, "fit requires --data");
  RunConfig cfg = load_config(o);
  const TimeSeriesFrame frame = read_series_csv(o.data);
  const Matrix y = panel_of(frame);
  const fs::path dir = prepare_out(o.out);

  std::ostringstream log;
  log << "iter,loglik,rc1,rc2,spectral_radius\n";
  auto cell = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
  const FittedModel model = fit(y, cfg.train, [&](const IterationRecord& r) {
    log << r.iter << ',' << format_double(r.loglik) << ',' << cell(r.rc1) << ',' << cell(r.rc2) << ','
        << format_double(r.spectral_radius) << '\n';
  });

  ModelArchive archive{model, cfg.train, frame.index.front()};
  save_archive((dir / "model.json").string(), archive);
  write_text_file((dir / "training_log.csv").string(), log.str());

  const Index t_len = y.cols();
  const Index p = model.causal.order();
  const Matrix mu = fitted_trend(model, 1, t_len);
  write_panel_csv((dir / "trend.csv").string(), mu, "mu", frame.index.front());
  const Matrix resid = residuals(y, mu, model.causal);
  write_panel_csv((dir / "residuals.csv").string(), resid, "e", frame.index.front() + p);

  const Index maxlag = std::min<Index>(20, resid.cols() - 1);
  std::ostringstream acf_csv;
  acf_csv << "lag";
  for (Index k = 0; k < resid.rows(); ++k) acf_csv << ",acf_" << (k + 1);
  acf_csv << '\n';
  if (maxlag >= 0) {
    const Matrix acf = residual_acf(resid, maxlag);
    for (Index lag = 0; lag <= maxlag; ++lag) {
      acf_csv << lag;
      for (Index k = 0; k < acf.cols(); ++k) acf_csv << ',' << format_double(acf(lag, k));
      acf_csv << '\n';
    }
  }
  write_text_file((dir / "residual_acf.csv").string(), acf_csv.str());

  std::ostringstream qq_csv;
  qq_csv << "series,theoretical,empirical\n";
  if (resid.cols() >= 2) {
    for (Index k = 0; k < resid.rows(); ++k) {
      std::vector<double> v;
      for (Index t = 0; t < resid.cols(); ++t) v.push_back(resid(k, t));
      for (const auto& [theory, emp] : normal_qq(v)) {
        qq_csv << (k + 1) << ',' << format_double(theory) << ',' << format_double(emp) << '\n';
      }
    }
  }
  write_text_file((dir / "residual_qq.csv").string(), qq_csv.str());

  write_manifest(dir, "fit", cfg,
                 {"model.json", "training_log.csv", "trend.csv", "residuals.csv", "residual_acf.csv",
                  "residual_qq.csv"},
                 {{"data", o.data},
                  {"final_loglik", model.final_loglik},
                  {"iterations_used", model.iterations_used},
                  {"converged", model.converged}});
  out << "fit: loglik " << format_double(model.final_loglik) << " after " << model.iterations_used
      << " iterations (" << (model.converged ? "converged" : "iteration cap") << ")\n";
  return 0;
}

// ---- forecast ------------------------------------------------------------

int cmd_forecast(const Options& o, std::ostream& out) {
  if (o.model.empty()) throw Error(ErrorKind::Usage, "forecast requires --model");
  if (o.data.empty()) throw Error(ErrorKind::Usage, "forecast requires --data");
  RunConfig cfg = load_config(o);
  const ModelArchive archive = load_archive(o.model);
  if (!o.seed) cfg.seed = archive.model.seed;
  const TimeSeriesFrame frame = read_series_csv(o.data);
  if (frame.index.front() != archive.first_t) {
    throw Error(ErrorKind::LengthMismatch,
                "forecast data must start at the model's first training time " +
                    std::to_string(archive.first_t) + " (got " + std::to_string(frame.index.front()) + ")");
  }
  if (frame.dim() != archive.model.causal.dim()) {
    throw Error(ErrorKind::LengthMismatch, "forecast data has " + std::to_string(frame.dim()) +
                                               " series, model has " +
                                               std::to_string(archive.model.causal.dim()));
  }
  const ForecastResult r = forecast(archive.model, panel_of(frame), cfg.horizon, cfg.forecast);
  const fs::path dir = prepare_out(o.out);

  std::ostringstream csv;
  csv << "t,series,name,point,sd,lower,upper,trend\n";
  json rows = json::array();
  const std::int64_t last_t = frame.index.back();
  for (Index l = 0; l < r.horizon(); ++l) {
    for (Index k = 0; k < r.points.rows(); ++k) {
      const std::int64_t t = last_t + l + 1;
      csv << t << ',' << (k + 1) << ',' << name_of(frame, k) << ',' << format_double(r.points(k, l))
          << ',' << format_double(std::sqrt(r.error_covs[l](k, k))) << ','
          << format_double(r.lower(k, l)) << ',' << format_double(r.upper(k, l)) << ','
          << format_double(r.trend_path(k, l)) << '\n';
    }
    std::vector<std::vector<double>> cov;
    for (Index i = 0; i < r.error_covs[l].rows(); ++i) {
      cov.emplace_back();
      for (Index j = 0; j < r.error_covs[l].cols(); ++j) cov.back().push_back(r.error_covs[l](i, j));
    }
    std::vector<double> pts, sd, lo, hi, trend;
    for (Index k = 0; k < r.points.rows(); ++k) {
      pts.push_back(r.points(k, l));
      sd.push_back(std::sqrt(r.error_covs[l](k, k)));
      trend.push_back(r.trend_path(k, l));
      lo.push_back(r.lower(k, l));
      hi.push_back(r.upper(k, l));
    }
    rows.push_back({{"t", last_t + l + 1}, {"horizon", l + 1}, {"point", pts}, {"sd", sd},
                    {"lower", lo}, {"upper", hi}, {"trend", trend}, {"error_cov", cov}});
  }
  write_text_file((dir / "forecast.csv").string(), csv.str());
  json doc = {{"seed", cfg.seed}, {"level", cfg.forecast.level}, {"z", r.z}, {"steps", rows}};
  write_text_file((dir / "forecast.json").string(), doc.dump(2) + "\n");
  write_manifest(dir, "forecast", cfg, {"forecast.csv", "forecast.json"},
                 {{"model", o.model}, {"data", o.data}, {"horizon", cfg.horizon}});
  out << "forecast: " << r.horizon() << " steps from t = " << last_t << "\n";
  return 0;
}

// ---- evaluate ------------------------------------------------------------

std::string horizon_label(const std::vector<int>& hs) {
  if (hs.size() == 1) return std::to_string(hs.front());
  return std::to_string(hs.front()) + "-" + std::to_string(hs.back());
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  RunConfig cfg = load_config(o);
  if (o.horizon) {
    cfg.eval.horizons.clear();
    for (int h = 1; h <= static_cast<int>(*o.horizon); ++h) cfg.eval.horizons.push_back(h);
  }
  EvalConfig& ev = cfg.eval;
  ev.validate();
  std::sort(ev.horizons.begin(), ev.horizons.end());
  ev.horizons.erase(std::unique(ev.horizons.begin(), ev.horizons.end()), ev.horizons.end());
  const int max_h = ev.horizons.back();
  const Index needed = ev.window + ev.origins - 1 + max_h;
  const fs::path dir = prepare_out(o.out);
  std::vector<std::string> files;

  TimeSeriesFrame frame;
  if (!o.data.empty()) {
    frame = read_series_csv(o.data);
  } else {
    // Stand-in data from the benchmark model when no series is supplied.
    SimSpec spec;
    spec.causal = cfg.sim.causal;
    spec.length = needed;
    spec.seed = cfg.seed;
    spec.trend = SyntheticTrend{cfg.seed, {}};
    const Matrix y = simulate(spec).front();
    frame.values = y.transpose();
    for (Index t = 0; t < needed; ++t) frame.index.push_back(t + 1);
    write_panel_csv((dir / "data.csv").string(), y, "y");
    files.push_back("data.csv");
  }
  const Matrix y = panel_of(frame);
  if (y.cols() < needed) {
    throw Error(ErrorKind::LengthMismatch,
                "evaluate needs window + origins - 1 + max horizon = " + std::to_string(needed) +
                    " observations, data has " + std::to_string(y.cols()));
  }
  if (ev.window <= cfg.train.p) {
    throw Error(ErrorKind::LengthMismatch, "evaluate window must exceed p");
  }
  const Index m = y.rows();
  // Origins are the last `origins` windows that leave room for max_h actuals.
  const Index first_start = y.cols() - needed;

  ForecastOptions fopts = cfg.forecast;
  fopts.level = 1.0 - ev.alpha;
  std::vector<std::vector<Score>> per_origin(static_cast<std::size_t>(ev.origins));
  parallel_for(per_origin.size(), worker_count(), [&](std::size_t i) {
    const Index start = first_start + static_cast<Index>(i);
    const Matrix train = y.middleCols(start, ev.window);
    const FittedModel model = fit(train, cfg.train);
    const ForecastResult r = forecast(model, train, max_h, fopts);
    for (Index k = 0; k < m; ++k) {
      std::vector<double> hist(static_cast<std::size_t>(ev.window));
      for (Index t = 0; t < ev.window; ++t) hist[static_cast<std::size_t>(t)] = train(k, t);
      for (int h : ev.horizons) {
        Score s;
        s.origin = static_cast<int>(i) + 1;
        s.series = static_cast<int>(k) + 1;
        s.horizon = h;
        s.actual = y(k, start + ev.window + h - 1);
        s.forecast = r.points(k, h - 1);
        s.lower = r.lower(k, h - 1);
        s.upper = r.upper(k, h - 1);
        try {
          s.ape = ape(s.actual, s.forecast);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::ZeroActual) throw;
          s.ape = std::numeric_limits<double>::quiet_NaN();
        }
        s.sis = sis(s.actual, s.lower, s.upper, hist, ev);
        per_origin[i].push_back(s);
      }
    }
  });
  std::vector<Score> scores;
  for (const auto& v : per_origin) scores.insert(scores.end(), v.begin(), v.end());

  std::ostringstream sc;
  sc << "origin,train_start,series,name,horizon,actual,forecast,lower,upper,ape,sis\n";
  for (const Score& s : scores) {
    sc << s.origin << ',' << frame.index[static_cast<std::size_t>(first_start + s.origin - 1)] << ','
       << s.series << ',' << name_of(frame, s.series - 1) << ',' << s.horizon << ','
       << format_double(s.actual) << ',' << format_double(s.forecast) << ',' << format_double(s.lower)
       << ',' << format_double(s.upper) << ',' << (std::isnan(s.ape) ? "" : format_double(s.ape))
       << ',' << format_double(s.sis) << '\n';
  }
  write_text_file((dir / "scores.csv").string(), sc.str());
  files.push_back("scores.csv");

  // Per-horizon rows, then averages over h = 1..4 and 1..max when present.
  std::vector<std::vector<int>> groups;
  for (int h : ev.horizons) groups.push_back({h});
  for (int upto : {4, max_h}) {
    std::vector<int> g;
    for (int h : ev.horizons) {
      if (h <= upto) g.push_back(h);
    }
    if (g.size() > 1 && std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
  }
  std::ostringstream su;
  su << "series,name,horizons,ape,sis,scores,zero_actual_excluded\n";
  for (Index k = 0; k < m; ++k) {
    std::vector<Score> mine;
    for (const Score& s : scores) {
      if (s.series == k + 1) mine.push_back(s);
    }
    for (const auto& g : groups) {
      const Summary sum = aggregate(mine, g);
      su << (k + 1) << ',' << name_of(frame, k) << ',' << horizon_label(g) << ','
         << (std::isnan(sum.ape) ? "" : format_double(sum.ape)) << ',' << format_double(sum.sis) << ','
         << sum.scores_used << ',' << sum.zero_actual_excluded << '\n';
    }
  }
  write_text_file((dir / "summary.csv").string(), su.str());
  files.push_back("summary.csv");
  write_manifest(dir, "evaluate", cfg, files,
                 {{"origins", ev.origins}, {"window", ev.window}, {"horizons", ev.horizons},
                  {"alpha", ev.alpha}, {"seasonality", ev.seasonality},
                  {"data", o.data.empty() ? "simulated" : o.data}});
  out << "evaluate: " << ev.origins << " origins x " << m << " series x " << ev.horizons.size()
      << " horizons\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Joint LSTM-trend and causal VAR estimation, forecasting and evaluation"};
  app.name("trendvar");
  app.require_subcommand(1);
  Options o;

  auto common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "INI configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "top-level random seed");
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
  };
  CLI::App* sim = app.add_subcommand("simulate", "simulate VAR-with-trend series");
  common(sim);
  sim->add_option("--trend", o.trend, "trend CSV, or 'zero' / 'synthetic'");
  sim->add_option("--model", o.model, "take VAR coefficients from a model archive")
      ->check(CLI::ExistingFile);

  CLI::App* fit_cmd = app.add_subcommand("fit", "fit the model to a CSV panel");
  common(fit_cmd);
  fit_cmd->add_option("--data", o.data, "input CSV (t,y_1,...,y_m)")->check(CLI::ExistingFile);
  fit_cmd->add_option("--lag", o.lag, "VAR order p");

  CLI::App* fc = app.add_subcommand("forecast", "forecast from a fitted model");
  common(fc);
  fc->add_option("--model", o.model, "model archive from fit")->check(CLI::ExistingFile);
  fc->add_option("--data", o.data, "history CSV starting at the training start")
      ->check(CLI::ExistingFile);
  fc->add_option("--horizon", o.horizon, "number of steps ahead");

  CLI::App* ev = app.add_subcommand("evaluate", "rolling-origin forecast evaluation");
  common(ev);
  ev->add_option("--data", o.data, "input CSV; simulated stand-in data when omitted")
      ->check(CLI::ExistingFile);
  ev->add_option("--horizon", o.horizon, "evaluate horizons 1..n");
  ev->add_option("--lag", o.lag, "VAR order p");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (sim->parsed()) return cmd_simulate(o, out);
    if (fit_cmd->parsed()) return cmd_fit(o, out);
    if (fc->parsed()) return cmd_forecast(o, out);
    return cmd_evaluate(o, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("trendvar");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace trendvar
