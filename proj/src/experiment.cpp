#include "bsgd/experiment.hpp"

#include "bsgd/baselines.hpp"
#include "bsgd/lsqr.hpp"
#include "bsgd/metrics.hpp"
#include "bsgd/phantom.hpp"
#include "bsgd/raw_io.hpp"
#include "bsgd/solver.hpp"
#include "bsgd/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <tuple>

namespace bsgd {

SamplingFractions config_fractions(const ExperimentConfig& cfg) {
  if (cfg.node_num) return select_alpha_gamma(*cfg.node_num, cfg.row_blocks, cfg.col_blocks);
  return SamplingFractions::from_fractions(cfg.alpha, cfg.gamma, cfg.row_blocks, cfg.col_blocks);
}

Problem build_problem(const ExperimentConfig& cfg, bool with_lsq) {
  const Geometry geom = build_geometry(cfg.geometry);
  Problem p;
  p.system = std::make_unique<BlockSystem>(
      geom, make_partition(geom, cfg.row_blocks, cfg.col_blocks, cfg.tiles_per_angle, cfg.grouping),
      cfg.threads);
  p.shape = {geom.volume_side(), geom.ndim()};
  if (cfg.phantom == PhantomKind::SkullCube) {
    if (geom.ndim() != 3) throw Error("the skull_cube phantom needs a cone3d geometry");
    p.x_true = skull_cube(geom.volume_side());
  } else {
    p.x_true = shepp_logan(geom.volume_side(), geom.ndim());
  }
  p.y_clean = p.system->forward(p.x_true);
  p.y = add_noise(p.y_clean, cfg.snr_db, cfg.noise_seed);
  if (with_lsq) {
    const SystemOperator op(*p.system);
    const LsqrResult res = lsqr_solve(op, p.y, cfg.lsqr_tol, cfg.lsqr_max_iters);
    if (!res.converged)
      std::cerr << "warning: LSQR stopped after " << res.iterations
                << " iterations with relative normal residual above " << cfg.lsqr_tol << "\n";
    p.x_lsq = res.x;
    p.lsq_converged = res.converged;
  }
  return p;
}

double effective_epoch_weight(const ExperimentConfig& cfg, const SamplingFractions& f) {
  const double m = static_cast<double>(cfg.row_blocks);
  const double n = static_cast<double>(cfg.col_blocks);
  const double pairs = static_cast<double>(f.row_count * f.col_count) / (m * n);
  switch (cfg.method) {
    case Method::Bsgd:
    case Method::BsgdTv: return pairs;
    case Method::BsgdIm:
    case Method::BsgdRan: return pairs / static_cast<double>(cfg.tiles_per_angle);
    case Method::Sag: return static_cast<double>(f.row_count) / m;
    case Method::Svrg: return 1.0 / m;
    default: return 1.0;
  }
}

namespace {

bool finite(const Vec& v) { return v.allFinite(); }

RunRow make_row(Index epoch, double eff, double mu, const Vec& x, const Problem& p,
                const CostLedger& ledger) {
  RunRow row;
  row.epoch = epoch;
  row.effective_epoch = eff;
  const Metrics m = compute_metrics(x, p.x_true, p.x_lsq.size() ? &p.x_lsq : nullptr, *p.system, p.y);
  row.ds = m.ds;
  row.snr = m.snr;
  row.gap = m.gap;
  row.mu = mu;
  const LedgerTotals t = ledger.totals();
  row.block_mults = t.block_mults;
  row.master_storage = t.master_storage;
  row.node_storage_peak = t.node_storage_peak;
  row.bytes_moved = t.bytes_moved();
  return row;
}

void check_node_budget(const ExperimentConfig& cfg, const BlockSystem& system) {
  if (!cfg.node_budget) return;
  Index worst = 0;
  for (Index i = 0; i < system.row_block_count(); ++i)
    for (Index j = 0; j < system.col_block_count(); ++j)
      worst = std::max(worst, system.block(i, j).rows() + system.block(i, j).cols_count());
  if (static_cast<std::uint64_t>(worst) > *cfg.node_budget)
    throw InvalidPartition("largest block needs " + std::to_string(worst) +
                           " floats per node; the configured budget is " +
                           std::to_string(*cfg.node_budget));
}

}  // namespace

RunLog run_on_problem(const ExperimentConfig& cfg, const Problem& p) {
  const BlockSystem& system = *p.system;
  check_node_budget(cfg, system);
  const SamplingFractions f = config_fractions(cfg);
  const double weight = effective_epoch_weight(cfg, f);

  CostLedger ledger;
  ledger.set_master_layout(system.rows(), system.cols(), system.row_block_count(),
                           system.col_block_count());
  ledger.set_node_budget(cfg.node_budget);

  RunLog log;
  log.name = cfg.name;
  auto want_row = [&](Index k) { return k % cfg.metric_period == 0 || k == cfg.epochs; };

  if (is_block_method(cfg.method)) {
    SolverState s = init_state(system, p.y, cfg.step, cfg.seed);
    StepTuner tuner(cfg.tuning, cfg.tuning_mode, system.cols());
    const EpochOptions opts{cfg.threads, &ledger};
    log.rows.push_back(make_row(0, 0.0, s.mu, s.x, p, ledger));
    for (Index k = 1; k <= cfg.epochs; ++k) {
      switch (cfg.method) {
        case Method::Bsgd: bsgd_epoch(s, system, f, opts); break;
        case Method::BsgdIm: bsgd_im_epoch(s, system, f, TileSampling::Importance, opts); break;
        case Method::BsgdRan: bsgd_im_epoch(s, system, f, TileSampling::Uniform, opts); break;
        case Method::BsgdTv: bsgd_tv_epoch(s, system, f, cfg.lambda, p.shape, cfg.tv, opts); break;
        default: break;
      }
      tuner.after_epoch(s);
      log.epochs_run = k;
      const bool ok = finite(s.x);
      if (want_row(k) || !ok) log.rows.push_back(make_row(k, weight * static_cast<double>(k), s.mu, s.x, p, ledger));
      if (!ok) {
        log.diverged = true;
        std::cerr << "warning: " << cfg.name << " produced a non-finite iterate at epoch " << k
                  << "; stopping\n";
        break;
      }
    }
    log.x = s.x;
    log.tuning_increases = tuner.increases();
    log.tuning_decreases = tuner.decreases();
  } else {
    BaselineState b = init_baseline(system, p.y, cfg.step > 0.0 ? cfg.step : 1.0, cfg.seed);
    const bool classical = cfg.method == Method::Sirt || cfg.method == Method::Cav ||
                           cfg.method == Method::Gd || cfg.method == Method::GdBb;
    ClassicalWeights w;
    if (cfg.method == Method::Sirt || cfg.method == Method::Cav) w = classical_weights(system);
    auto shown_step = [&] {
      return (cfg.method == Method::Sirt || cfg.method == Method::Cav) ? cfg.relaxation : b.step;
    };
    log.rows.push_back(make_row(0, 0.0, shown_step(), b.x, p, ledger));
    for (Index k = 1; k <= cfg.epochs; ++k) {
      if (classical) {
        const ClassicalMethod cm = cfg.method == Method::Sirt  ? ClassicalMethod::Sirt
                                   : cfg.method == Method::Cav ? ClassicalMethod::Cav
                                   : cfg.method == Method::Gd  ? ClassicalMethod::Gd
                                                               : ClassicalMethod::GdBb;
        classical_step(cm, b, system, w, cfg.relaxation, &ledger);
      } else if (cfg.method == Method::Sag || cfg.method == Method::Svrg) {
        stochastic_epoch(cfg.method == Method::Sag ? StochasticMethod::Sag : StochasticMethod::Svrg, b,
                         system, f.row_count, &ledger);
      } else {
        prox_step(cfg.method == Method::Ista ? ProxMethod::Ista : ProxMethod::Fista, b, system,
                  cfg.lambda, p.shape, cfg.tv, &ledger);
      }
      log.epochs_run = k;
      const bool ok = finite(b.x);
      if (want_row(k) || !ok) log.rows.push_back(make_row(k, weight * static_cast<double>(k), shown_step(), b.x, p, ledger));
      if (!ok) {
        log.diverged = true;
        std::cerr << "warning: " << cfg.name << " produced a non-finite iterate at epoch " << k
                  << "; stopping\n";
        break;
      }
    }
    log.x = b.x;
  }
  log.totals = ledger.totals();
  return log;
}

RunLog run_experiment(const ExperimentConfig& cfg) {
  const Problem p = build_problem(cfg);
  return run_on_problem(cfg, p);
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string format_csv(const RunLog& log) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : log.rows) {
    out += std::to_string(r.epoch) + ',' + fmt(r.effective_epoch) + ',' + std::to_string(r.block_mults) +
           ',' + (r.ds ? fmt(*r.ds) : std::string()) + ',' + fmt(r.snr) + ',' + fmt(r.gap) + ',' +
           fmt(r.mu) + ',' + std::to_string(r.master_storage) + ',' +
           std::to_string(r.node_storage_peak) + ',' + std::to_string(r.bytes_moved) + '\n';
  }
  return out;
}

std::string svg_chart(const std::vector<double>& xs, const std::vector<double>& ys,
                      const std::string& title, const std::string& x_label,
                      const std::string& y_label, bool log_y) {
  constexpr double width = 640, height = 420, left = 70, right = 20, top = 40, bottom = 50;
  std::vector<double> px, py;
  for (std::size_t k = 0; k < xs.size() && k < ys.size(); ++k) {
    const double v = log_y ? (ys[k] > 0.0 ? std::log10(ys[k]) : std::numeric_limits<double>::quiet_NaN())
                           : ys[k];
    if (std::isfinite(xs[k]) && std::isfinite(v)) {
      px.push_back(xs[k]);
      py.push_back(v);
    }
  }
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title
    << "</text>\n";
  const double pw = width - left - right, ph = height - top - bottom;
  s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  s << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">"
    << x_label << "</text>\n";
  s << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << top + ph / 2 << ")\">" << (log_y ? "log10 " : "") << y_label << "</text>\n";
  if (!px.empty()) {
    const auto [xmin_it, xmax_it] = std::minmax_element(px.begin(), px.end());
    const auto [ymin_it, ymax_it] = std::minmax_element(py.begin(), py.end());
    double x0 = *xmin_it, x1 = *xmax_it, y0 = *ymin_it, y1 = *ymax_it;
    if (x1 == x0) x1 = x0 + 1.0;
    if (y1 == y0) y1 = y0 + 1.0;
    auto sx = [&](double v) { return left + (v - x0) / (x1 - x0) * pw; };
    auto sy = [&](double v) { return top + ph - (v - y0) / (y1 - y0) * ph; };
    s << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < px.size(); ++k) s << sx(px[k]) << ',' << sy(py[k]) << ' ';
    s << "\"/>\n";
    auto label = [&](double v) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4g", v);
      return std::string(buf);
    };
    s << "<text x=\"" << left << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">" << label(x0)
      << "</text>\n";
    s << "<text x=\"" << left + pw << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">"
      << label(x1) << "</text>\n";
    s << "<text x=\"" << left - 4 << "\" y=\"" << top + ph << "\" text-anchor=\"end\">" << label(y0)
      << "</text>\n";
    s << "<text x=\"" << left - 4 << "\" y=\"" << top + 10 << "\" text-anchor=\"end\">" << label(y1)
      << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::vector<std::filesystem::path> write_run_artifacts(const ExperimentConfig& cfg, const RunLog& log,
                                                       const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  const auto csv = dir / (cfg.name + ".csv");
  {
    std::ofstream out(csv, std::ios::binary);
    if (!out) throw Error("cannot write " + csv.string());
    out << format_csv(log);
  }
  written.push_back(csv);

  const Index side = cfg.geometry.volume_side;
  std::vector<Index> dims(cfg.geometry.mode == ScanMode::Fan2D ? 2 : 3, side);
  const auto raw = dir / (cfg.name + "_recon.raw");
  write_raw(raw, log.x, dims);
  written.push_back(raw);

  if (cfg.plots) {
    std::vector<double> xs, ds, snr, gap;
    for (const auto& r : log.rows) {
      xs.push_back(static_cast<double>(r.block_mults));
      ds.push_back(r.ds ? *r.ds : std::numeric_limits<double>::quiet_NaN());
      snr.push_back(r.snr);
      gap.push_back(r.gap);
    }
    const std::vector<std::tuple<std::string, std::vector<double>*, bool>> charts = {
        {"DS", &ds, true}, {"SNR", &snr, false}, {"GAP", &gap, true}};
    for (const auto& [label, values, log_y] : charts) {
      std::string lower = label;
      std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
      const auto path = dir / (cfg.name + "_" + lower + ".svg");
      std::ofstream out(path);
      out << svg_chart(xs, *values, cfg.name + ": " + label, "block multiplications", label, log_y);
      written.push_back(path);
    }
  }
  return written;
}

StepSearch grid_search_step(ExperimentConfig cfg, const Problem& problem,
                            const std::vector<double>& steps) {
  if (steps.empty()) throw Error("grid_search_step: no candidate steps");
  if (problem.x_lsq.size() == 0) throw Error("grid_search_step: the problem has no x_lsq");
  StepSearch out;
  out.steps = steps;
  double best_ds = std::numeric_limits<double>::infinity();
  cfg.metric_period = std::max<Index>(cfg.epochs, 1);
  for (double step : steps) {
    cfg.step = step;
    const RunLog log = run_on_problem(cfg, problem);
    const double ds = log.diverged ? std::numeric_limits<double>::infinity() : (log.x - problem.x_lsq).norm();
    out.final_ds.push_back(ds);
    if (std::isfinite(ds) && ds < best_ds) {
      best_ds = ds;
      out.best = step;
    }
  }
  if (!std::isfinite(best_ds)) throw Error("grid_search_step: every candidate step diverged");
  return out;
}

}  // namespace bsgd
