#include "bsgd/cluster.hpp"
#include "bsgd/config.hpp"
#include "bsgd/experiment.hpp"
#include "bsgd/fixedpoint.hpp"
#include "bsgd/raw_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;

namespace {

fs::path output_dir(const bsgd::ExperimentConfig& cfg) {
  if (const char* env = std::getenv("BSGD_OUTPUT_DIR"); env && *env) return fs::path(env);
  return cfg.output_dir;
}

bsgd::ExperimentConfig load(const fs::path& path, int threads) {
  bsgd::ExperimentConfig cfg = bsgd::load_config(path);
  if (threads > 0) cfg.threads = threads;
  return cfg;
}

void run_one(const fs::path& path, int threads) {
  const bsgd::ExperimentConfig cfg = load(path, threads);
  const bsgd::RunLog log = bsgd::run_experiment(cfg);
  const auto dir = output_dir(cfg);
  for (const auto& p : bsgd::write_run_artifacts(cfg, log, dir)) std::cout << "wrote " << p.string() << "\n";
  const auto& last = log.rows.back();
  std::cout << cfg.name << ": epochs " << log.epochs_run << ", block_mults " << last.block_mults;
  if (last.ds) std::cout << ", DS " << *last.ds;
  std::cout << ", SNR " << last.snr << " dB, GAP " << last.gap << (log.diverged ? " (diverged)" : "")
            << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block stochastic gradient descent CT reconstruction"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Override the configured worker thread count");

  fs::path run_cfg;
  auto* run = app.add_subcommand("run", "Run one experiment config");
  run->add_option("config", run_cfg, "Config file")->required()->check(CLI::ExistingFile);

  fs::path sweep_dir;
  auto* sweep = app.add_subcommand("sweep", "Run every .cfg file in a directory, in name order");
  sweep->add_option("config-dir", sweep_dir, "Directory of configs")->required()->check(CLI::ExistingDirectory);

  fs::path fp_cfg;
  bsgd::Index trials = 100;
  double fp_mu = 0.0;
  std::uint64_t fp_seed = 1;
  double fp_delta = 1e-3;
  auto* fixed = app.add_subcommand("fixedpoint", "Check stationarity of the least-squares state");
  fixed->add_option("config", fp_cfg, "Config file")->required()->check(CLI::ExistingFile);
  fixed->add_option("--trials", trials, "Random masks per mask family")->check(CLI::PositiveNumber);
  fixed->add_option("--mu", fp_mu, "Step length (default: the config step)");
  fixed->add_option("--seed", fp_seed, "Mask seed");
  fixed->add_option("--perturbation", fp_delta, "Norm of the perturbation of the lifted state");

  fs::path oracle_cfg;
  auto* oracle = app.add_subcommand("oracle", "Solve for x_lsq and store it next to the run outputs");
  oracle->add_option("config", oracle_cfg, "Config file")->required()->check(CLI::ExistingFile);

  fs::path grid_cfg;
  std::vector<double> grid_steps;
  auto* grid = app.add_subcommand("grid", "Pick the step with the smallest final DS");
  grid->add_option("config", grid_cfg, "Config file")->required()->check(CLI::ExistingFile);
  grid->add_option("--steps", grid_steps, "Candidate steps")->required();

  fs::path storage_cfg;
  std::uint64_t budget = 140;
  bsgd::Index max_m = 512, max_n = 64;
  auto* storage = app.add_subcommand("storage-sweep", "List partitions meeting a per-node float budget");
  storage->add_option("config", storage_cfg, "Config file")->required()->check(CLI::ExistingFile);
  storage->add_option("--budget", budget, "Floats per node (m + n)");
  storage->add_option("--max-row-blocks", max_m, "Largest M examined");
  storage->add_option("--max-col-blocks", max_n, "Largest N examined");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      run_one(run_cfg, threads);
    } else if (*sweep) {
      std::vector<fs::path> configs;
      for (const auto& e : fs::directory_iterator(sweep_dir))
        if (e.is_regular_file() && e.path().extension() == ".cfg") configs.push_back(e.path());
      std::sort(configs.begin(), configs.end());
      if (configs.empty()) throw bsgd::Error("no .cfg files in " + sweep_dir.string());
      for (const auto& c : configs) run_one(c, threads);
    } else if (*fixed) {
      const bsgd::ExperimentConfig cfg = load(fp_cfg, threads);
      const bsgd::Problem p = bsgd::build_problem(cfg);
      const double mu = fp_mu > 0.0 ? fp_mu : cfg.step;
      if (!(mu > 0.0)) throw bsgd::Error("fixedpoint needs a positive --mu or config step");
      const auto rep = bsgd::verify_fixed_point(*p.system, p.y, p.x_lsq, mu, trials, fp_seed, fp_delta);
      const auto dir = output_dir(cfg);
      fs::create_directories(dir);
      const auto path = dir / (cfg.name + "_fixedpoint.txt");
      std::ofstream(path) << rep.to_text();
      std::cout << rep.to_text() << "wrote " << path.string() << "\n";
    } else if (*oracle) {
      const bsgd::ExperimentConfig cfg = load(oracle_cfg, threads);
      const bsgd::Problem p = bsgd::build_problem(cfg);
      const auto dir = output_dir(cfg);
      fs::create_directories(dir);
      const auto path = dir / (cfg.name + "_xlsq.raw");
      std::vector<bsgd::Index> dims(p.shape.ndim, p.shape.side);
      bsgd::write_raw(path, p.x_lsq, dims);
      std::cout << "x_lsq norm " << p.x_lsq.norm() << (p.lsq_converged ? "" : " (not converged)")
                << "\nwrote " << path.string() << "\n";
    } else if (*grid) {
      const bsgd::ExperimentConfig cfg = load(grid_cfg, threads);
      const bsgd::Problem p = bsgd::build_problem(cfg);
      const auto res = bsgd::grid_search_step(cfg, p, grid_steps);
      for (std::size_t k = 0; k < res.steps.size(); ++k)
        std::cout << "step " << res.steps[k] << " final DS " << res.final_ds[k] << "\n";
      std::cout << "best " << res.best << "\n";
    } else if (*storage) {
      const bsgd::ExperimentConfig cfg = load(storage_cfg, threads);
      const bsgd::Geometry geom = bsgd::build_geometry(cfg.geometry);
      const auto sw = bsgd::storage_sweep(geom.ray_count(), geom.volume_side(), geom.ndim(), budget, max_m, max_n);
      std::cout << "M,N,m,n,node_floats,master_floats,master_floats_alt,within_budget\n";
      for (const auto& c : sw.candidates)
        std::cout << c.row_blocks << ',' << c.col_blocks << ',' << c.max_block_rows << ','
                  << c.max_block_cols << ',' << c.node_floats << ',' << c.master_floats << ','
                  << c.master_floats_alt << ',' << (c.within_budget ? "yes" : "no") << "\n";
      if (sw.best)
        std::cout << "best M=" << sw.best->row_blocks << " N=" << sw.best->col_blocks << "\n";
      else
        std::cout << "no partition meets the budget\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
