#pragma once

#include "bsgd/block_system.hpp"
#include "bsgd/cluster.hpp"
#include "bsgd/config.hpp"
#include "bsgd/partition.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace bsgd {

/// Everything derived from a config before any solver runs.
struct Problem {
  std::unique_ptr<BlockSystem> system;
  ImageShape shape;
  Vec x_true;
  Vec y_clean;
  Vec y;
  Vec x_lsq;  // empty when not computed
  bool lsq_converged = false;
};

/// Builds geometry, partition, phantom and noisy data; solves for x_lsq
/// when `with_lsq` is set.
Problem build_problem(const ExperimentConfig& cfg, bool with_lsq = true);

/// Per-epoch sampling fractions implied by the config (node_num wins).
SamplingFractions config_fractions(const ExperimentConfig& cfg);

/// One CSV row.
struct RunRow {
  Index epoch = 0;
  double effective_epoch = 0.0;
  std::uint64_t block_mults = 0;
  std::optional<double> ds;
  double snr = 0.0;
  double gap = 0.0;
  double mu = 0.0;
  std::uint64_t master_storage = 0;
  std::uint64_t node_storage_peak = 0;
  std::uint64_t bytes_moved = 0;
};

struct RunLog {
  std::string name;
  std::vector<RunRow> rows;
  Vec x;
  LedgerTotals totals;
  Index epochs_run = 0;
  bool diverged = false;  // stopped early on a non-finite iterate
  Index tuning_increases = 0;
  Index tuning_decreases = 0;
};

/// Effective epochs contributed by one epoch of the configured method.
double effective_epoch_weight(const ExperimentConfig& cfg, const SamplingFractions& f);

/// Runs the configured method on a prepared problem.
RunLog run_on_problem(const ExperimentConfig& cfg, const Problem& problem);

/// Builds the problem and runs it.
RunLog run_experiment(const ExperimentConfig& cfg);

inline constexpr const char* kCsvHeader =
    "epoch,effective_epoch,block_mults,DS,SNR,GAP,mu,master_storage,node_storage_peak,bytes_moved";

/// CSV text with kCsvHeader and one line per row, doubles printed with
/// 17 significant digits.
std::string format_csv(const RunLog& log);

/// Writes <name>.csv, <name>_recon.raw and, when cfg.plots, the SVG charts
/// into `dir`. Returns the paths written.
std::vector<std::filesystem::path> write_run_artifacts(const ExperimentConfig& cfg, const RunLog& log,
                                                       const std::filesystem::path& dir);

/// Line chart of one metric against block multiplications. `log_y` plots
/// log10 of the values.
std::string svg_chart(const std::vector<double>& xs, const std::vector<double>& ys,
                      const std::string& title, const std::string& x_label,
                      const std::string& y_label, bool log_y);

/// Final DS after `cfg.epochs` for each candidate step; returns the step
/// with the smallest finite final DS (ties keep the earlier candidate).
struct StepSearch {
  std::vector<double> steps;
  std::vector<double> final_ds;
  double best = 0.0;
};
StepSearch grid_search_step(ExperimentConfig cfg, const Problem& problem,
                            const std::vector<double>& steps);

}  // namespace bsgd
