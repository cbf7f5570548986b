#include "bsgd/experiment.hpp"
#include "bsgd/phantom.hpp"
#include "bsgd/raw_io.hpp"

#include "instances.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bsgd;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.name = "unit";
  c.geometry = bsgd::testing::fan_params(8, 12, 30.0);
  c.row_blocks = 4;
  c.col_blocks = 2;
  c.method = Method::Bsgd;
  c.step = 5e-3;
  c.alpha = 0.5;
  c.gamma = 0.5;
  c.snr_db = 30.0;
  c.noise_seed = 3;
  c.epochs = 40;
  c.metric_period = 15;
  c.seed = 9;
  c.tuning.period = 4;
  return c;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Experiment, ProblemPieces) {
  const ExperimentConfig c = small_config();
  const Problem p = build_problem(c);
  EXPECT_EQ(p.x_true, shepp_logan(8, 2));
  EXPECT_LE((p.y_clean - p.system->forward(p.x_true)).norm(), 1e-12 * p.y_clean.norm());
  EXPECT_NEAR(snr_db(p.y_clean, p.y - p.y_clean), 30.0, 1e-9);
  EXPECT_TRUE(p.lsq_converged);
  EXPECT_EQ(build_problem(c, false).x_lsq.size(), 0);
}

TEST(Experiment, EffectiveEpochWeights) {
  ExperimentConfig c = small_config();
  const auto f = config_fractions(c);
  EXPECT_EQ(f.row_count, 2);
  EXPECT_EQ(f.col_count, 1);
  EXPECT_DOUBLE_EQ(effective_epoch_weight(c, f), 0.25);
  c.method = Method::BsgdIm;
  c.tiles_per_angle = 4;
  EXPECT_DOUBLE_EQ(effective_epoch_weight(c, f), 0.0625);
  c.method = Method::Sag;
  EXPECT_DOUBLE_EQ(effective_epoch_weight(c, f), 0.5);
  c.method = Method::Svrg;
  EXPECT_DOUBLE_EQ(effective_epoch_weight(c, f), 0.25);
  c.method = Method::Gd;
  EXPECT_DOUBLE_EQ(effective_epoch_weight(c, f), 1.0);
  c.node_num = 2;
  const auto g = config_fractions(c);
  EXPECT_EQ(g.row_count * g.col_count, 2);
}

TEST(Experiment, CsvRowsAndFormat) {
  const ExperimentConfig c = small_config();
  const RunLog log = run_experiment(c);
  std::vector<Index> epochs;
  for (const auto& r : log.rows) epochs.push_back(r.epoch);
  EXPECT_EQ(epochs, (std::vector<Index>{0, 15, 30, 40}));
  EXPECT_FALSE(log.diverged);
  EXPECT_EQ(log.totals.block_mults, 40u * 2u * 2u);
  EXPECT_EQ(log.rows.back().block_mults, log.totals.block_mults);
  EXPECT_DOUBLE_EQ(log.rows.back().effective_epoch, 10.0);
  const auto csv = lines(format_csv(log));
  ASSERT_EQ(csv.size(), 5u);
  EXPECT_EQ(csv[0], kCsvHeader);
  EXPECT_EQ(std::count(csv[1].begin(), csv[1].end(), ','), 9);
  EXPECT_EQ(csv[1].substr(0, 6), "0,0,0,");
  EXPECT_EQ(format_csv(run_experiment(c)), format_csv(log));
}

TEST(Experiment, ThreadsDoNotChangeCsv) {
  ExperimentConfig c = small_config();
  const std::string one = format_csv(run_experiment(c));
  c.threads = 4;
  EXPECT_EQ(format_csv(run_experiment(c)), one);
}

TEST(Experiment, DivergenceStopsTheRun) {
  ExperimentConfig c = small_config();
  c.step = 10.0;
  c.epochs = 2000;
  c.metric_period = 500;
  const RunLog log = run_experiment(c);
  EXPECT_TRUE(log.diverged);
  EXPECT_LT(log.epochs_run, 2000);
  EXPECT_EQ(log.rows.back().epoch, log.epochs_run);
  EXPECT_FALSE(log.x.allFinite());
}

TEST(Experiment, BaselinesRun) {
  for (Method m : {Method::Sirt, Method::Cav, Method::Gd, Method::GdBb, Method::Sag, Method::Svrg,
                   Method::Ista, Method::Fista, Method::BsgdTv, Method::BsgdRan}) {
    ExperimentConfig c = small_config();
    c.method = m;
    c.step = 1e-3;
    c.lambda = 0.1;
    c.epochs = 10;
    c.metric_period = 5;
    if (m == Method::BsgdRan) c.tiles_per_angle = 3;
    const RunLog log = run_experiment(c);
    EXPECT_FALSE(log.diverged) << to_string(m);
    EXPECT_GT(log.rows.back().snr, log.rows.front().snr) << to_string(m);
  }
}

TEST(Experiment, NodeBudgetIsEnforced) {
  ExperimentConfig c = small_config();
  c.node_budget = 10;
  EXPECT_THROW(run_experiment(c), InvalidPartition);
}

TEST(Experiment, ArtifactsWritten) {
  ExperimentConfig c = small_config();
  c.plots = true;
  const auto dir = std::filesystem::temp_directory_path() / "bsgd_experiment_artifacts";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const RunLog log = run_experiment(c);
  const auto paths = write_run_artifacts(c, log, dir);
  EXPECT_EQ(paths.size(), 5u);
  for (const auto& p : paths) EXPECT_TRUE(std::filesystem::exists(p)) << p;
  const RawImage img = read_raw(dir / "unit_recon.raw");
  EXPECT_EQ(img.dims, (std::vector<Index>{8, 8}));
  EXPECT_LE((img.values - log.x).cwiseAbs().maxCoeff(), 1e-6 * (1.0 + log.x.cwiseAbs().maxCoeff()));
  std::ifstream svg(dir / "unit_snr.svg");
  std::string first;
  std::getline(svg, first);
  EXPECT_EQ(first.rfind("<svg", 0), 0u);
  std::filesystem::remove_all(dir);
}

TEST(Experiment, GridSearchPicksSmallestDistance) {
  ExperimentConfig c = small_config();
  c.epochs = 200;
  const Problem p = build_problem(c);
  const StepSearch s = grid_search_step(c, p, {1e-4, 1e-3, 5e-3});
  ASSERT_EQ(s.final_ds.size(), 3u);
  const auto best = std::min_element(s.final_ds.begin(), s.final_ds.end()) - s.final_ds.begin();
  EXPECT_EQ(s.best, s.steps[static_cast<std::size_t>(best)]);
}
