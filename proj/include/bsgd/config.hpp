#pragma once

#include "bsgd/geometry.hpp"
#include "bsgd/partition.hpp"
#include "bsgd/tuning.hpp"
#include "bsgd/tv.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bsgd {

enum class Method { Bsgd, BsgdIm, BsgdRan, BsgdTv, Sirt, Cav, Gd, GdBb, Sag, Svrg, Ista, Fista };

std::string to_string(Method m);
Method method_from_string(const std::string& text);
bool is_block_method(Method m);  // BSGD and its variants

enum class PhantomKind { SheppLogan, SkullCube };

struct ExperimentConfig {
  std::string name = "run";

  // [geometry]
  GeometryParams geometry;

  // [partition]
  Index row_blocks = 1;
  Index col_blocks = 1;
  Index tiles_per_angle = 1;
  RowGrouping grouping = RowGrouping::Angles;

  // [method]
  Method method = Method::Bsgd;
  double step = 0.0;        // mu0 / fixed step
  double relaxation = 1.0;  // SIRT and CAV

  // [fractions]
  std::optional<Index> node_num;
  double alpha = 1.0;
  double gamma = 1.0;

  // [tuning]
  TuningMode tuning_mode = TuningMode::Off;
  TuningConstants tuning;

  // [tv]
  double lambda = 0.0;
  TvOptions tv;

  // [phantom]
  PhantomKind phantom = PhantomKind::SheppLogan;

  // [noise]
  double snr_db = 0.0;  // +inf for noise-free data
  std::uint64_t noise_seed = 0;

  // [run]
  Index epochs = 0;
  Index metric_period = 1;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
  int threads = 1;
  bool plots = false;
  double lsqr_tol = 1e-12;
  Index lsqr_max_iters = 20000;
  std::optional<std::uint64_t> node_budget;
};

/// Parses the experiment grammar: `[section]` headers, `key = value`
/// lines and `#` comments. Every key must be known for its section.
/// Throws ParseError naming the offending line, or listing the missing
/// required sections / keys.
ExperimentConfig parse_config(const std::string& text);

ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace bsgd
