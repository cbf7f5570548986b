#pragma once

#include "bsgd/common.hpp"
#include "bsgd/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bsgd {

enum class TuningMode {
  Off,
  Residual,          // criterion 1 only: shrink whenever ||r|| rose twice
  ResidualAndAngle,  // criteria 1 and 2: also require an EUD angle signal
};

TuningMode tuning_mode_from_string(const std::string& text);
std::string to_string(TuningMode mode);

struct TuningConstants {
  double epsilon = 0.05;  // relative increase
  double delta = 0.4;     // relative decrease
  double t1 = 0.5;        // jump threshold on consecutive EUD cosines
  double t2 = 0.0;        // floor on the EUD cosine
  Index period = 1;       // epochs between checks (M)

  void validate() const;
};

/// Residual norms at checkpoints k, k - period, k - 2 period and the EUD
/// cosines at k and k - period (absent when undefined).
struct TuningInputs {
  double r_now = 0.0;
  double r_prev = 0.0;
  double r_prev2 = 0.0;
  std::optional<double> theta;
  std::optional<double> theta_prev;
};

enum class TuningAction { Hold, Increase, Decrease };

struct TuningDecision {
  double mu;
  TuningAction action;
};

/// One step-length decision at a checkpoint past the first period.
TuningDecision tune_step(double mu, const TuningConstants& c, TuningMode mode,
                         const TuningInputs& in);

/// Tracks effective update directions and residual norms across epochs and
/// adjusts the solver's step length at every checkpoint (epoch k with
/// k mod period == 0, k > period).
class StepTuner {
 public:
  StepTuner(TuningConstants constants, TuningMode mode, Index image_size);

  /// Call once after every solver epoch.
  void after_epoch(SolverState& s);

  const std::vector<double>& checkpoint_residuals() const { return r_norms_; }
  const std::vector<std::optional<double>>& checkpoint_cosines() const { return thetas_; }
  Index increases() const { return increases_; }
  Index decreases() const { return decreases_; }

 private:
  TuningConstants c_;
  TuningMode mode_;
  Vec eud_;
  Vec prev_eud_;
  bool have_prev_eud_ = false;
  std::vector<double> r_norms_;
  std::vector<std::optional<double>> thetas_;
  Index increases_ = 0;
  Index decreases_ = 0;
};

}  // namespace bsgd
