#include "bsgd/tuning.hpp"

#include <cmath>
#include <iostream>

namespace bsgd {

TuningMode tuning_mode_from_string(const std::string& text) {
  if (text == "off") return TuningMode::Off;
  if (text == "c1") return TuningMode::Residual;
  if (text == "c1c2") return TuningMode::ResidualAndAngle;
  throw Error("unknown tuning mode '" + text + "' (expected off, c1 or c1c2)");
}

std::string to_string(TuningMode mode) {
  switch (mode) {
    case TuningMode::Off: return "off";
    case TuningMode::Residual: return "c1";
    case TuningMode::ResidualAndAngle: return "c1c2";
  }
  return "off";
}

void TuningConstants::validate() const {
  if (!(epsilon > 0.0)) throw Error("tuning: epsilon must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw Error("tuning: delta must lie in (0, 1)");
  if (period < 1) throw Error("tuning: period must be >= 1");
}

TuningDecision tune_step(double mu, const TuningConstants& c, TuningMode mode,
                         const TuningInputs& in) {
  if (mode == TuningMode::Off) return {mu, TuningAction::Hold};
  if (in.r_now < in.r_prev && in.r_prev < in.r_prev2)
    return {(1.0 + c.epsilon) * mu, TuningAction::Increase};
  if (in.r_now > in.r_prev && in.r_prev > in.r_prev2) {
    if (mode == TuningMode::Residual) return {(1.0 - c.delta) * mu, TuningAction::Decrease};
    if (!in.theta) return {mu, TuningAction::Hold};
    const bool jump = in.theta_prev && std::abs(*in.theta - *in.theta_prev) > c.t1;
    if (jump || *in.theta < c.t2) return {(1.0 - c.delta) * mu, TuningAction::Decrease};
  }
  return {mu, TuningAction::Hold};
}

StepTuner::StepTuner(TuningConstants constants, TuningMode mode, Index image_size)
    : c_(constants), mode_(mode), eud_(Vec::Zero(image_size)), prev_eud_(Vec::Zero(image_size)) {
  c_.validate();
}

void StepTuner::after_epoch(SolverState& s) {
  if (mode_ == TuningMode::Off) return;
  if (r_norms_.empty()) {
    // Checkpoint k = 0: r = y before the first epoch.
    r_norms_.push_back(s.y.norm());
    thetas_.push_back(std::nullopt);
  }
  eud_ += s.g;
  if (s.epoch % c_.period != 0) return;

  std::optional<double> theta;
  if (have_prev_eud_) {
    const double denom = eud_.norm() * prev_eud_.norm();
    if (denom > 0.0) {
      theta = eud_.dot(prev_eud_) / denom;
    } else {
      std::cerr << "warning: zero effective update direction at epoch " << s.epoch
                << "; angle criterion skipped\n";
    }
  }
  thetas_.push_back(theta);
  r_norms_.push_back(s.r.norm());
  prev_eud_ = eud_;
  have_prev_eud_ = true;
  eud_.setZero();

  if (r_norms_.size() < 3) return;
  const std::size_t n = r_norms_.size();
  TuningInputs in;
  in.r_now = r_norms_[n - 1];
  in.r_prev = r_norms_[n - 2];
  in.r_prev2 = r_norms_[n - 3];
  in.theta = thetas_[n - 1];
  in.theta_prev = thetas_[n - 2];
  const TuningDecision d = tune_step(s.mu, c_, mode_, in);
  if (d.action == TuningAction::Increase) ++increases_;
  if (d.action == TuningAction::Decrease) ++decreases_;
  s.mu = d.mu;
}

}  // namespace bsgd
