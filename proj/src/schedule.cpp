#include "scanneal/schedule.hpp"

#include <cmath>

#include "scanneal/errors.hpp"

namespace scanneal {

AnnealingSchedule AnnealingSchedule::exponential(double beta0, double alpha) {
  if (!(beta0 > 0.0) || !std::isfinite(beta0))
    throw InvalidInputError("exponential schedule: beta0 must be positive");
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw InvalidInputError("exponential schedule: alpha must be positive");
  return AnnealingSchedule(Kind::Exponential, beta0, alpha, 0.0);
}

AnnealingSchedule AnnealingSchedule::logarithmic(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw InvalidInputError("logarithmic schedule: gamma must be positive");
  return AnnealingSchedule(Kind::Logarithmic, 0.0, 0.0, gamma);
}

AnnealingSchedule AnnealingSchedule::constant(double beta0) {
  if (!(beta0 > 0.0) || !std::isfinite(beta0))
    throw InvalidInputError("constant schedule: beta0 must be positive");
  return AnnealingSchedule(Kind::Constant, beta0, 0.0, 0.0);
}

double AnnealingSchedule::beta_at(std::uint64_t t) const {
  switch (kind_) {
    case Kind::Exponential:
      return beta0_ * std::exp(alpha_ * static_cast<double>(t));
    case Kind::Logarithmic:
      if (t == 0)
        throw InvalidInputError(
            "logarithmic schedule: beta is undefined at step 0; steps start at 1");
      return std::log(static_cast<double>(t)) / gamma_;
    case Kind::Constant:
      return beta0_;
  }
  return beta0_;  // unreachable
}

std::string AnnealingSchedule::label() const {
  switch (kind_) {
    case Kind::Exponential:
      return "exp(beta0=" + std::to_string(beta0_) +
             ",alpha=" + std::to_string(alpha_) + ")";
    case Kind::Logarithmic:
      return "log(gamma=" + std::to_string(gamma_) + ")";
    case Kind::Constant:
      return "const(beta0=" + std::to_string(beta0_) + ")";
  }
  return "";
}

LogScheduleResult make_log_schedule(const IsingModel& model,
                                    std::span<const double> pinning) {
  const double gamma = gamma_total(model, pinning);  // validates pinning
  if (!std::isfinite(gamma))
    throw InvalidInputError("make_log_schedule: gamma is not finite");

  LogScheduleResult result{AnnealingSchedule::logarithmic(gamma), {}};

  const double threshold = std::max(model.largest_eigenvalue(), 0.0) / 2.0;
  int weak = 0;
  double weakest = threshold;
  for (int x = 0; x < model.num_vertices(); ++x) {
    const double q = pinning[static_cast<std::size_t>(x)];
    if (q < threshold - 1e-12 * std::max(1.0, threshold)) {
      ++weak;
      weakest = std::min(weakest, q);
    }
  }
  if (weak > 0) {
    result.warning = "pinning below half the top eigenvalue (" +
                     std::to_string(threshold) + ") at " + std::to_string(weak) +
                     " of " + std::to_string(model.num_vertices()) +
                     " vertices (weakest " + std::to_string(weakest) +
                     "); equilibrium convergence of the parallel chain is not "
                     "guaranteed";
  }
  return result;
}

}  // namespace scanneal
