#ifndef SCANNEAL_SCHEDULE_HPP
#define SCANNEAL_SCHEDULE_HPP

#include <cstdint>
#include <span>
#include <string>

#include "scanneal/ising_model.hpp"

namespace scanneal {

// Inverse-temperature schedule beta_t. Small value type.
class AnnealingSchedule {
 public:
  enum class Kind { Exponential, Logarithmic, Constant };

  // beta_t = beta0 * exp(alpha * t), defined from t = 0.
  static AnnealingSchedule exponential(double beta0, double alpha);
  // beta_t = log(t) / gamma, defined from t = 1.
  static AnnealingSchedule logarithmic(double gamma);
  // beta_t = beta0 for all t.
  static AnnealingSchedule constant(double beta0);

  AnnealingSchedule() : AnnealingSchedule(constant(1.0)) {}

  Kind kind() const { return kind_; }
  double beta0() const { return beta0_; }
  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }

  // Earliest step index at which beta_at is defined.
  std::uint64_t first_step() const {
    return kind_ == Kind::Logarithmic ? 1 : 0;
  }

  double beta_at(std::uint64_t t) const;

  std::string label() const;

 private:
  AnnealingSchedule(Kind kind, double beta0, double alpha, double gamma)
      : kind_(kind), beta0_(beta0), alpha_(alpha), gamma_(gamma) {}

  Kind kind_ = Kind::Constant;
  double beta0_ = 1.0;
  double alpha_ = 0.0;
  double gamma_ = 0.0;
};

struct LogScheduleResult {
  AnnealingSchedule schedule;
  // Empty when the pinning is strong enough for guaranteed convergence;
  // otherwise a human-readable description of which vertices fall short.
  std::string warning;
};

// Logarithmic schedule from the model's total pinned interaction strength.
// Pinning below largest_eigenvalue()/2 at any vertex produces a warning,
// not an error.
LogScheduleResult make_log_schedule(const IsingModel& model,
                                    std::span<const double> pinning);

}  // namespace scanneal

#endif
