#pragma once

#include <stdexcept>

#include "bdisim/des.hpp"

namespace bdisim::dist {

class DistributionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solves the Weibull shape k such that the coefficient of variation
/// sqrt(Gamma(1+2/k)/Gamma(1+1/k)^2 - 1) equals cv. Throws when cv is
/// outside the solvable range.
double weibull_shape_from_cv(double cv);

/// Weibull scale giving the requested mean for a fixed shape.
double weibull_scale_for_mean(double mean, double shape);

/// Time distribution governing when the next occurrence of a recurring
/// event happens.
///
/// Variants:
///  - Exponential(rate):     now + Exp(rate) draw
///  - Weibull(shape, scale): now + Weibull draw
///  - InverseWeibull:        draws a frequency from a Weibull and uses the
///                           reciprocal as the interval
///  - Constant(interval):    now + interval, deterministic
///  - DiracComb(start, period): the smallest start + n*period strictly
///                           after now, phase-locked to the comb
///  - Asap:                  now (zero simulated delay)
class TimeDistribution {
 public:
  enum class Kind { Exponential, Weibull, InverseWeibull, Constant, DiracComb, Asap };

  static TimeDistribution exponential(double rate);
  static TimeDistribution weibull(double shape, double scale);
  static TimeDistribution dirac_comb(double start, double period);
  static TimeDistribution constant(double interval);
  static TimeDistribution asap();

  /// Weibull with the requested interval moments, solved on the coefficient
  /// of variation to 1e-6 relative accuracy. sd == 0 degenerates to a
  /// constant interval of length `mean`.
  static TimeDistribution from_moments(double mean, double sd);

  /// Samples a frequency from a Weibull with the requested moments and uses
  /// its reciprocal as the interval. sd == 0 degenerates to a constant
  /// interval of 1/mean.
  static TimeDistribution from_frequency_moments(double mean_freq, double sd_freq);

  des::SimTime next_occurrence(des::SimTime now, des::RngStream& rng) const;

  Kind kind() const { return kind_; }
  bool is_asap() const { return kind_ == Kind::Asap; }
  double param_a() const { return a_; }  // rate / shape / interval / start
  double param_b() const { return b_; }  // scale / period

 private:
  TimeDistribution(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  Kind kind_;
  double a_;
  double b_;
};

}  // namespace bdisim::dist
