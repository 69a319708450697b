#include "bdisim/timedist.hpp"

#include <cmath>

namespace bdisim::dist {

namespace {

double weibull_cv(double k) {
  // CV^2 = Gamma(1+2/k) / Gamma(1+1/k)^2 - 1, computed in log space.
  double lg2 = std::lgamma(1.0 + 2.0 / k);
  double lg1 = std::lgamma(1.0 + 1.0 / k);
  return std::sqrt(std::exp(lg2 - 2.0 * lg1) - 1.0);
}

}  // namespace

double weibull_shape_from_cv(double cv) {
  if (cv <= 0) throw DistributionError("weibull cv must be positive");
  // CV is strictly decreasing in k. Bracket, then bisect.
  double lo = 1e-2, hi = 1e4;
  if (cv > weibull_cv(lo) || cv < weibull_cv(hi)) {
    throw DistributionError("weibull cv outside the solvable shape range");
  }
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (weibull_cv(mid) > cv) {
      lo = mid;
    } else {
      hi = mid;
    }
    if ((hi - lo) / hi < 1e-13) break;
  }
  return 0.5 * (lo + hi);
}

double weibull_scale_for_mean(double mean, double shape) {
  return mean / std::exp(std::lgamma(1.0 + 1.0 / shape));
}

TimeDistribution TimeDistribution::exponential(double rate) {
  if (!(rate > 0)) throw DistributionError("exponential rate must be positive");
  return TimeDistribution(Kind::Exponential, rate, 0);
}

TimeDistribution TimeDistribution::weibull(double shape, double scale) {
  if (!(shape > 0) || !(scale > 0)) {
    throw DistributionError("weibull shape and scale must be positive");
  }
  return TimeDistribution(Kind::Weibull, shape, scale);
}

TimeDistribution TimeDistribution::dirac_comb(double start, double period) {
  if (!(start >= 0)) throw DistributionError("dirac comb start must be >= 0");
  if (!(period > 0)) throw DistributionError("dirac comb period must be positive");
  return TimeDistribution(Kind::DiracComb, start, period);
}

TimeDistribution TimeDistribution::constant(double interval) {
  if (!(interval > 0)) throw DistributionError("constant interval must be positive");
  return TimeDistribution(Kind::Constant, interval, 0);
}

TimeDistribution TimeDistribution::asap() {
  return TimeDistribution(Kind::Asap, 0, 0);
}

TimeDistribution TimeDistribution::from_moments(double mean, double sd) {
  if (!(mean > 0)) throw DistributionError("mean must be positive");
  if (sd < 0) throw DistributionError("sd must be non-negative");
  if (sd == 0) return constant(mean);
  double k = weibull_shape_from_cv(sd / mean);
  return weibull(k, weibull_scale_for_mean(mean, k));
}

TimeDistribution TimeDistribution::from_frequency_moments(double mean_freq,
                                                          double sd_freq) {
  if (!(mean_freq > 0)) throw DistributionError("mean frequency must be positive");
  if (sd_freq < 0) throw DistributionError("frequency sd must be non-negative");
  if (sd_freq == 0) return constant(1.0 / mean_freq);
  double k = weibull_shape_from_cv(sd_freq / mean_freq);
  return TimeDistribution(Kind::InverseWeibull, k,
                          weibull_scale_for_mean(mean_freq, k));
}

des::SimTime TimeDistribution::next_occurrence(des::SimTime now,
                                               des::RngStream& rng) const {
  switch (kind_) {
    case Kind::Exponential:
      return now + rng.next_exponential(a_);
    case Kind::Weibull:
      return now + rng.next_weibull(a_, b_);
    case Kind::InverseWeibull: {
      double freq = rng.next_weibull(a_, b_);
      return now + 1.0 / freq;
    }
    case Kind::Constant:
      return now + a_;
    case Kind::DiracComb: {
      // Smallest start + n*period strictly greater than now, phase-exact.
      if (now < a_ - des::kTimeEpsilon) return a_;
      double n = std::floor((now - a_) / b_ + des::kTimeEpsilon) + 1.0;
      return a_ + n * b_;
    }
    case Kind::Asap:
      return now;
  }
  throw DistributionError("unreachable distribution kind");
}

}  // namespace bdisim::dist
