#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qualsim::elo {

class ScalingParam {
 public:
  static constexpr double kDefault = 400.0;

  ScalingParam() = default;
  explicit ScalingParam(double s) : s_(s) {
    if (!(s > 0.0) || !std::isfinite(s)) throw std::domain_error("Elo scaling parameter must be positive");
  }
  double value() const { return s_; }

 private:
  double s_ = kDefault;
};

// Logistic in base 10 with the rating gap stretched by `weight`.
template <typename Scalar>
Scalar advance_probability(Scalar elo_i, Scalar elo_j, ScalingParam s, Scalar weight) {
  using std::pow;
  const Scalar d = elo_i - elo_j;
  return Scalar(1) / (Scalar(1) + pow(Scalar(10), -weight * d / Scalar(s.value())));
}

// Single match, e.g. the preliminary-round semi-finals and final.
template <typename Scalar>
Scalar win_prob_one_leg(Scalar elo_i, Scalar elo_j, ScalingParam s = {}) {
  return advance_probability(elo_i, elo_j, s, Scalar(1));
}

// Home-and-away tie decided on aggregate: the rating gap counts sqrt(2) times.
template <typename Scalar>
Scalar win_prob_two_leg(Scalar elo_i, Scalar elo_j, ScalingParam s = {}) {
  return advance_probability(elo_i, elo_j, s, Scalar(std::numbers::sqrt2));
}

}  // namespace qualsim::elo
