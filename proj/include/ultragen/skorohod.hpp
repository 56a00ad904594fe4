#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "ultragen/profile_path.hpp"

namespace ultragen {

// Strictly increasing piecewise-linear time change through matched jump
// pairs, pinned at 0 and extended with slope 1 beyond the last anchor.
class TimeChange {
 public:
  // anchors: strictly increasing in both coordinates, excluding (0,0).
  explicit TimeChange(std::vector<std::pair<double, double>> anchors);

  double operator()(double t) const;
  double inverse(double s) const;
  // Max |log slope| over the linear pieces.
  double gamma() const { return gamma_; }
  const std::vector<std::pair<double, double>>& anchors() const { return anchors_; }

 private:
  std::vector<std::pair<double, double>> anchors_;  // includes (0,0)
  double gamma_ = 0.0;
};

struct SkorohodResult {
  double value = 0.0;           // best achieved dSK (upper bound on the infimum)
  double identity_value = 0.0;  // objective of the identity time change
  double seq_term = 0.0;        // best l1 term
  double max_term = 0.0;        // best sup term
  double gamma_seq = 0.0;       // gamma of the minimizing lambda per term
  double gamma_max = 0.0;
  std::vector<std::pair<double, double>> matching_seq;  // anchors of the best lambda
  std::vector<std::pair<double, double>> matching_max;

  double gap() const { return identity_value - value; }
};

struct SkorohodOptions {
  int quad_points = 257;   // quadrature budget per weight integral
  double quad_tol = 1e-9;  // absolute quadrature tolerance
  std::size_t max_jumps = 4096;
};

// Upper-bound evaluation of the two-term Skorohod metric
//   dSK(f,g) = inf_l [gamma(l) v I1(l)] + inf_l [gamma(l) v I2(l)],
//   I1(l) = int e^{-u-1/u} rho1(u) du,  I2(l) = int e^{-u} rho2(u) du,
//   rho_i(u) = sup_t d_i(f(t^u), g(l(t)^u)) ^ 1,
// over piecewise-linear time changes anchored at monotone matchings of the
// two jump sets; the infimum per term is taken over a DP-selected candidate
// list that always contains the identity.
SkorohodResult skorohod_distance(const ProfilePath& f, const ProfilePath& g,
                                 const SkorohodOptions& opts = {});

// Objective of one explicit time change (used for brackets and tests).
std::pair<double, double> skorohod_objective(const ProfilePath& f, const ProfilePath& g,
                                             const TimeChange& lambda,
                                             const SkorohodOptions& opts = {});

// Adaptive Simpson quadrature on [a, b] (exposed for test oracles).
double adaptive_simpson(const std::function<double(double)>& fn, double a, double b,
                        double tol, int max_depth);

}  // namespace ultragen
