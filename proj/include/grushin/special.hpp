#pragma once

#include <cstdint>
#include <vector>

#include "grushin/half_int.hpp"

namespace grushin {

// Jacobi polynomial index P_j^{(alpha,beta)}.
struct JacobiIndex {
  int j = 0;
  double alpha = 0.0;
  double beta = 0.0;

  void validate() const;  // throws std::domain_error
};

// Index (d, ell, m) of a profile X^d_{ell,m}: ell in N_d, m in N_{d-1},
// ell >= m + 1/2.  The associated Jacobi degree ell - m - 1/2 is integral.
struct ProfileIndex {
  int d = 2;
  HalfInt ell;
  HalfInt m;

  int jacobi_degree() const { return (ell.twice - m.twice - 1) / 2; }
  void validate() const;  // throws std::domain_error
};

// Value mant * 2^exp2.  Keeps magnitudes representable far outside double
// range (profile seeds near |x|=1 underflow to ~1e-1000 before the ladder
// climbs back to O(1)).
struct ScaledValue {
  double mant = 0.0;
  std::int64_t exp2 = 0;

  double value() const;
  bool is_zero() const { return mant == 0.0; }
  int sign() const { return mant > 0 ? 1 : (mant < 0 ? -1 : 0); }
  long double log_abs() const;  // -inf when zero

  static ScaledValue from_log(int sign, long double log_abs);
};

// P_j^{(alpha,beta)}(x) by the three-term degree recurrence.
double jacobi_eval(const JacobiIndex& idx, double x);

// Same value in scaled form; never overflows for valid indices.
ScaledValue jacobi_scaled(const JacobiIndex& idx, double x);

// c_{ell,m} = sqrt(ell Gamma(ell-m+1/2) Gamma(ell+m+1/2)) / (2^m Gamma(ell+1/2)),
// assembled from log-gamma so it stays finite for ell up to 1e4.
double norm_constant(const ProfileIndex& p);
long double log_norm_constant(const ProfileIndex& p);

// X^d_{ell,m}(psi) = c_{ell,m} (cos psi)^{m-(d-2)/2} P^{(m,m)}_{ell-m-1/2}(sin psi)
// on [-pi/2, pi/2]; the |psi| = pi/2 endpoint takes the continuous limit.
double profile_eval(const ProfileIndex& p, double psi);

// X~^d_{ell,m}(x) = c_{ell,m} (1-x^2)^{m/2-(d-2)/4} P^{(m,m)}_{ell-m-1/2}(x).
double xtilde_eval(const ProfileIndex& p, double x);
ScaledValue xtilde_scaled(const ProfileIndex& p, double x);

// alpha_{ell,m} = sqrt((ell-m+1/2)(ell+m+1/2) / (4 ell (ell+1))) from the
// three-term identity x X~_{ell,m} = alpha_{ell,m} X~_{ell+1,m}
//                                    + alpha_{ell-1,m} X~_{ell-1,m}.
// Returns 0 when ell < m + 1/2 (the ladder boundary).
double recurrence_coeff(const ProfileIndex& p);

// X~^d_{ell,m}(x) for every ell in the chain m+1/2, m+3/2, ..., ell_max,
// produced by the ladder above in O(1) per entry.  Entry t holds the value
// at ell = m + 1/2 + t.
std::vector<ScaledValue> xtilde_ladder(int d, HalfInt m, HalfInt ell_max, double x);

// sum_t coef[t] * X~^d_{m+1/2+t, m}(x) without materializing the ladder.
double xtilde_ladder_dot(int d, HalfInt m, double x, const double* coef, int n);

// Pointwise envelope calibration, one entry per dimension d.
struct EnvelopeCalibration {
  double prefactor = 3.0;
  double c_exp = 0.35;
};

EnvelopeCalibration envelope_calibration(int d);

// Replaces the table entry for d.  Not synchronized: call before any
// parallel section that evaluates envelope_bound.
void set_envelope_calibration(int d, const EnvelopeCalibration& cal);

// Calibrated upper bound for |X~^d_{ell,m}(x)|:
//   prefactor * min( y^{-(d-2)/2} ((1+m)/ell^2 + |y^2-b^2|)^{-1/4},
//                    ell^{(d-1)/2} exp(-c_exp m)  [only when y <= b/(2e)] )
// with y = sqrt(1-x^2), b = m/ell.  regime_epsilon is accepted for
// interface stability but unused: the combined bound needs no regime split.
double envelope_bound(const ProfileIndex& p, double x, double regime_epsilon = 0.0);

}  // namespace grushin
