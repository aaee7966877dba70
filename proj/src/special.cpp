#include "grushin/special.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace grushin {

namespace {

constexpr long double kLn2 = 0.6931471805599453094172321214581766L;

// Pair renormalization bounds for the scaled recurrences.
constexpr double kHuge = 0x1p500;
constexpr double kTiny = 0x1p-500;

void renorm_pair(double& a, double& b, std::int64_t& e) {
  double mag = std::max(std::fabs(a), std::fabs(b));
  if (mag > kHuge) {
    a *= 0x1p-512;
    b *= 0x1p-512;
    e += 512;
  } else if (mag < kTiny && mag > 0.0) {
    a *= 0x1p512;
    b *= 0x1p512;
    e -= 512;
  }
}

// sign * exp(log_abs) split into mantissa in [1,2) and a power of two.
ScaledValue scaled_from_log(int sign, long double log_abs) {
  if (sign == 0) return {};
  long double e2 = std::floor(log_abs / kLn2);
  if (e2 < -4.0e18L) return {};  // far below any representable magnitude
  double mant = static_cast<double>(std::exp(log_abs - e2 * kLn2));
  return {sign > 0 ? mant : -mant, static_cast<std::int64_t>(e2)};
}

}  // namespace

void JacobiIndex::validate() const {
  if (j < 0) throw std::domain_error("jacobi degree must be >= 0, got " + std::to_string(j));
  if (!(alpha > -1.0) || !(beta > -1.0)) {
    throw std::domain_error("jacobi parameters must be > -1, got alpha=" +
                            std::to_string(alpha) + " beta=" + std::to_string(beta));
  }
}

void ProfileIndex::validate() const {
  if (d < 2) throw std::domain_error("profile dimension must be >= 2, got " + std::to_string(d));
  require_lattice(m, d - 1, "m");
  require_lattice(ell, d, "ell");
  if (ell.twice < m.twice + 1) {
    throw std::domain_error("profile index needs ell >= m + 1/2, got ell=" + ell.str() +
                            " m=" + m.str());
  }
}

double ScaledValue::value() const {
  if (mant == 0.0) return 0.0;
  if (exp2 > 1100) return mant > 0 ? std::numeric_limits<double>::infinity()
                                   : -std::numeric_limits<double>::infinity();
  if (exp2 < -1200) return 0.0;
  return std::ldexp(mant, static_cast<int>(exp2));
}

long double ScaledValue::log_abs() const {
  if (mant == 0.0) return -std::numeric_limits<long double>::infinity();
  return std::log(std::fabs(static_cast<long double>(mant))) +
         static_cast<long double>(exp2) * kLn2;
}

ScaledValue ScaledValue::from_log(int sign, long double log_abs) {
  return scaled_from_log(sign, log_abs);
}

ScaledValue jacobi_scaled(const JacobiIndex& idx, double x) {
  idx.validate();
  if (x < -1.0 || x > 1.0) {
    throw std::domain_error("jacobi argument must lie in [-1,1], got " + std::to_string(x));
  }
  const double a = idx.alpha, b = idx.beta, s = a + b;
  if (idx.j == 0) return {1.0, 0};
  double p0 = 1.0;
  double p1 = 0.5 * (a - b) + (1.0 + 0.5 * s) * x;
  std::int64_t e = 0;
  for (int n = 2; n <= idx.j; ++n) {
    double t = 2.0 * n + s;  // 2n + alpha + beta
    double c0 = 2.0 * n * (n + s) * (t - 2.0);
    double cx = (t - 1.0) * t * (t - 2.0);
    double cc = (t - 1.0) * (a - b) * (a + b);
    double c2 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * t;
    double p2 = ((cx * x + cc) * p1 - c2 * p0) / c0;
    p0 = p1;
    p1 = p2;
    renorm_pair(p0, p1, e);
  }
  return {p1, e};
}

double jacobi_eval(const JacobiIndex& idx, double x) { return jacobi_scaled(idx, x).value(); }

long double log_norm_constant(const ProfileIndex& p) {
  p.validate();
  long double ell = 0.5L * p.ell.twice;
  long double m = 0.5L * p.m.twice;
  return 0.5L * (std::log(ell) + std::lgamma(ell - m + 0.5L) + std::lgamma(ell + m + 0.5L)) -
         m * kLn2 - std::lgamma(ell + 0.5L);
}

double norm_constant(const ProfileIndex& p) {
  return static_cast<double>(std::exp(log_norm_constant(p)));
}

namespace {

// Shared log-domain assembly of c_{ell,m} * g^{q} * P_j(x) where g >= 0 is
// either 1-x^2 (q = m/2-(d-2)/4) or cos(psi) (q = m-(d-2)/2).  log_g is the
// log of g, already multiplied out by the caller for the two endpoint cases.
ScaledValue assemble_profile(const ProfileIndex& p, double x, long double q_log_g) {
  const int j = p.jacobi_degree();
  const double mv = 0.5 * p.m.twice;
  ScaledValue P = jacobi_scaled({j, mv, mv}, x);
  if (P.is_zero()) return {};
  long double lg = log_norm_constant(p) + q_log_g + P.log_abs();
  return scaled_from_log(P.sign(), lg);
}

// Endpoint limit at x = +/-1 (psi = +/-pi/2): zero when the cosine power is
// positive, else c_{ell,m} * P_j(x) with P_j^{(m,m)}(+/-1) = (-1)^(j or 0) binom(j+m, j).
ScaledValue profile_endpoint(const ProfileIndex& p, bool positive_end, bool exponent_zero) {
  if (!exponent_zero) return {};
  const int j = p.jacobi_degree();
  const long double mv = 0.5L * p.m.twice;
  long double log_binom = std::lgamma(j + mv + 1.0L) - std::lgamma(j + 1.0L) - std::lgamma(mv + 1.0L);
  int sign = (!positive_end && (j % 2 == 1)) ? -1 : 1;
  return scaled_from_log(sign, log_norm_constant(p) + log_binom);
}

}  // namespace

ScaledValue xtilde_scaled(const ProfileIndex& p, double x) {
  p.validate();
  if (x < -1.0 || x > 1.0) {
    throw std::domain_error("xtilde argument must lie in [-1,1], got " + std::to_string(x));
  }
  // exponent of (1-x^2): e_m = m/2 - (d-2)/4 >= 0, zero only at minimal m
  const long double e_m = (p.m.twice - (p.d - 2)) / 4.0L;
  if (x == 1.0 || x == -1.0) return profile_endpoint(p, x > 0, e_m == 0.0L);
  long double log_g = std::log(1.0L - static_cast<long double>(x)) +
                      std::log(1.0L + static_cast<long double>(x));
  return assemble_profile(p, x, e_m * log_g);
}

double xtilde_eval(const ProfileIndex& p, double x) { return xtilde_scaled(p, x).value(); }

double profile_eval(const ProfileIndex& p, double psi) {
  p.validate();
  if (psi < -M_PI_2 || psi > M_PI_2) {
    throw std::domain_error("profile argument must lie in [-pi/2,pi/2], got " +
                            std::to_string(psi));
  }
  // exponent of cos(psi): q_m = m - (d-2)/2 >= 0
  const long double q_m = (p.m.twice - (p.d - 2)) / 2.0L;
  const double c = std::cos(psi);
  const double x = std::sin(psi);
  if (c <= 0.0) return profile_endpoint(p, x > 0, q_m == 0.0L).value();
  return assemble_profile(p, x, q_m * std::log(static_cast<long double>(c))).value();
}

double recurrence_coeff(const ProfileIndex& p) {
  if (p.d < 2) throw std::domain_error("profile dimension must be >= 2");
  require_lattice(p.m, p.d - 1, "m");
  if ((p.ell.twice & 1) != ((p.d - 1) & 1)) {
    throw std::domain_error("ell=" + p.ell.str() + " has wrong parity for N_" +
                            std::to_string(p.d));
  }
  if (p.ell.twice < p.m.twice + 1) return 0.0;  // (ell-1,m) outside the ladder
  // exact integer pieces: (ell-m+1/2)(ell+m+1/2) / (4 ell (ell+1))
  double num = 0.25 * (p.ell.twice - p.m.twice + 1) * (p.ell.twice + p.m.twice + 1);
  double den = static_cast<double>(p.ell.twice) * (p.ell.twice + 2);
  return std::sqrt(num / den);
}

std::vector<ScaledValue> xtilde_ladder(int d, HalfInt m, HalfInt ell_max, double x) {
  ProfileIndex top{d, ell_max, m};
  top.validate();
  if (x < -1.0 || x > 1.0) {
    throw std::domain_error("ladder argument must lie in [-1,1], got " + std::to_string(x));
  }
  const int count = top.jacobi_degree() + 1;  // entries ell = m+1/2 .. ell_max
  std::vector<ScaledValue> out(count);

  HalfInt ell0 = m + HalfInt{1};
  ScaledValue seed = xtilde_scaled({d, ell0, m}, x);
  out[0] = seed;
  if (count == 1) return out;
  if (seed.is_zero()) {
    // (1-x^2)^{e_m} underflowed even in scaled form (|x|=1, e_m>0): the
    // whole chain vanishes there.
    return out;
  }

  // ladder state: (prev, cur) share the exponent e
  double prev = 0.0;
  double cur = seed.mant;
  std::int64_t e = seed.exp2;
  HalfInt ell = ell0;
  for (int t = 1; t < count; ++t) {
    double a_cur = recurrence_coeff({d, ell, m});
    double a_prev = recurrence_coeff({d, ell - HalfInt{2}, m});
    double next = (x * cur - a_prev * prev) / a_cur;
    prev = cur;
    cur = next;
    renorm_pair(prev, cur, e);
    out[t] = {cur, e};
    ell = ell + HalfInt{2};
  }
  return out;
}

double xtilde_ladder_dot(int d, HalfInt m, double x, const double* coef, int n) {
  if (n <= 0) return 0.0;
  HalfInt ell0 = m + HalfInt{1};
  ProfileIndex top{d, ell0 + HalfInt{2 * (n - 1)}, m};
  top.validate();
  if (x < -1.0 || x > 1.0) {
    throw std::domain_error("ladder argument must lie in [-1,1], got " + std::to_string(x));
  }

  ScaledValue seed = xtilde_scaled({d, ell0, m}, x);
  if (seed.is_zero()) return 0.0;
  double acc = coef[0] * seed.value();
  if (n == 1) return acc;

  double prev = 0.0;
  double cur = seed.mant;
  std::int64_t e = seed.exp2;
  HalfInt ell = ell0;
  for (int t = 1; t < n; ++t) {
    double a_cur = recurrence_coeff({d, ell, m});
    double a_prev = recurrence_coeff({d, ell - HalfInt{2}, m});
    double next = (x * cur - a_prev * prev) / a_cur;
    prev = cur;
    cur = next;
    renorm_pair(prev, cur, e);
    if (coef[t] != 0.0) acc += coef[t] * ScaledValue{cur, e}.value();
    ell = ell + HalfInt{2};
  }
  return acc;
}

namespace {

std::map<int, EnvelopeCalibration>& envelope_table() {
  // Defaults produced by `grushin calibrate` over ell <= 200; see README.
  static std::map<int, EnvelopeCalibration> table = {
      {2, {1.06, 1.45}}, {3, {0.98, 0.40}}, {4, {0.95, 0.64}},
      {5, {0.94, 0.83}}, {6, {0.93, 1.00}},
  };
  return table;
}

}  // namespace

EnvelopeCalibration envelope_calibration(int d) {
  const auto& table = envelope_table();
  auto it = table.find(d);
  if (it != table.end()) return it->second;
  return {};
}

void set_envelope_calibration(int d, const EnvelopeCalibration& cal) {
  envelope_table()[d] = cal;
}

double envelope_bound(const ProfileIndex& p, double x, double regime_epsilon) {
  (void)regime_epsilon;
  p.validate();
  if (x < -1.0 || x > 1.0) {
    throw std::domain_error("envelope argument must lie in [-1,1], got " + std::to_string(x));
  }
  const double ell = 0.5 * p.ell.twice;
  const double m = 0.5 * p.m.twice;
  const double y2 = std::max(0.0, (1.0 - x) * (1.0 + x));
  const double y = std::sqrt(y2);
  const double b = m / ell;
  const EnvelopeCalibration cal = envelope_calibration(p.d);

  double main;
  if (y == 0.0 && p.d > 2) {
    main = std::numeric_limits<double>::infinity();
  } else {
    main = std::pow(y, -0.5 * (p.d - 2)) *
           std::pow((1.0 + m) / (ell * ell) + std::fabs(y2 - b * b), -0.25);
  }
  double bound = main;
  if (y <= b / (2.0 * M_E)) {
    double expo = std::pow(ell, 0.5 * (p.d - 1)) * std::exp(-cal.c_exp * m);
    bound = std::min(bound, expo);
  }
  return cal.prefactor * bound;
}

}  // namespace grushin
