#include "grushin/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace grushin {

namespace {

// Monic three-term recurrence coefficients for the weight (1-x^2)^nu:
// p_{s+1} = x p_s - beta_s p_{s-1}.
double beta_coeff(int s, double nu) {
  if (s == 1) return 1.0 / (2.0 * nu + 3.0);  // the (1+2nu) factor cancels; 0/0 at nu = -1/2
  double a = s, b = s + 2.0 * nu;
  double c = 2.0 * (s + nu);
  return a * b / (c * c - 1.0);
}

// Orthonormal polynomials q_0..q_{n-1} at x and q_n with derivative, via the
// normalized recurrence sqrt(beta_{s+1}) q_{s+1} = x q_s - sqrt(beta_s) q_{s-1}.
struct OrthoEval {
  double qn, dqn;      // q_n(x), q_n'(x)
  double christoffel;  // sum_{s<n} q_s(x)^2
};

OrthoEval ortho_eval(int n, double nu, double mu0, double x) {
  double qm1 = 0.0, dqm1 = 0.0;
  double q = 1.0 / std::sqrt(mu0), dq = 0.0;
  double chr = 0.0;
  double sb_prev = 0.0;
  for (int s = 0; s < n; ++s) {
    chr += q * q;
    double sb = std::sqrt(beta_coeff(s + 1, nu));
    double qn = (x * q - sb_prev * qm1) / sb;
    double dqn = (q + x * dq - sb_prev * dqm1) / sb;
    qm1 = q;
    dqm1 = dq;
    q = qn;
    dq = dqn;
    sb_prev = sb;
  }
  return {q, dq, chr};
}

}  // namespace

QuadRule gauss_jacobi_sym(int n, double nu) {
  if (n < 1) throw std::domain_error("quadrature order must be >= 1");
  if (!(nu > -1.0)) throw std::domain_error("weight exponent must be > -1");

  QuadRule rule;
  rule.nu = nu;
  rule.mu0 = std::sqrt(M_PI) * std::exp(std::lgamma(nu + 1.0) - std::lgamma(nu + 1.5));
  rule.x.resize(n);
  rule.w.resize(n);

  // Golub-Welsch nodes: eigenvalues of the symmetric tridiagonal recurrence
  // matrix (zero diagonal, sqrt(beta) off-diagonal), ascending.  The
  // eigenvalues-only path stays O(n^2), so large rules are cheap.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 1));
  for (int s = 1; s < n; ++s) sub[s - 1] = std::sqrt(beta_coeff(s, nu));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("quadrature eigensolve failed");

  // Newton polish on the positive half, mirrored for exact symmetry; weights
  // are the Christoffel numbers 1 / sum_s q_s(x)^2.
  for (int j = n / 2; j < n; ++j) {
    double x = es.eigenvalues()[j];
    for (int it = 0; it < 3 && 2 * j + 1 != n; ++it) {
      OrthoEval e = ortho_eval(n, nu, rule.mu0, x);
      x -= e.qn / e.dqn;
    }
    if (2 * j + 1 == n) x = 0.0;  // middle node of an odd rule
    OrthoEval e = ortho_eval(n, nu, rule.mu0, x);
    double w = 1.0 / (e.christoffel + e.qn * e.qn);
    rule.x[j] = x;
    rule.w[j] = w;
    rule.x[n - 1 - j] = -x;
    rule.w[n - 1 - j] = w;
  }
  return rule;
}

QuadratureGrid make_grid(int d, int k, int ell_max, int order_override) {
  if (!(1 <= k && k < d)) throw std::domain_error("required 1 <= k < d");
  if (ell_max < 1) throw std::domain_error("ell_max must be >= 1");
  int n = order_override > 0 ? order_override : 2 * ell_max + 16;
  QuadratureGrid g;
  g.d = d;
  g.k = k;
  g.psi.reserve(static_cast<size_t>(d - k));
  for (int r = k + 1; r <= d; ++r) g.psi.push_back(gauss_jacobi_sym(n, 0.5 * (r - 2)));
  g.zonal = gauss_jacobi_sym(n, 0.5 * (k - 2));
  return g;
}

}  // namespace grushin
