#pragma once

#include <Eigen/Core>
#include <vector>

namespace grushin {

// n-point rule for integrals  int_{-1}^1 f(x) (1-x^2)^nu dx, nu > -1.
// Exact for polynomials of degree <= 2n-1; nodes symmetric about 0.
struct QuadRule {
  Eigen::ArrayXd x, w;
  double nu = 0;
  double mu0 = 0;  // total mass int (1-x^2)^nu dx
};

QuadRule gauss_jacobi_sym(int n, double nu);

// Quadrature data for the cylindrical chart on S^d: one rule per angle
// psi_r (r = k+1..d, in the variable x_r = sin psi_r, with the cos^{r-1}
// density folded into the weight exponent) plus a zonal rule in
// u = <omega, omega'> on S^k.  psi[i] belongs to level r = k+1+i.
struct QuadratureGrid {
  int d = 2, k = 1;
  std::vector<QuadRule> psi;
  QuadRule zonal;

  const QuadRule& axis_for_level(int r) const { return psi.at(static_cast<size_t>(r - k - 1)); }
};

// Per-axis order defaults to 2*ell_max + 16 nodes (degree <= 2*ell_max
// integrands are then exact with a wide margin).
QuadratureGrid make_grid(int d, int k, int ell_max, int order_override = 0);

}  // namespace grushin
