#pragma once

#include <Eigen/Core>

#include "grushin/special.hpp"
#include "grushin/spectrum.hpp"

namespace grushin {

// Reference evaluation of P_j^{(alpha,beta)}(x) through the explicit finite
// sum sum_s binom(j+alpha, j-s) binom(j+beta, s) ((x-1)/2)^s ((x+1)/2)^(j-s),
// carried out in 100-digit floats: the sum cancels catastrophically (term
// magnitudes reach ~1e28 around j=60 for ultraspherical parameters near
// x=0), so double or even quad accumulation could not back a 1e-12 gate.
// Test/acceptance use only; slow by design.
double jacobi_oracle(const JacobiIndex& idx, double x);

// Brute-force cluster sum over the window lambda in [i^2, (i+1)^2):
// sum of dim(bottom) * X_c(x)^2 * (lambda_c / top_c^2)^alpha, evaluated
// entirely in 100-digit floats with its own chain enumeration, gamma-based
// normalization constants, explicit-sum Jacobi values, and product-formula
// eigenspace dimensions.  epsilon <= 0 selects the default regime split.
// Test/acceptance use only; slow by design.
double cluster_sum_oracle(int d, int k, int i, Regime regime, double alpha, double epsilon,
                          const Eigen::VectorXd& x);

// Reproducing kernel of the degree-n spherical harmonics on S^k summed over
// an explicit basis: harmonic polynomials from the polynomial Laplacian's
// nullspace, paired through the inverse Gram matrix of closed-form sphere
// moments.  Small k and degree only; test/acceptance use.
double zonal_basis_sum(int k, int degree, const Eigen::VectorXd& p, const Eigen::VectorXd& q);

}  // namespace grushin
