#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "grushin/geometry.hpp"
#include "grushin/kernels.hpp"
#include "grushin/spectrum.hpp"

namespace grushin {

// Spectral cluster sum at x = sin psi (componentwise):
// sum over the chains of dim(bottom) * X_c(x)^2 * (lambda_c / top_c^2)^alpha.
double cluster_sum(const ChainSet& cs, double alpha, const Eigen::VectorXd& x);

// Cluster sums over a family of dyadic windows and probe points.
// sums(row, col) pairs i_values[row] with x_points[col].
struct ClusterScan {
  std::vector<int> i_values;
  std::vector<Eigen::VectorXd> x_points;
  Eigen::MatrixXd sums;

  double slope(int col) const;  // least-squares d log sum / d log i
};

ClusterScan cluster_scan(int d, int k, double alpha, Regime regime,
                         const std::vector<int>& i_values,
                         const std::vector<Eigen::VectorXd>& x_points, double epsilon = 0.0);

// Least-squares slope of log y against log x (all entries must be positive).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// sum_m m^{d-2} X~^d_{l,m}(x)^2 over the profile ladder m <= l - 1/2, with
// the convention 0^0 = 1 at the bottom of the integer lattice.
double profile_sup_sum(int d, HalfInt ell, double x);

// Ratios || tau^N f || / || (L / Laplace_{k+1})^{N/2} f || over random
// coefficient vectors f spanning the chains with top index <= ell_max whose
// level-(k+1) index sits above its lattice minimum (so the quotient is
// defined).  tau is the flat-direction gauge from geometry.hpp.
struct RieszRatios {
  double max_ratio = 0.0;
  double mean_ratio = 0.0;
  int samples = 0;
};

RieszRatios riesz_ratios(int d, int k, int n_power, HalfInt ell_max, int n_samples,
                         std::uint64_t seed);

// One probe of the weighted kernel-norm bound at scale r = 1/resolution for
// the band indicator F = 1_[resolution/4, 3 resolution/4](sqrt lambda):
// lhs is the weighted column L2 norm, rhs = volume_model^{-1/2} times the
// resolution-grid 2-norm of the dilated multiplier.
struct PlancherelPoint {
  int resolution = 0;
  double alpha = 0.0;
  double psi_norm = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

std::vector<PlancherelPoint> plancherel_scan(int d, int k, const std::vector<int>& resolutions,
                                             const std::vector<double>& alphas,
                                             const std::vector<CylPoint>& centers);

// Monte-Carlo estimate of
//   int (1 + dist(z, center)/r)^{-beta} (1 + w_r(z, center))^{-alpha} dmu(z)
// divided by volume_model(d, k, r, |psi_center|).  The omega integral is done
// exactly per psi sample, so the randomness is only over psi.
struct WeightIntegral {
  double ratio = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
};

WeightIntegral weight_integrability(int d, int k, const CylPoint& center, double r, double alpha,
                                    double beta, std::int64_t n_psi_samples, std::uint64_t seed);

// Largest (1 + w_r(p, q)) / (1 + dist(p, q)/r) over sampled point pairs and
// dyadic scales r = 2^{-1}, ..., 2^{-7}.
double weight_growth_constant(int d, int k, std::int64_t n_pairs, std::uint64_t seed);

// (s + |a - t|)^{-1/2}, the one-dimensional stationary-phase gauge.
double xi_gauge(double a, double s, double t);

// det M(w) for the unit-diagonal matrix with entries m_ij = w_i for i > j
// and -w_i for i < j, computed by pivoted LU.
double det_skew_unit(const Eigen::VectorXd& w);

// The same determinant through the combinatorial route: the sum of
// prod_{j in S} w_j over all even-size index subsets S.
double even_subset_sum(const Eigen::VectorXd& w);

}  // namespace grushin
