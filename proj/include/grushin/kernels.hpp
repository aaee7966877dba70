#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "grushin/geometry.hpp"
#include "grushin/quadrature.hpp"
#include "grushin/spectrum.hpp"

namespace grushin {

// Multiplier F on the sqrt-eigenvalue axis; the associated operator acts as
// F(sqrt(lambda)) on the joint eigenspace with eigenvalue lambda.
struct MultiplierSpec {
  enum class Kind { heat, bochner_riesz, indicator, table };

  Kind kind = Kind::indicator;
  double t = 1.0;               // heat / bochner_riesz scale
  double delta = 0.0;           // bochner_riesz order
  double lo = 0.0, hi = 0.0;    // indicator window
  std::vector<double> samples;  // table values, equispaced on [0, table_max]
  double table_max = 1.0;

  static MultiplierSpec heat(double t);
  static MultiplierSpec bochner_riesz(double t, double delta);
  static MultiplierSpec indicator(double lo, double hi);
  static MultiplierSpec table(std::vector<double> samples, double table_max);

  void validate() const;  // throws std::domain_error
  double operator()(double s) const;

  // sup |F| beyond s_max: the truncation tail of a kernel cut at s_max.
  double tail_sup(double s_max) const;

  // G with G(s) = F(c s), exact for every kind.
  MultiplierSpec dilated(double c) const;
};

// Chains with joint eigenvalue lambda <= lambda_cap, together with a
// per-level ladder layout that lets every chain be evaluated at one chart
// point in O(total number of chains).
struct ChainSet {
  int d = 2, k = 1;
  double lambda_cap = 0.0;  // inclusive cap on lambda itself
  std::vector<ChainIndex> chains;
  Eigen::ArrayXd lambda;           // joint eigenvalue per chain
  Eigen::ArrayXd weight_dim;       // eigenspace dimension at the bottom index
  std::vector<int> bottom_twice;   // l_k doubled, per chain

  // Level r = k+1+j keeps one ladder slice per bottom value m = l_{r-1}:
  // the slice holds X~^r_{l_r,m} for l_r = m+1/2 .. top.  start < 0 marks an
  // unused m slot.
  struct LevelLayout {
    int min_m_twice = 0;
    std::vector<std::int64_t> start;
    std::vector<int> top_twice;
    std::int64_t size = 0;
  };
  std::vector<LevelLayout> levels;
  std::vector<std::int64_t> slot;  // chains.size() x (d-k), flattened

  int max_bottom_degree() const;  // largest harmonic degree at level k
};

ChainSet chain_set_from(int d, int k, std::vector<ChainIndex> chains);
ChainSet collect_chains(int d, int k, double lambda_max);        // lambda <= lambda_max^2
ChainSet collect_window(int d, int k, const SpectralWindow& w);  // [i^2, (i+1)^2)

// X_c at one chart point for every chain, in the variables x_r = sin psi_r.
Eigen::ArrayXd chain_values_x(const ChainSet& cs, const Eigen::VectorXd& x);
Eigen::ArrayXd chain_values(const ChainSet& cs, const Eigen::VectorXd& psi);

// Reproducing kernel of the degree-(m - (k-1)/2) spherical-harmonic space on
// S^k as a function of u = <omega, omega'>, normalized so the value at u = 1
// is dim / area.
double zonal_kernel(int k, HalfInt m, double cos_theta);

// Same kernel for all harmonic degrees 0..max_degree in one recurrence pass.
Eigen::ArrayXd zonal_family(int k, int max_degree, double u);

// Product of the per-level profiles X^r_{l_r, l_{r-1}}(psi_r).
double chain_eigenfunction(const ChainIndex& c, const Eigen::VectorXd& psi);

// Pointwise kernel of F(sqrt(L)) truncated to the chains of cs.
double multiplier_kernel(const MultiplierSpec& F, const ChainSet& cs,
                         const CylPoint& p, const CylPoint& q);
double multiplier_kernel(const MultiplierSpec& F, int d, int k, double lambda_max,
                         const CylPoint& p, const CylPoint& q);

// Squared L^2 norm of the kernel column z -> K(z, q) by the exact eigenvalue
// sum (1/area_k) sum_c dim_c F(sqrt(lambda_c))^2 X_c(psi_q)^2.
double kernel_column_l2_sq(const MultiplierSpec& F, const ChainSet& cs, const CylPoint& q);

// int (1 + |psi_z| / max{r, |psi_q|})^{2 alpha} |K(z,q)|^2 dmu(z); the sphere
// directions collapse by zonal orthogonality, leaving a psi-box quadrature.
double weighted_column_l2_sq(const MultiplierSpec& F, const ChainSet& cs, const CylPoint& q,
                             double alpha, double r, const QuadratureGrid& grid);

// int |K(z,q)| dmu(z) by full quadrature; a lower bound for the L1 -> L1
// operator norm when maximized over centers q.
double l1_column_norm(const MultiplierSpec& F, const ChainSet& cs, const CylPoint& q,
                      const QuadratureGrid& grid);
double l1_operator_norm(const MultiplierSpec& F, const ChainSet& cs,
                        const std::vector<CylPoint>& centers, const QuadratureGrid& grid);

// (d,k) = (2,1) column path for large lambda_max: dyadic bands in |psi| with
// band-limited circle resolution (profiles with m >> lambda_max / |sin psi|
// are negligible at that psi), and an FFT over the circle direction.
double l1_column_norm_banded(const MultiplierSpec& F, double lambda_max, double psi_center);

// Applies the operator to the chain eigenfunction at psi by composed 5-point
// finite differences (step h) in the chart fields, with the exact bottom
// eigenvalue standing in for the S^k Laplacian, and returns
// |L f - lambda f| / (|lambda| |f| + 1).
double apply_grushin_residual(const ChainIndex& c, const Eigen::VectorXd& psi, double h);

// Cell-sup norm: (mean over i <= N of sup_{[(i-1)/N, i/N]} |F|^q)^{1/q},
// with the sup taken on 64 subsamples per cell; q = inf gives the global sup
// over [0,1].
double norm_Nq(const MultiplierSpec& F, int N, double q_exp);

}  // namespace grushin
