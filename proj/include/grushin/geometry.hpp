#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace grushin {

// Point of S^d in cylindrical coordinates: omega on S^k (unit vector in
// R^{k+1}) and psi = (psi_{k+1}, ..., psi_d) in (-pi/2, pi/2)^{d-k}.
struct CylPoint {
  Eigen::VectorXd omega;
  Eigen::VectorXd psi;

  int k() const { return static_cast<int>(omega.size()) - 1; }
  int d() const { return k() + static_cast<int>(psi.size()); }
  void validate() const;  // throws std::domain_error
};

// Surface measure of S^n (n >= 0), 2 pi^{(n+1)/2} / Gamma((n+1)/2).
double sphere_area(int n);

// Iterated chart ((cos psi) omega, sin psi): unit vector in R^{d+1}.
Eigen::VectorXd cyl_to_ambient(const CylPoint& p);

// Inverse chart; defined for |psi_r| < pi/2, clamps at the measure-zero rim.
CylPoint ambient_to_cyl(const Eigen::VectorXd& z, int k);

// prod_{r=k+1}^{d} cos^{r-1} psi_r, the density of the spherical measure in
// the chart relative to d sigma_{S^k}(omega) d psi.
double measure_density(const CylPoint& p);

// V(psi) = prod_j (1 + tan^2 psi_j) - 1; zero iff psi = 0.
double potential(const Eigen::VectorXd& psi);

// tau(p) = sum_r |sin psi_r|, the flat-direction degeneracy gauge.
double tau(const CylPoint& p);

// Geodesic (arc) distance between unit vectors: arccos of the clamped
// inner product.
double geodesic(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Measure of a geodesic cap of radius theta on S^k.
double cap_measure(int k, double theta);

// Distance surrogate: for max(|psi|, |psi'|) <= eps_branch returns
//   |psi - psi'| + min( rho^{1/2}, rho / max(|psi|, |psi'|) ),
// rho the S^k geodesic distance (with rho/0 = +inf), else the ambient
// S^d geodesic distance.  Symmetric; zero iff the points coincide.
double distance_surrogate(const CylPoint& p, const CylPoint& q, double eps_branch = M_PI / 4);

// Weight w_r(p, q) = |psi_p| / max(r, |psi_q|).  Not symmetric.
double weight(double r, const CylPoint& p, const CylPoint& q);

// Reference volume profile sigma(S^d) min(1, r^d max(r, psi_norm)^k).
double volume_model(int d, int k, double r, double psi_norm);

enum class VolumeMode {
  conditional,  // average the exact omega-cap measure over sampled psi
  plain,        // indicator Monte Carlo on uniform S^d points
};

struct BallVolume {
  double volume = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
};

// Monte-Carlo measure of {z : distance_surrogate(z, center) < r}.  The
// conditional mode integrates the omega-sphere exactly for each sampled
// psi (the ball condition is a cap in omega for both branches) and draws
// psi from a half marginal / half near-box mixture, so small balls keep a
// usable relative error; the plain mode is the direct indicator estimate.
BallVolume ball_volume(const CylPoint& center, double r, std::int64_t mc_samples,
                       std::uint64_t seed, double eps_branch = M_PI / 4,
                       VolumeMode mode = VolumeMode::conditional);

}  // namespace grushin
