#include "grushin/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "grushin/parallel.hpp"
#include "grushin/rng.hpp"
#include "grushin/sum.hpp"

namespace grushin {

void CylPoint::validate() const {
  if (omega.size() < 2) throw std::domain_error("omega must lie on S^k with k >= 1");
  if (psi.size() < 1) throw std::domain_error("psi must have at least one coordinate");
  if (std::fabs(omega.norm() - 1.0) > 1e-12) {
    throw std::domain_error("omega must be a unit vector, |omega| = " +
                            std::to_string(omega.norm()));
  }
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    if (!(std::fabs(psi(i)) < M_PI_2)) {
      throw std::domain_error("psi coordinates must lie in (-pi/2, pi/2), got " +
                              std::to_string(psi(i)));
    }
  }
}

double sphere_area(int n) {
  if (n < 0) throw std::domain_error("sphere dimension must be >= 0");
  return 2.0 * std::pow(M_PI, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
}

Eigen::VectorXd cyl_to_ambient(const CylPoint& p) {
  p.validate();
  Eigen::VectorXd v = p.omega;
  for (Eigen::Index i = 0; i < p.psi.size(); ++i) {
    Eigen::VectorXd w(v.size() + 1);
    w.head(v.size()) = std::cos(p.psi(i)) * v;
    w(v.size()) = std::sin(p.psi(i));
    v = std::move(w);
  }
  return v;
}

CylPoint ambient_to_cyl(const Eigen::VectorXd& z, int k) {
  if (k < 1 || z.size() < k + 2) {
    throw std::domain_error("ambient point needs dimension d+1 >= k+2 with k >= 1");
  }
  Eigen::VectorXd v = z.normalized();
  const int dk = static_cast<int>(z.size()) - 1 - k;
  Eigen::VectorXd psi(dk);
  for (int i = dk - 1; i >= 0; --i) {
    double s = std::clamp(v(v.size() - 1), -1.0, 1.0);
    double a = std::asin(s);
    // keep the chart range open: the rim |psi| = pi/2 has measure zero
    if (std::fabs(a) >= M_PI_2) a = std::copysign(std::nextafter(M_PI_2, 0.0), a);
    psi(i) = a;
    Eigen::VectorXd head = v.head(v.size() - 1);
    double hn = head.norm();
    v = (hn > 0) ? Eigen::VectorXd(head / hn) : Eigen::VectorXd::Unit(head.size(), 0);
  }
  return {v, psi};
}

double measure_density(const CylPoint& p) {
  p.validate();
  double prod = 1.0;
  for (Eigen::Index i = 0; i < p.psi.size(); ++i) {
    // level r = k+1+i carries cos^{r-1}
    prod *= std::pow(std::cos(p.psi(i)), p.k() + i);
  }
  return prod;
}

double potential(const Eigen::VectorXd& psi) {
  double log_sec2 = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    double c = std::cos(psi(i));
    if (!(std::fabs(psi(i)) < M_PI_2) || c <= 0.0) {
      throw std::domain_error("potential requires |psi_j| < pi/2, got " +
                              std::to_string(psi(i)));
    }
    log_sec2 -= 2.0 * std::log(c);
  }
  return std::expm1(log_sec2);
}

double tau(const CylPoint& p) {
  p.validate();
  return p.psi.array().sin().abs().sum();
}

double geodesic(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw std::domain_error("geodesic arguments must share a dimension");
  return std::acos(std::clamp(a.dot(b), -1.0, 1.0));
}

double cap_measure(int k, double theta) {
  if (k < 1) throw std::domain_error("cap dimension must be >= 1");
  theta = std::clamp(theta, 0.0, M_PI);
  // I(n) = int_0^theta sin^n, by the reduction formula
  double i_prev = theta;             // I(0)
  double i_cur = 1 - std::cos(theta);  // I(1)
  if (k - 1 == 0) return sphere_area(0) * i_prev;
  const double st = std::sin(theta), ct = std::cos(theta);
  double sp = 1.0;  // sin^{n-1}(theta)
  for (int n = 2; n <= k - 1; ++n) {
    sp *= st;
    double next = ((n - 1) * i_prev - sp * ct) / n;
    i_prev = i_cur;
    i_cur = next;
  }
  return sphere_area(k - 1) * i_cur;
}

static void require_same_chart(const CylPoint& p, const CylPoint& q) {
  if (p.omega.size() != q.omega.size() || p.psi.size() != q.psi.size()) {
    throw std::domain_error("points live in different charts");
  }
}

double distance_surrogate(const CylPoint& p, const CylPoint& q, double eps_branch) {
  p.validate();
  q.validate();
  require_same_chart(p, q);
  if (!(eps_branch > 0.0) || eps_branch > M_PI_2) {
    throw std::domain_error("branch threshold must lie in (0, pi/2]");
  }
  const double M = std::max(p.psi.norm(), q.psi.norm());
  if (M <= eps_branch) {
    double rho = geodesic(p.omega, q.omega);
    double t = std::sqrt(rho);
    if (M > 0.0) t = std::min(t, rho / M);  // rho/0 = +inf: sqrt branch wins at M=0
    return (p.psi - q.psi).norm() + t;
  }
  return geodesic(cyl_to_ambient(p), cyl_to_ambient(q));
}

double weight(double r, const CylPoint& p, const CylPoint& q) {
  if (!(r > 0.0)) throw std::domain_error("weight radius must be positive");
  p.validate();
  q.validate();
  return p.psi.norm() / std::max(r, q.psi.norm());
}

double volume_model(int d, int k, double r, double psi_norm) {
  if (!(r > 0.0)) throw std::domain_error("radius must be positive");
  return sphere_area(d) * std::min(1.0, std::pow(r, d) * std::pow(std::max(r, psi_norm), k));
}

namespace {

// Exact omega-measure of {omega : distance_surrogate((omega,psi), center) < r}
// given psi.  Both branches reduce to a cap on S^k:
//  - near: |psi-psi'| + min(sqrt(rho), rho/M) < r  <=>  rho < max(s^2, sM),
//          s = r - |psi-psi'|
//  - far:  the ambient inner product is C<omega,omega'> + S with C > 0,
//          so arccos(...) < r is again a cap in omega.
struct CapIntegrand {
  const CylPoint& center;
  double r, eps_branch;
  int k;
  Eigen::ArrayXd cos_c, sin_c;  // cos/sin of center.psi

  double omega_cap(const Eigen::VectorXd& psi) const {
    const double M = std::max(psi.norm(), center.psi.norm());
    if (M <= eps_branch) {
      double s = r - (psi - center.psi).norm();
      if (s <= 0.0) return 0.0;
      return cap_measure(k, std::max(s * s, s * M));
    }
    if (r >= M_PI) return sphere_area(k);
    double C = 1.0, S = 0.0;
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      S = std::sin(psi(i)) * sin_c(i) + std::cos(psi(i)) * cos_c(i) * S;
      C *= std::cos(psi(i)) * cos_c(i);
    }
    if (C <= 0.0) return S > std::cos(r) ? sphere_area(k) : 0.0;
    double t = (std::cos(r) - S) / C;
    if (t >= 1.0) return 0.0;
    if (t <= -1.0) return sphere_area(k);
    return cap_measure(k, std::acos(t));
  }
};

}  // namespace

BallVolume ball_volume(const CylPoint& center, double r, std::int64_t mc_samples,
                       std::uint64_t seed, double eps_branch, VolumeMode mode) {
  center.validate();
  if (!(r > 0.0)) throw std::domain_error("ball radius must be positive");
  if (mc_samples < 2) throw std::domain_error("need at least 2 samples");
  const int k = center.k();
  const int d = center.d();
  const int dk = d - k;
  const double sig_d = sphere_area(d);
  const double sig_k = sphere_area(k);

  CapIntegrand cap{center, r, eps_branch, k,
                   center.psi.array().cos(), center.psi.array().sin()};

  // near box around center.psi, clipped to the chart
  Eigen::ArrayXd lo(dk), hi(dk);
  for (int i = 0; i < dk; ++i) {
    lo(i) = std::max(-M_PI_2, center.psi(i) - r);
    hi(i) = std::min(M_PI_2, center.psi(i) + r);
  }
  const double vol_box = (hi - lo).prod();

  // psi-marginal of the uniform measure, normalized over the chart box
  auto marginal_density = [&](const Eigen::VectorXd& psi) {
    double prod = 1.0;
    for (int i = 0; i < dk; ++i) prod *= std::pow(std::cos(psi(i)), k + i);
    return sig_k * prod / sig_d;
  };

  std::vector<double> contrib(static_cast<std::size_t>(mc_samples));
  parallel_for(mc_samples, [&](std::int64_t i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    if (mode == VolumeMode::plain) {
      Eigen::VectorXd g(d + 1);
      for (int t = 0; t <= d; ++t) g(t) = rng.normal();
      CylPoint z = ambient_to_cyl(g, k);
      bool inside = distance_surrogate(z, center, eps_branch) < r;
      contrib[static_cast<std::size_t>(i)] = inside ? sig_d : 0.0;
      return;
    }
    // mixture draw: half marginal, half uniform on the near box
    Eigen::VectorXd psi(dk);
    if (rng.uniform() < 0.5) {
      for (int t = 0; t < dk; ++t) psi(t) = rng.uniform(lo(t), hi(t));
    } else {
      Eigen::VectorXd g(d + 1);
      for (int t = 0; t <= d; ++t) g(t) = rng.normal();
      psi = ambient_to_cyl(g, k).psi;
    }
    bool in_box = true;
    for (int t = 0; t < dk; ++t) in_box = in_box && psi(t) >= lo(t) && psi(t) <= hi(t);
    double mix = 0.5 * marginal_density(psi) + (in_box ? 0.5 / vol_box : 0.0);
    // target: integral of density(psi) * omega_cap(psi) over the psi box
    double density = sig_d * marginal_density(psi) / sig_k;
    contrib[static_cast<std::size_t>(i)] = density * cap.omega_cap(psi) / mix;
  });

  NeumaierSum mean_sum;
  for (double c : contrib) mean_sum.add(c);
  const double mean = mean_sum.value() / static_cast<double>(mc_samples);
  NeumaierSum var_sum;
  for (double c : contrib) var_sum.add((c - mean) * (c - mean));
  const double var = var_sum.value() / (static_cast<double>(mc_samples) - 1.0);

  BallVolume out;
  out.volume = mean;
  out.std_error = std::sqrt(var / static_cast<double>(mc_samples));
  out.samples = mc_samples;
  return out;
}

}  // namespace grushin
