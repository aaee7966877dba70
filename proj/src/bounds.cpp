#include "grushin/bounds.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "grushin/quadrature.hpp"
#include "grushin/rng.hpp"
#include "grushin/special.hpp"
#include "grushin/sum.hpp"

namespace grushin {

namespace {

double sq(double v) { return v * v; }

// 8-point Gauss-Legendre rule on [-1,1], positive half.
constexpr double kGl8X[4] = {0.1834346424956498, 0.5255324099163290,
                             0.7966664774136267, 0.9602898564975362};
constexpr double kGl8W[4] = {0.3626837833783620, 0.3137066458778873,
                             0.2223810344533745, 0.1012285362903763};

template <class Body>
void for_each_grid_node(const QuadratureGrid& grid, const Body& body) {
  const int nl = static_cast<int>(grid.psi.size());
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(nl), 0);
  Eigen::VectorXd xv(nl);
  while (true) {
    double w = 1.0;
    for (int j = 0; j < nl; ++j) {
      const auto& rule = grid.psi[static_cast<std::size_t>(j)];
      xv[j] = rule.x[idx[static_cast<std::size_t>(j)]];
      w *= rule.w[idx[static_cast<std::size_t>(j)]];
    }
    body(xv, w);
    int j = 0;
    while (j < nl) {
      auto& i = idx[static_cast<std::size_t>(j)];
      if (++i < grid.psi[static_cast<std::size_t>(j)].x.size()) break;
      i = 0;
      ++j;
    }
    if (j == nl) break;
  }
}

}  // namespace

double cluster_sum(const ChainSet& cs, double alpha, const Eigen::VectorXd& x) {
  if (!(alpha >= 0.0)) throw std::domain_error("alpha must be >= 0");
  if (cs.chains.empty()) return 0.0;
  Eigen::ArrayXd v = chain_values_x(cs, x);
  NeumaierSum acc;
  for (std::int64_t c = 0; c < v.size(); ++c) {
    double term = cs.weight_dim[c] * sq(v[c]);
    if (alpha != 0.0) {
      double top = cs.chains[static_cast<std::size_t>(c)].top().value();
      term *= std::pow(cs.lambda[c] / sq(top), alpha);
    }
    acc.add(term);
  }
  return acc.value();
}

ClusterScan cluster_scan(int d, int k, double alpha, Regime regime,
                         const std::vector<int>& i_values,
                         const std::vector<Eigen::VectorXd>& x_points, double epsilon) {
  if (i_values.empty() || x_points.empty())
    throw std::domain_error("cluster scan needs windows and probe points");
  ClusterScan out;
  out.i_values = i_values;
  out.x_points = x_points;
  out.sums.resize(static_cast<Eigen::Index>(i_values.size()),
                  static_cast<Eigen::Index>(x_points.size()));
  for (std::size_t row = 0; row < i_values.size(); ++row) {
    SpectralWindow w;
    w.i = i_values[row];
    w.regime = regime;
    w.epsilon = epsilon;
    ChainSet cs = collect_window(d, k, w);
    for (std::size_t col = 0; col < x_points.size(); ++col)
      out.sums(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
          cluster_sum(cs, alpha, x_points[col]);
  }
  return out;
}

double ClusterScan::slope(int col) const {
  std::vector<double> xs(i_values.begin(), i_values.end());
  std::vector<double> ys;
  ys.reserve(xs.size());
  for (std::size_t row = 0; row < i_values.size(); ++row)
    ys.push_back(sums(static_cast<Eigen::Index>(row), col));
  return loglog_slope(xs, ys);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::domain_error("slope fit needs >= 2 matching points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::domain_error("log-log slope needs positive data");
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double profile_sup_sum(int d, HalfInt ell, double x) {
  require_lattice(ell, d, "profile top index");
  NeumaierSum acc;
  for (int mt = d - 2; mt + 1 <= ell.twice; mt += 2) {
    HalfInt m{mt};
    double v = xtilde_scaled({d, ell, m}, x).value();
    acc.add(std::pow(m.value(), d - 2) * sq(v));
  }
  return acc.value();
}

RieszRatios riesz_ratios(int d, int k, int n_power, HalfInt ell_max, int n_samples,
                         std::uint64_t seed) {
  if (n_power < 0) throw std::domain_error("power must be >= 0");
  if (n_samples < 1) throw std::domain_error("need at least one sample");
  require_lattice(ell_max, d, "top index cap");

  // All chains with top <= ell_max whose level-(k+1) index is above its
  // lattice minimum, so that the sub-Laplacian quotient is defined.
  std::vector<ChainIndex> chains;
  enumerate_lambda_range(d, k, 0.0, laplace_eigenvalue(d, ell_max), true, Regime::all, 0.0,
                         [&](const ChainIndex& ch, double) {
                           if (ch.top() <= ell_max && ch.at_level(k + 1).twice > k)
                             chains.push_back(ch);
                         });
  if (chains.empty()) throw std::domain_error("no admissible chains below the cap");
  ChainSet cs = chain_set_from(d, k, std::move(chains));
  const auto n = static_cast<std::int64_t>(cs.chains.size());

  Eigen::ArrayXd quotient_pow(n);
  std::vector<int> group(static_cast<std::size_t>(n));
  for (std::int64_t c = 0; c < n; ++c) {
    const ChainIndex& ch = cs.chains[static_cast<std::size_t>(c)];
    double sub = laplace_eigenvalue(k + 1, ch.at_level(k + 1));
    quotient_pow[c] = std::pow(cs.lambda[c] / sub, n_power);
    group[static_cast<std::size_t>(c)] = (ch.bottom().twice - (k - 1)) / 2;
  }

  QuadratureGrid grid =
      make_grid(d, k, static_cast<int>(std::ceil(ell_max.value())) + n_power);
  std::vector<double> node_factor;  // quadrature weight times tau^{2N}
  std::vector<Eigen::ArrayXd> node_vals;
  for_each_grid_node(grid, [&](const Eigen::VectorXd& xv, double w) {
    double t = xv.array().abs().sum();
    node_factor.push_back(w * std::pow(t, 2 * n_power));
    node_vals.push_back(chain_values_x(cs, xv));
  });

  const int ngroups = cs.max_bottom_degree() + 1;
  Eigen::ArrayXd a(n), gm(ngroups);
  RieszRatios out;
  out.samples = n_samples;
  NeumaierSum mean;
  for (int s = 0; s < n_samples; ++s) {
    Rng rng(seed, static_cast<std::uint64_t>(s));
    for (std::int64_t c = 0; c < n; ++c) a[c] = rng.normal();
    double den2 = (a.square() * quotient_pow).sum();
    NeumaierSum num;
    for (std::size_t node = 0; node < node_vals.size(); ++node) {
      if (node_factor[node] == 0.0) continue;
      gm.setZero();
      const Eigen::ArrayXd& v = node_vals[node];
      for (std::int64_t c = 0; c < n; ++c) gm[group[static_cast<std::size_t>(c)]] += a[c] * v[c];
      num.add(node_factor[node] * gm.square().sum());
    }
    double ratio = std::sqrt(std::max(0.0, num.value()) / den2);
    out.max_ratio = std::max(out.max_ratio, ratio);
    mean.add(ratio);
  }
  out.mean_ratio = mean.value() / n_samples;
  return out;
}

std::vector<PlancherelPoint> plancherel_scan(int d, int k, const std::vector<int>& resolutions,
                                             const std::vector<double>& alphas,
                                             const std::vector<CylPoint>& centers) {
  if (resolutions.empty() || alphas.empty() || centers.empty())
    throw std::domain_error("plancherel scan needs resolutions, alphas, and centers");
  std::vector<PlancherelPoint> out;
  for (int res : resolutions) {
    if (res < 4) throw std::domain_error("resolution must be >= 4");
    MultiplierSpec band = MultiplierSpec::indicator(0.25 * res, 0.75 * res);
    std::vector<ChainIndex> chains;
    enumerate_lambda_range(d, k, sq(0.25 * res), sq(0.75 * res), true, Regime::all, 0.0,
                           [&](const ChainIndex& ch, double) { chains.push_back(ch); });
    ChainSet cs = chain_set_from(d, k, std::move(chains));
    QuadratureGrid grid = make_grid(
        d, k, static_cast<int>(std::ceil(max_top_index(d, k, sq(0.75 * res)).value())));
    double nq = norm_Nq(band.dilated(res), res, 2.0);
    for (const CylPoint& center : centers) {
      double vm = volume_model(d, k, 1.0 / res, center.psi.norm());
      for (double alpha : alphas) {
        PlancherelPoint pt;
        pt.resolution = res;
        pt.alpha = alpha;
        pt.psi_norm = center.psi.norm();
        pt.lhs = std::sqrt(weighted_column_l2_sq(band, cs, center, alpha, 1.0 / res, grid));
        pt.rhs = nq / std::sqrt(vm);
        pt.ratio = pt.lhs / pt.rhs;
        out.push_back(pt);
      }
    }
  }
  return out;
}

WeightIntegral weight_integrability(int d, int k, const CylPoint& center, double r, double alpha,
                                    double beta, std::int64_t n_psi_samples, std::uint64_t seed) {
  center.validate();
  if (center.d() != d || center.k() != k) throw std::domain_error("center (d,k) mismatch");
  if (!(r > 0.0 && r <= 1.0)) throw std::domain_error("scale r must lie in (0,1]");
  if (n_psi_samples < 2) throw std::domain_error("need at least two samples");

  const int nl = d - k;
  const double area_d = sphere_area(d);
  const double area_k = sphere_area(k);
  const double ring = sphere_area(k - 1);
  const double rim = M_PI_2 - 1e-9;

  Eigen::VectorXd blo(nl), bhi(nl);
  double box_vol = 1.0;
  for (int j = 0; j < nl; ++j) {
    blo[j] = std::max(center.psi[j] - 2.0 * r, -rim);
    bhi[j] = std::min(center.psi[j] + 2.0 * r, rim);
    box_vol *= bhi[j] - blo[j];
  }

  // Unit vector orthogonal to the center's omega, spanning the test circle.
  Eigen::VectorXd om = center.omega;
  Eigen::Index imin = 0;
  om.cwiseAbs().minCoeff(&imin);
  Eigen::VectorXd ep = Eigen::VectorXd::Zero(k + 1);
  ep[imin] = 1.0;
  ep -= om[imin] * om;
  ep.normalize();

  auto integrand = [&](const Eigen::VectorXd& psi, double theta) {
    CylPoint z{std::cos(theta) * om + std::sin(theta) * ep, psi};
    double dist = distance_surrogate(z, center);
    double w = weight(r, z, center);
    return std::pow(1.0 + dist / r, -beta) * std::pow(1.0 + w, -alpha);
  };

  // Geometric theta panels from the inner ball scale outward; the omega
  // integral for fixed psi is exact up to the panel rule.
  auto theta_integral = [&](const Eigen::VectorXd& psi) {
    double scale = std::max(psi.norm(), center.psi.norm());
    double a = 0.0;
    double b = std::clamp(r * std::max(r, scale), 1e-8, M_PI);
    NeumaierSum s;
    while (a < M_PI) {
      double half = 0.5 * (b - a), mid = 0.5 * (a + b);
      for (int i = 0; i < 4; ++i) {
        for (double sign : {-1.0, 1.0}) {
          double th = mid + sign * half * kGl8X[i];
          s.add(half * kGl8W[i] * integrand(psi, th) * std::pow(std::sin(th), k - 1));
        }
      }
      a = b;
      b = std::min(2.0 * b, M_PI);
      if (b <= a) break;
    }
    return s.value();
  };

  Rng rng(seed, 0);
  NeumaierSum acc, acc2;
  Eigen::VectorXd psi(nl);
  for (std::int64_t s = 0; s < n_psi_samples; ++s) {
    if (rng.uniform() < 0.5) {
      Eigen::VectorXd z(d + 1);
      for (int i = 0; i <= d; ++i) z[i] = rng.normal();
      z.normalize();
      psi = ambient_to_cyl(z, k).psi;
    } else {
      for (int j = 0; j < nl; ++j) psi[j] = rng.uniform(blo[j], bhi[j]);
    }
    CylPoint zp{om, psi};
    double dens = measure_density(zp);
    double q = 0.5 * dens * area_k / area_d;
    bool inbox = true;
    for (int j = 0; j < nl; ++j) inbox = inbox && blo[j] <= psi[j] && psi[j] <= bhi[j];
    if (inbox) q += 0.5 / box_vol;
    double val = dens * ring * theta_integral(psi) / q;
    acc.add(val);
    acc2.add(val * val);
  }
  double mean = acc.value() / static_cast<double>(n_psi_samples);
  double var = std::max(0.0, acc2.value() / static_cast<double>(n_psi_samples) - sq(mean));
  double vm = volume_model(d, k, r, center.psi.norm());
  WeightIntegral out;
  out.ratio = mean / vm;
  out.std_error = std::sqrt(var / static_cast<double>(n_psi_samples - 1)) / vm;
  out.samples = n_psi_samples;
  return out;
}

double weight_growth_constant(int d, int k, std::int64_t n_pairs, std::uint64_t seed) {
  if (!(1 <= k && k < d)) throw std::domain_error("required 1 <= k < d");
  if (n_pairs < 1) throw std::domain_error("need at least one pair");
  Rng rng(seed, 1);
  auto sample_point = [&](double focus) {
    Eigen::VectorXd z(d + 1);
    for (int i = 0; i <= d; ++i) z[i] = rng.normal();
    z.normalize();
    CylPoint p = ambient_to_cyl(z, k);
    double norm = p.psi.norm();
    if (focus > 0.0 && norm > focus) p.psi *= focus * rng.uniform() / norm;
    return p;
  };
  double worst = 0.0;
  for (std::int64_t t = 0; t < n_pairs; ++t) {
    double r = std::pow(0.5, 1 + static_cast<int>(t % 7));
    CylPoint p = sample_point(rng.uniform() < 0.5 ? r : 0.0);
    CylPoint q = sample_point(rng.uniform() < 0.5 ? r : 0.0);
    double ratio = (1.0 + weight(r, p, q)) / (1.0 + distance_surrogate(p, q) / r);
    worst = std::max(worst, ratio);
  }
  return worst;
}

double xi_gauge(double a, double s, double t) {
  if (!(s > 0.0)) throw std::domain_error("gauge scale s must be positive");
  return 1.0 / std::sqrt(s + std::abs(a - t));
}

double det_skew_unit(const Eigen::VectorXd& w) {
  const Eigen::Index n = w.size();
  if (n == 0) return 1.0;
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i > j) m(i, j) = w[i];
      if (i < j) m(i, j) = -w[i];
    }
  return m.determinant();
}

double even_subset_sum(const Eigen::VectorXd& w) {
  const int n = static_cast<int>(w.size());
  if (n > 25) throw std::domain_error("subset enumeration capped at 25 entries");
  NeumaierSum total;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) % 2 != 0) continue;
    double p = 1.0;
    for (int j = 0; j < n; ++j)
      if (mask & (1u << j)) p *= w[j];
    total.add(p);
  }
  return total.value();
}

}  // namespace grushin
