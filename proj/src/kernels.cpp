#include "grushin/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "grushin/special.hpp"
#include "grushin/sum.hpp"

namespace grushin {

namespace {

double sq(double v) { return v * v; }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// In-place radix-2 complex FFT (size must be a power of two).
void fft_inplace(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * M_PI / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        std::complex<double> u = a[i + j], v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

}  // namespace

MultiplierSpec MultiplierSpec::heat(double t) {
  MultiplierSpec f;
  f.kind = Kind::heat;
  f.t = t;
  f.validate();
  return f;
}

MultiplierSpec MultiplierSpec::bochner_riesz(double t, double delta) {
  MultiplierSpec f;
  f.kind = Kind::bochner_riesz;
  f.t = t;
  f.delta = delta;
  f.validate();
  return f;
}

MultiplierSpec MultiplierSpec::indicator(double lo, double hi) {
  MultiplierSpec f;
  f.kind = Kind::indicator;
  f.lo = lo;
  f.hi = hi;
  f.validate();
  return f;
}

MultiplierSpec MultiplierSpec::table(std::vector<double> samples, double table_max) {
  MultiplierSpec f;
  f.kind = Kind::table;
  f.samples = std::move(samples);
  f.table_max = table_max;
  f.validate();
  return f;
}

void MultiplierSpec::validate() const {
  switch (kind) {
    case Kind::heat:
      if (!(t > 0.0)) throw std::domain_error("heat multiplier needs t > 0");
      break;
    case Kind::bochner_riesz:
      if (!(t > 0.0)) throw std::domain_error("bochner_riesz multiplier needs t > 0");
      if (!(delta >= 0.0)) throw std::domain_error("bochner_riesz order must be >= 0");
      break;
    case Kind::indicator:
      if (!(lo <= hi)) throw std::domain_error("indicator window needs lo <= hi");
      break;
    case Kind::table:
      if (samples.size() < 2) throw std::domain_error("table multiplier needs >= 2 samples");
      if (!(table_max > 0.0)) throw std::domain_error("table grid end must be positive");
      break;
  }
}

double MultiplierSpec::operator()(double s) const {
  switch (kind) {
    case Kind::heat:
      return std::exp(-t * s * s);
    case Kind::bochner_riesz: {
      double u = 1.0 - t * s * s;
      if (u <= 0.0) return 0.0;
      return delta == 0.0 ? 1.0 : std::pow(u, delta);
    }
    case Kind::indicator:
      return (lo <= s && s <= hi) ? 1.0 : 0.0;
    case Kind::table: {
      if (s < 0.0 || s > table_max) return 0.0;
      double pos = s / table_max * static_cast<double>(samples.size() - 1);
      auto i = static_cast<std::size_t>(pos);
      if (i + 1 >= samples.size()) return samples.back();
      double f = pos - static_cast<double>(i);
      return samples[i] * (1.0 - f) + samples[i + 1] * f;
    }
  }
  return 0.0;
}

double MultiplierSpec::tail_sup(double s_max) const {
  switch (kind) {
    case Kind::heat:
      return std::exp(-t * s_max * s_max);
    case Kind::bochner_riesz: {
      double u = 1.0 - t * s_max * s_max;
      if (u <= 0.0) return 0.0;
      return delta == 0.0 ? 1.0 : std::pow(u, delta);
    }
    case Kind::indicator:
      return hi > s_max ? 1.0 : 0.0;
    case Kind::table: {
      if (s_max >= table_max) return 0.0;
      double sup = std::abs((*this)(s_max));
      double step = table_max / static_cast<double>(samples.size() - 1);
      for (std::size_t i = 0; i < samples.size(); ++i)
        if (static_cast<double>(i) * step > s_max) sup = std::max(sup, std::abs(samples[i]));
      return sup;
    }
  }
  return 0.0;
}

MultiplierSpec MultiplierSpec::dilated(double c) const {
  if (!(c > 0.0)) throw std::domain_error("dilation factor must be positive");
  MultiplierSpec g = *this;
  switch (kind) {
    case Kind::heat:
    case Kind::bochner_riesz:
      g.t = t * c * c;
      break;
    case Kind::indicator:
      g.lo = lo / c;
      g.hi = hi / c;
      break;
    case Kind::table:
      g.table_max = table_max / c;
      break;
  }
  return g;
}

int ChainSet::max_bottom_degree() const {
  int mt = k - 1;
  for (int b : bottom_twice) mt = std::max(mt, b);
  return (mt - (k - 1)) / 2;
}

ChainSet chain_set_from(int d, int k, std::vector<ChainIndex> chains) {
  if (!(1 <= k && k < d)) throw std::domain_error("required 1 <= k < d");
  ChainSet cs;
  cs.d = d;
  cs.k = k;
  const int nl = d - k;
  const auto n = static_cast<std::int64_t>(chains.size());
  cs.chains = std::move(chains);
  cs.lambda.resize(n);
  cs.weight_dim.resize(n);
  cs.bottom_twice.resize(static_cast<std::size_t>(n));
  cs.levels.resize(static_cast<std::size_t>(nl));
  cs.slot.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(nl));

  double cap = 0.0;
  std::vector<std::map<int, int>> tops(static_cast<std::size_t>(nl));
  for (std::int64_t c = 0; c < n; ++c) {
    const ChainIndex& ch = cs.chains[static_cast<std::size_t>(c)];
    ch.validate();
    if (ch.d != d || ch.k != k) throw std::domain_error("chain (d,k) mismatch in chain set");
    cs.lambda[c] = ch.lambda();
    cap = std::max(cap, cs.lambda[c]);
    cs.weight_dim[c] = static_cast<double>(sphere_dim(k, ch.bottom()));
    cs.bottom_twice[static_cast<std::size_t>(c)] = ch.bottom().twice;
    for (int j = 0; j < nl; ++j) {
      int r = k + 1 + j;
      int mt = ch.at_level(r - 1).twice;
      int lt = ch.at_level(r).twice;
      auto [it, fresh] = tops[static_cast<std::size_t>(j)].try_emplace(mt, lt);
      if (!fresh) it->second = std::max(it->second, lt);
    }
  }
  cs.lambda_cap = cap;

  for (int j = 0; j < nl; ++j) {
    auto& lay = cs.levels[static_cast<std::size_t>(j)];
    const auto& top = tops[static_cast<std::size_t>(j)];
    if (top.empty()) continue;
    lay.min_m_twice = top.begin()->first;
    int slots = (top.rbegin()->first - lay.min_m_twice) / 2 + 1;
    lay.start.assign(static_cast<std::size_t>(slots), -1);
    lay.top_twice.assign(static_cast<std::size_t>(slots), 0);
    std::int64_t off = 0;
    for (auto [mt, lt] : top) {
      auto sidx = static_cast<std::size_t>((mt - lay.min_m_twice) / 2);
      lay.start[sidx] = off;
      lay.top_twice[sidx] = lt;
      off += (lt - mt - 1) / 2 + 1;
    }
    lay.size = off;
  }

  for (std::int64_t c = 0; c < n; ++c) {
    const ChainIndex& ch = cs.chains[static_cast<std::size_t>(c)];
    for (int j = 0; j < nl; ++j) {
      int r = k + 1 + j;
      int mt = ch.at_level(r - 1).twice;
      int lt = ch.at_level(r).twice;
      const auto& lay = cs.levels[static_cast<std::size_t>(j)];
      auto sidx = static_cast<std::size_t>((mt - lay.min_m_twice) / 2);
      cs.slot[static_cast<std::size_t>(c) * static_cast<std::size_t>(nl) + static_cast<std::size_t>(j)] =
          lay.start[sidx] + (lt - mt - 1) / 2;
    }
  }
  return cs;
}

ChainSet collect_chains(int d, int k, double lambda_max) {
  if (!(lambda_max >= 0.0)) throw std::domain_error("lambda_max must be >= 0");
  std::vector<ChainIndex> chains;
  enumerate_lambda_range(d, k, 0.0, lambda_max * lambda_max, /*inclusive_hi=*/true, Regime::all,
                         0.0, [&](const ChainIndex& c, double) { chains.push_back(c); });
  return chain_set_from(d, k, std::move(chains));
}

ChainSet collect_window(int d, int k, const SpectralWindow& w) {
  return chain_set_from(d, k, enumerate_chains(d, k, w));
}

Eigen::ArrayXd chain_values_x(const ChainSet& cs, const Eigen::VectorXd& x) {
  const int nl = cs.d - cs.k;
  if (x.size() != nl) throw std::domain_error("coordinate count must equal d-k");
  std::vector<std::vector<double>> vals(static_cast<std::size_t>(nl));
  for (int j = 0; j < nl; ++j) {
    const auto& lay = cs.levels[static_cast<std::size_t>(j)];
    auto& buf = vals[static_cast<std::size_t>(j)];
    buf.assign(static_cast<std::size_t>(lay.size), 0.0);
    int r = cs.k + 1 + j;
    for (std::size_t sidx = 0; sidx < lay.start.size(); ++sidx) {
      if (lay.start[sidx] < 0) continue;
      HalfInt m{lay.min_m_twice + 2 * static_cast<int>(sidx)};
      HalfInt top{lay.top_twice[sidx]};
      std::vector<ScaledValue> lad = xtilde_ladder(r, m, top, x[j]);
      for (std::size_t t = 0; t < lad.size(); ++t)
        buf[static_cast<std::size_t>(lay.start[sidx]) + t] = lad[t].value();
    }
  }
  const auto n = static_cast<std::int64_t>(cs.chains.size());
  Eigen::ArrayXd out(n);
  for (std::int64_t c = 0; c < n; ++c) {
    double v = 1.0;
    for (int j = 0; j < nl; ++j)
      v *= vals[static_cast<std::size_t>(j)]
               [static_cast<std::size_t>(cs.slot[static_cast<std::size_t>(c) * static_cast<std::size_t>(nl) +
                                                 static_cast<std::size_t>(j)])];
    out[c] = v;
  }
  return out;
}

Eigen::ArrayXd chain_values(const ChainSet& cs, const Eigen::VectorXd& psi) {
  return chain_values_x(cs, psi.array().sin().matrix());
}

Eigen::ArrayXd zonal_family(int k, int max_degree, double u) {
  if (k < 1) throw std::domain_error("zonal kernels need k >= 1");
  if (max_degree < 0) throw std::domain_error("max_degree must be >= 0");
  if (u < -1.0 || u > 1.0)
    throw std::domain_error("zonal argument must lie in [-1,1], got " + std::to_string(u));

  Eigen::ArrayXd out(max_degree + 1);
  const double area = sphere_area(k);
  auto dim = [k](int n) { return static_cast<double>(sphere_dim(k, HalfInt{2 * n + k - 1})); };

  if (k == 1) {
    double theta = std::acos(u);
    out[0] = 1.0 / area;
    for (int n = 1; n <= max_degree; ++n) out[n] = 2.0 * std::cos(n * theta) / area;
    return out;
  }

  const double a = 0.5 * static_cast<double>(k - 2);
  out[0] = dim(0) / area;
  if (max_degree == 0) return out;
  double vm2 = 1.0;
  double vm1 = (1.0 + a) * u;
  double pm1 = 1.0 + a;
  out[1] = dim(1) * (vm1 / pm1) / area;
  const double s = 2.0 * a;
  for (int n = 2; n <= max_degree; ++n) {
    double t2 = 2.0 * n + s;
    double c0 = 2.0 * n * (n + s) * (t2 - 2.0);
    double cx = (t2 - 1.0) * t2 * (t2 - 2.0);
    double c2 = 2.0 * (n + a - 1.0) * (n + a - 1.0) * t2;
    double vn = (cx * u * vm1 - c2 * vm2) / c0;
    double pn = pm1 * (n + a) / n;
    out[n] = dim(n) * (vn / pn) / area;
    vm2 = vm1;
    vm1 = vn;
    pm1 = pn;
  }
  return out;
}

double zonal_kernel(int k, HalfInt m, double cos_theta) {
  require_lattice(m, k, "zonal degree");
  if (cos_theta < -1.0 || cos_theta > 1.0)
    throw std::domain_error("zonal argument must lie in [-1,1], got " + std::to_string(cos_theta));
  int degree = (m.twice - (k - 1)) / 2;
  return zonal_family(k, degree, cos_theta)[degree];
}

double chain_eigenfunction(const ChainIndex& c, const Eigen::VectorXd& psi) {
  c.validate();
  if (psi.size() != c.d - c.k) throw std::domain_error("psi size must equal d-k");
  double v = 1.0;
  for (int r = c.k + 1; r <= c.d; ++r)
    v *= profile_eval({r, c.at_level(r), c.at_level(r - 1)}, psi[r - c.k - 1]);
  return v;
}

namespace {

void check_point(const ChainSet& cs, const CylPoint& p) {
  p.validate();
  if (p.d() != cs.d || p.k() != cs.k)
    throw std::domain_error("point must live on the chain set's sphere");
}

// F(sqrt(lambda_c)) X_c(psi_q) per chain.
Eigen::ArrayXd column_coefficients(const MultiplierSpec& F, const ChainSet& cs, const CylPoint& q) {
  Eigen::ArrayXd vq = chain_values(cs, q.psi);
  for (std::int64_t c = 0; c < vq.size(); ++c) vq[c] *= F(std::sqrt(cs.lambda[c]));
  return vq;
}

Eigen::ArrayXd bottom_dims(const ChainSet& cs, int max_degree) {
  Eigen::ArrayXd dims(max_degree + 1);
  for (int nn = 0; nn <= max_degree; ++nn)
    dims[nn] = static_cast<double>(sphere_dim(cs.k, HalfInt{2 * nn + cs.k - 1}));
  return dims;
}

// Iterates the tensor-product psi grid; body(x, weight) runs per node.
template <class Body>
void for_each_node(const ChainSet& cs, const QuadratureGrid& grid, const Body& body) {
  if (grid.d != cs.d || grid.k != cs.k) throw std::domain_error("grid (d,k) mismatch");
  const int nl = cs.d - cs.k;
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

double multiplier_kernel(const MultiplierSpec& F, const ChainSet& cs,
                         const CylPoint& p, const CylPoint& q) {
  F.validate();
  check_point(cs, p);
  check_point(cs, q);
  if (cs.chains.empty()) return 0.0;
  double u = std::clamp(p.omega.dot(q.omega), -1.0, 1.0);
  Eigen::ArrayXd zf = zonal_family(cs.k, cs.max_bottom_degree(), u);
  Eigen::ArrayXd vp = chain_values(cs, p.psi);
  Eigen::ArrayXd vq = chain_values(cs, q.psi);
  NeumaierSum acc;
  for (std::int64_t c = 0; c < vp.size(); ++c) {
    double f = F(std::sqrt(cs.lambda[c]));
    if (f == 0.0) continue;
    acc.add(f * zf[(cs.bottom_twice[static_cast<std::size_t>(c)] - (cs.k - 1)) / 2] * vp[c] * vq[c]);
  }
  return acc.value();
}

double multiplier_kernel(const MultiplierSpec& F, int d, int k, double lambda_max,
                         const CylPoint& p, const CylPoint& q) {
  return multiplier_kernel(F, collect_chains(d, k, lambda_max), p, q);
}

double kernel_column_l2_sq(const MultiplierSpec& F, const ChainSet& cs, const CylPoint& q) {
  F.validate();
  check_point(cs, q);
  if (cs.chains.empty()) return 0.0;
  Eigen::ArrayXd vq = chain_values(cs, q.psi);
  NeumaierSum acc;
  for (std::int64_t c = 0; c < vq.size(); ++c)
    acc.add(cs.weight_dim[c] * sq(F(std::sqrt(cs.lambda[c]))) * sq(vq[c]));
  return acc.value() / sphere_area(cs.k);
}

double weighted_column_l2_sq(const MultiplierSpec& F, const ChainSet& cs, const CylPoint& q,
                             double alpha, double r, const QuadratureGrid& grid) {
  F.validate();
  check_point(cs, q);
  if (!(r > 0.0)) throw std::domain_error("weight scale r must be positive");
  if (!(alpha >= 0.0)) throw std::domain_error("weight exponent must be >= 0");
  if (cs.chains.empty()) return 0.0;

  Eigen::ArrayXd coef = column_coefficients(F, cs, q);
  const int maxdeg = cs.max_bottom_degree();
  Eigen::ArrayXd dims = bottom_dims(cs, maxdeg);
  const double denom = std::max(r, q.psi.norm());
  const double area_k = sphere_area(cs.k);
  const int nl = cs.d - cs.k;

  Eigen::ArrayXd gm(maxdeg + 1);
  NeumaierSum acc;
  for_each_node(cs, grid, [&](const Eigen::VectorXd& xv, double w) {
    Eigen::ArrayXd v = chain_values_x(cs, xv);
    gm.setZero();
    for (std::int64_t c = 0; c < v.size(); ++c)
      gm[(cs.bottom_twice[static_cast<std::size_t>(c)] - (cs.k - 1)) / 2] += coef[c] * v[c];
    double psi_norm = 0.0;
    for (int j = 0; j < nl; ++j) psi_norm += sq(std::asin(std::clamp(xv[j], -1.0, 1.0)));
    psi_norm = std::sqrt(psi_norm);
    double wf = std::pow(1.0 + psi_norm / denom, 2.0 * alpha);
    acc.add(w * wf * (dims * gm.square()).sum());
  });
  return acc.value() / area_k;
}

double l1_column_norm(const MultiplierSpec& F, const ChainSet& cs, const CylPoint& q,
                      const QuadratureGrid& grid) {
  F.validate();
  check_point(cs, q);
  if (cs.chains.empty()) return 0.0;

  Eigen::ArrayXd coef = column_coefficients(F, cs, q);
  const int maxdeg = cs.max_bottom_degree();
  const auto& zr = grid.zonal;
  Eigen::MatrixXd zf(zr.x.size(), maxdeg + 1);
  for (Eigen::Index i = 0; i < zr.x.size(); ++i)
    zf.row(i) = zonal_family(cs.k, maxdeg, zr.x[i]).matrix().transpose();
  const double ring = sphere_area(cs.k - 1);

  Eigen::VectorXd gm(maxdeg + 1);
  NeumaierSum acc;
  for_each_node(cs, grid, [&](const Eigen::VectorXd& xv, double w) {
    Eigen::ArrayXd v = chain_values_x(cs, xv);
    gm.setZero();
    for (std::int64_t c = 0; c < v.size(); ++c)
      gm[(cs.bottom_twice[static_cast<std::size_t>(c)] - (cs.k - 1)) / 2] += coef[c] * v[c];
    Eigen::VectorXd su = zf * gm;
    double inner = 0.0;
    for (Eigen::Index i = 0; i < su.size(); ++i) inner += zr.w[i] * std::abs(su[i]);
    acc.add(w * ring * inner);
  });
  return acc.value();
}

double l1_operator_norm(const MultiplierSpec& F, const ChainSet& cs,
                        const std::vector<CylPoint>& centers, const QuadratureGrid& grid) {
  if (centers.empty()) throw std::domain_error("need at least one center");
  double best = 0.0;
  for (const CylPoint& q : centers) best = std::max(best, l1_column_norm(F, cs, q, grid));
  return best;
}

double l1_column_norm_banded(const MultiplierSpec& F, double lambda_max, double psi_center) {
  F.validate();
  if (!(lambda_max >= 1.0)) throw std::domain_error("lambda_max must be >= 1");
  if (!(std::abs(psi_center) < M_PI_2)) throw std::domain_error("center must be interior");

  const double lamsq = lambda_max * lambda_max;
  const int mmax = static_cast<int>(std::floor(lamsq + 1e-9));
  const double xc = std::sin(psi_center);

  // Ladder coefficients F(sqrt(lambda)) X~_{l,m}(x_center) per circle mode m.
  std::vector<std::vector<double>> coef(static_cast<std::size_t>(mmax) + 1);
  for (int m = 0; m <= mmax; ++m) {
    auto lam_at = [m](int t) {
      double l = m + 0.5 + static_cast<double>(t);
      return l * l - 0.25 - static_cast<double>(m) * static_cast<double>(m);
    };
    int tmax = static_cast<int>(std::floor((std::sqrt(4.0 * (lamsq + sq(m)) + 1.0) - (2.0 * m + 1.0)) / 2.0));
    while (lam_at(tmax + 1) <= lamsq) ++tmax;
    while (tmax >= 0 && lam_at(tmax) > lamsq) --tmax;
    if (tmax < 0) continue;
    auto lad = xtilde_ladder(2, HalfInt{2 * m}, HalfInt{2 * m + 1 + 2 * tmax}, xc);
    auto& cf = coef[static_cast<std::size_t>(m)];
    cf.resize(lad.size());
    for (std::size_t t = 0; t < lad.size(); ++t)
      cf[t] = F(std::sqrt(lam_at(static_cast<int>(t)))) * lad[t].value();
  }

  // Dyadic bands in |psi|: at |sin psi| = x only modes m <~ lambda_max / x
  // reach their oscillatory region, so the circle bandwidth shrinks with the
  // distance from the collapsed submanifold.
  struct Seg {
    double lo, hi;
    int bandwidth;
  };
  std::vector<Seg> segs;
  const double e0 = std::min(0.5 / lambda_max, M_PI_2);
  segs.push_back({-e0, e0, mmax});
  for (double lo = e0; lo < M_PI_2;) {
    double hi = std::min(2.0 * lo, M_PI_2);
    double want = 6.0 * lambda_max / std::sin(lo) + 64.0;
    int bw = want < mmax ? static_cast<int>(want) : mmax;
    segs.push_back({lo, hi, bw});
    segs.push_back({-hi, -lo, bw});
    lo = hi;
  }

  const double hstep = 0.25 / lambda_max;
  NeumaierSum total;
  std::vector<std::complex<double>> buf;
  for (const Seg& s : segs) {
    int nn = std::max(2, static_cast<int>(std::ceil((s.hi - s.lo) / hstep)));
    double h = (s.hi - s.lo) / nn;
    auto fft_n = next_pow2(static_cast<std::size_t>(4 * (s.bandwidth + 1)));
    if (fft_n < 256) fft_n = 256;
    for (int i = 0; i < nn; ++i) {
      double psi = s.lo + (i + 0.5) * h;
      double x = std::sin(psi);
      buf.assign(fft_n, {0.0, 0.0});
      for (int m = 0; m <= s.bandwidth; ++m) {
        const auto& cf = coef[static_cast<std::size_t>(m)];
        if (cf.empty()) continue;
        double g = xtilde_ladder_dot(2, HalfInt{2 * m}, x, cf.data(), static_cast<int>(cf.size()));
        buf[static_cast<std::size_t>(m)] = {(m == 0 ? 1.0 : 2.0) * g / (2.0 * M_PI), 0.0};
      }
      fft_inplace(buf);
      double s1 = 0.0;
      for (const auto& z : buf) s1 += std::abs(z.real());
      total.add(std::cos(psi) * h * (2.0 * M_PI / static_cast<double>(fft_n)) * s1);
    }
  }
  return total.value();
}

namespace {

double chain_psi_value(const ChainIndex& c, const Eigen::VectorXd& psi) {
  double v = 1.0;
  for (int r = c.k + 1; r <= c.d; ++r)
    v *= profile_eval({r, c.at_level(r), c.at_level(r - 1)}, psi[r - c.k - 1]);
  return v;
}

double density_at(const Eigen::VectorXd& psi, int k) {
  double dens = 1.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i)
    dens *= std::pow(std::cos(psi[i]), static_cast<double>(k + i));
  return dens;
}

// density * (field coefficient)^2 at psi for the level-r field, whose
// coefficient is 1 / (cos psi_{r+1} ... cos psi_d).
double coeff_sq_density(const Eigen::VectorXd& psi, int k, int r) {
  int d = k + static_cast<int>(psi.size());
  double c = 1.0;
  for (int rr = r + 1; rr <= d; ++rr) c *= std::cos(psi[rr - k - 1]);
  return density_at(psi, k) / (c * c);
}

template <class Fn>
double deriv5(const Fn& f, double h) {
  return (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h);
}

}  // namespace

double apply_grushin_residual(const ChainIndex& c, const Eigen::VectorXd& psi, double h) {
  c.validate();
  const int nl = c.d - c.k;
  if (psi.size() != nl) throw std::domain_error("psi size must equal d-k");
  if (!(h > 0.0)) throw std::domain_error("step h must be positive");
  for (Eigen::Index j = 0; j < psi.size(); ++j)
    if (!(std::abs(psi[j]) + 2.5 * h < M_PI_2))
      throw std::domain_error("psi must stay interior with a 2h margin");

  const double lam = c.lambda();
  const double lam_bottom = laplace_eigenvalue(c.k, c.bottom());
  const double f0 = chain_psi_value(c, psi);
  const double dens0 = density_at(psi, c.k);

  double lsum = 0.0;
  for (int r = c.k + 1; r <= c.d; ++r) {
    int j = r - c.k - 1;
    auto inner = [&](double s) {
      Eigen::VectorXd p2 = psi;
      p2[j] += s;
      auto fx = [&](double s2) {
        Eigen::VectorXd p3 = p2;
        p3[j] += s2;
        return chain_psi_value(c, p3);
      };
      return coeff_sq_density(p2, c.k, r) * deriv5(fx, h);
    };
    lsum -= deriv5(inner, h) / dens0;
  }
  lsum += potential(psi) * lam_bottom * f0;
  return std::abs(lsum - lam * f0) / (std::abs(lam) * std::abs(f0) + 1.0);
}

double norm_Nq(const MultiplierSpec& F, int N, double q_exp) {
  F.validate();
  if (N < 1) throw std::domain_error("N must be >= 1");
  if (!(q_exp >= 2.0)) throw std::domain_error("q exponent must be >= 2 (or inf)");
  const int sub = 64;
  if (std::isinf(q_exp)) {
    double sup = 0.0;
    for (int i = 0; i <= N * sub; ++i)
      sup = std::max(sup, std::abs(F(static_cast<double>(i) / (N * sub))));
    return sup;
  }
  NeumaierSum acc;
  for (int i = 1; i <= N; ++i) {
    double sup = 0.0;
    for (int s = 0; s <= sub; ++s) {
      double lam = (i - 1 + static_cast<double>(s) / sub) / N;
      sup = std::max(sup, std::abs(F(lam)));
    }
    acc.add(std::pow(sup, q_exp));
  }
  return std::pow(acc.value() / N, 1.0 / q_exp);
}

}  // namespace grushin
