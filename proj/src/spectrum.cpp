#include "grushin/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace grushin {

namespace {

void check_dk(int d, int k) {
  if (!(1 <= k && k < d))
    throw std::domain_error("required 1 <= k < d, got d=" + std::to_string(d) +
                            " k=" + std::to_string(k));
}

// 4*lambda^{d,k} = tl^2 - tm^2 - ((d-1)^2 - (k-1)^2), exact for twice-values.
long quarter_lambda(int d, int k, int tl, int tm) {
  return static_cast<long>(tl) * tl - static_cast<long>(tm) * tm -
         (static_cast<long>(d - 1) * (d - 1) - static_cast<long>(k - 1) * (k - 1));
}

long isqrt_floor(long v) {
  if (v <= 0) return 0;
  long r = static_cast<long>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

}  // namespace

double laplace_eigenvalue(int d, HalfInt l) {
  if (d < 1) throw std::domain_error("d must be >= 1");
  require_lattice(l, d, "l");
  long t = static_cast<long>(l.twice) * l.twice - static_cast<long>(d - 1) * (d - 1);
  return static_cast<double>(t) / 4.0;
}

double grushin_eigenvalue(int d, int k, HalfInt l, HalfInt m) {
  check_dk(d, k);
  require_lattice(l, d, "l");
  require_lattice(m, k, "m");
  if (l.twice < m.twice + (d - k))
    throw std::domain_error("l >= m + (d-k)/2 violated: l=" + l.str() + " m=" + m.str());
  return static_cast<double>(quarter_lambda(d, k, l.twice, m.twice)) / 4.0;
}

std::int64_t sphere_dim(int d, HalfInt l) {
  if (d < 1) throw std::domain_error("d must be >= 1");
  require_lattice(l, d, "l");
  int dg = lattice_degree(l, d);
  auto binom = [](std::int64_t n, std::int64_t r) -> std::int64_t {
    if (r < 0 || r > n) return 0;
    r = std::min(r, n - r);
    std::int64_t v = 1;
    for (std::int64_t i = 1; i <= r; ++i) v = v * (n - r + i) / i;
    return v;
  };
  return binom(dg + d, dg) - binom(dg + d - 2, dg - 2);
}

double ChainIndex::lambda() const {
  return static_cast<double>(quarter_lambda(d, k, top().twice, bottom().twice)) / 4.0;
}

void ChainIndex::validate() const {
  check_dk(d, k);
  if (static_cast<int>(ell.size()) != d - k + 1)
    throw std::domain_error("chain must hold d-k+1 entries");
  for (int r = d; r >= k; --r) {
    require_lattice(at_level(r), r, "l_r");
    if (r < d && at_level(r + 1) < at_level(r))
      throw std::domain_error("chain entries must be non-increasing");
  }
}

void SpectralWindow::validate() const {
  if (i < 1) throw std::domain_error("window index i must be >= 1");
  if (epsilon > 0 && !(epsilon < 1))
    throw std::domain_error("epsilon must lie in (0,1)");
}

double default_epsilon(int d, int k) {
  check_dk(d, k);
  return std::max(0.5, static_cast<double>(k - 1) / (d - 1));
}

namespace {

struct Enumerator {
  int d, k;
  long qlo, qhi;  // quarter-lambda window
  bool inclusive_hi;
  Regime regime;
  double epsilon;
  const std::function<void(const ChainIndex&, double)>* fn;
  ChainIndex chain;
  std::int64_t count = 0;

  bool lambda_ok(long q) const {
    return q >= qlo && (q < qhi || (inclusive_hi && q == qhi));
  }

  bool regime_ok(int tl, int tm) const {
    if (regime == Regime::all) return true;
    double lhs = tm, rhs = epsilon * tl;  // ties belong to both regimes
    return regime == Regime::elliptic ? lhs <= rhs + 1e-9 : lhs >= rhs - 1e-9;
  }

  // Superset of feasible bottom twice-values for a fixed top twice-value;
  // exact membership is re-checked via lambda_ok.
  std::pair<int, int> bottom_range(int tl) const {
    long base = static_cast<long>(tl) * tl -
                (static_cast<long>(d - 1) * (d - 1) - static_cast<long>(k - 1) * (k - 1));
    long hi2 = base - qlo;  // tm^2 <= hi2
    long lo2 = base - qhi;  // tm^2 >= lo2
    if (hi2 < 0) return {1, 0};
    int tm_hi = static_cast<int>(isqrt_floor(hi2));
    int tm_lo = static_cast<int>(std::max<long>(k - 1, isqrt_floor(std::max<long>(lo2, 0)) - 1));
    tm_hi = std::min(tm_hi, tl - (d - k));
    return {tm_lo, tm_hi};
  }

  // Levels r = d-1, ..., k+1 in lexicographic order; level k is pinned to the
  // window at the end.
  void descend(int r, int tm_lo, int tm_hi) {
    int t_prev = chain.ell[static_cast<size_t>(d - (r + 1))].twice;
    if (r == k) {
      for (int tm = std::max(tm_lo, k - 1); tm <= std::min(tm_hi, t_prev - 1); ++tm) {
        if ((tm - (k - 1)) % 2 != 0) continue;
        long q = quarter_lambda(d, k, chain.top().twice, tm);
        if (!lambda_ok(q) || !regime_ok(chain.top().twice, tm)) continue;
        chain.ell[static_cast<size_t>(d - k)] = HalfInt{tm};
        (*fn)(chain, static_cast<double>(q) / 4.0);
        ++count;
      }
      return;
    }
    int t_min = std::max(r - 1, tm_lo + (r - k));  // room for the rest of the descent
    for (int t = t_min; t <= t_prev - 1; ++t) {
      if ((t - (r - 1)) % 2 != 0) continue;
      if (std::min(tm_hi, t - (r - k)) < tm_lo) continue;
      chain.ell[static_cast<size_t>(d - r)] = HalfInt{t};
      descend(r - 1, tm_lo, std::min(tm_hi, t - (r - k)));
    }
  }

  void run() {
    for (int tl = d - 1;; tl += 2) {
      long qmin = quarter_lambda(d, k, tl, tl - (d - k));  // increasing in tl
      if (qmin > qhi || (qmin == qhi && !inclusive_hi)) break;
      auto [tm_lo, tm_hi] = bottom_range(tl);
      if (tm_lo > tm_hi) continue;
      chain.ell[0] = HalfInt{tl};
      descend(d - 1, tm_lo, tm_hi);
    }
  }
};

}  // namespace

std::int64_t enumerate_lambda_range(
    int d, int k, double lo, double hi, bool inclusive_hi, Regime regime,
    double epsilon, const std::function<void(const ChainIndex&, double)>& fn) {
  check_dk(d, k);
  if (!(lo <= hi)) throw std::domain_error("lambda range must satisfy lo <= hi");
  Enumerator e;
  e.d = d;
  e.k = k;
  // lambda values live on the quarter-integer grid, so snap the window to it
  e.qlo = static_cast<long>(std::ceil(4.0 * std::max(lo, 0.0) - 1e-9));
  e.qhi = static_cast<long>(std::floor(4.0 * hi + 1e-9));
  e.inclusive_hi = inclusive_hi || (4.0 * hi - static_cast<double>(e.qhi) > 1e-9);
  e.regime = regime;
  e.epsilon = epsilon > 0 ? epsilon : default_epsilon(d, k);
  e.fn = &fn;
  e.chain.d = d;
  e.chain.k = k;
  e.chain.ell.assign(static_cast<size_t>(d - k + 1), HalfInt{0});
  e.run();
  return e.count;
}

std::int64_t enumerate_chains(
    int d, int k, const SpectralWindow& w,
    const std::function<void(const ChainIndex&, double)>& fn) {
  w.validate();
  double lo = static_cast<double>(w.i) * w.i;
  double hi = static_cast<double>(w.i + 1) * (w.i + 1);
  return enumerate_lambda_range(d, k, lo, hi, false, w.regime, w.epsilon, fn);
}

std::vector<ChainIndex> enumerate_chains(int d, int k, const SpectralWindow& w) {
  std::vector<ChainIndex> out;
  enumerate_chains(d, k, w, [&](const ChainIndex& c, double) { out.push_back(c); });
  return out;
}

HalfInt max_top_index(int d, int k, double lam_max) {
  check_dk(d, k);
  int tl = d - 1;
  while (quarter_lambda(d, k, tl + 2, tl + 2 - (d - k)) <= 4.0 * lam_max + 1e-9) tl += 2;
  return HalfInt{tl};
}

}  // namespace grushin
