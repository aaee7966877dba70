#include "grushin/oracle.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace grushin {

namespace {

using Big = boost::multiprecision::cpp_bin_float_100;

Big jacobi_big(int j, const Big& a, const Big& b, const Big& x) {
  const Big hm = (x - 1) / 2;
  const Big hp = (x + 1) / 2;

  // hp^t for t = 0..j (avoids dividing by hp, which vanishes at x = -1)
  std::vector<Big> hp_pow(static_cast<std::size_t>(j) + 1);
  hp_pow[0] = 1;
  for (int t = 1; t <= j; ++t)
    hp_pow[static_cast<std::size_t>(t)] = hp_pow[static_cast<std::size_t>(t - 1)] * hp;

  // c1 = binom(j+alpha, j-s), c2 = binom(j+beta, s), updated per step:
  //   c1(s+1) = c1(s) * (j-s) / (alpha+s+1)
  //   c2(s+1) = c2(s) * (j+beta-s) / (s+1)
  Big c1 = 1;  // binom(j+alpha, j) = prod_{i=1}^{j} (alpha+i)/i
  for (int i = 1; i <= j; ++i) c1 *= (a + i) / i;
  Big c2 = 1;

  Big sum = 0;
  Big hm_pow = 1;
  for (int s = 0; s <= j; ++s) {
    sum += c1 * c2 * hm_pow * hp_pow[static_cast<std::size_t>(j - s)];
    if (s < j) {
      c1 *= Big(j - s) / (a + s + 1);
      c2 *= (Big(j) + b - s) / (s + 1);
      hm_pow *= hm;
    }
  }
  return sum;
}

// X~^r_{l,m}(x) with gamma-function normalization, all in 100-digit floats.
Big profile_big(int r, int tl, int tm, const Big& x) {
  const Big l = Big(tl) / 2, m = Big(tm) / 2;
  const int j = (tl - tm - 1) / 2;
  using boost::math::tgamma;
  Big c = sqrt(l * tgamma(l - m + Big(0.5)) * tgamma(l + m + Big(0.5))) /
          (pow(Big(2), m) * tgamma(l + Big(0.5)));
  Big g = 1 - x * x;
  Big qexp = m / 2 - Big(r - 2) / 4;
  Big env = qexp == 0 ? Big(1) : pow(g, qexp);
  return c * env * jacobi_big(j, m, m, x);
}

// dim of the degree-n spherical harmonics on S^k, by the product formula.
Big harmonic_dim_big(int k, int n) {
  if (n == 0) return 1;
  if (k == 1) return 2;
  Big binom = 1;  // binom(n+k-2, n)
  for (int i = 1; i <= n; ++i) binom *= Big(k - 2 + i) / i;
  return Big(2 * n + k - 1) / (k - 1) * binom;
}

// Closed-form moment int_{S^k} prod x_i^{e_i} dsigma for even exponents:
// 2 prod Gamma((e_i+1)/2) / Gamma((k+1+sum e_i)/2); zero otherwise.
double sphere_moment(const Eigen::ArrayXi& e) {
  double logp = std::log(2.0);
  int total = 0;
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    if (e[i] % 2 != 0) return 0.0;
    logp += std::lgamma(0.5 * (e[i] + 1));
    total += e[i];
  }
  logp -= std::lgamma(0.5 * (e.size() + total));
  return std::exp(logp);
}

}  // namespace

double jacobi_oracle(const JacobiIndex& idx, double x) {
  idx.validate();
  if (x < -1.0 || x > 1.0) {
    throw std::domain_error("jacobi argument must lie in [-1,1], got " + std::to_string(x));
  }
  return static_cast<double>(jacobi_big(idx.j, Big(idx.alpha), Big(idx.beta), Big(x)));
}

double cluster_sum_oracle(int d, int k, int i, Regime regime, double alpha, double epsilon,
                          const Eigen::VectorXd& x) {
  if (!(1 <= k && k < d)) throw std::domain_error("required 1 <= k < d");
  if (i < 1) throw std::domain_error("window index i must be >= 1");
  if (x.size() != d - k) throw std::domain_error("coordinate count must equal d-k");
  if (epsilon <= 0.0) epsilon = std::max(0.5, static_cast<double>(k - 1) / (d - 1));

  // 4 lambda = t_d^2 - (d-1)^2 - t_k^2 + (k-1)^2 on the twice-value grid.
  const long qlo = 4L * i * i;
  const long qhi = 4L * (i + 1) * (i + 1);
  const long shift = static_cast<long>(d - 1) * (d - 1) - static_cast<long>(k - 1) * (k - 1);

  std::vector<Big> xb(static_cast<std::size_t>(d - k));
  for (int j = 0; j < d - k; ++j) {
    if (x[j] < -1.0 || x[j] > 1.0) throw std::domain_error("coordinates must lie in [-1,1]");
    xb[static_cast<std::size_t>(j)] = Big(x[j]);
  }

  Big total = 0;
  std::vector<int> tw(static_cast<std::size_t>(d - k + 1));  // tw[0] = level d
  // Plain nested descent over non-increasing admissible twice-values.
  std::function<void(int)> descend = [&](int pos) {
    const int r = d - pos;  // level being filled
    if (r == k) {
      const int tl = tw[0], tprev = tw[static_cast<std::size_t>(pos - 1)];
      for (int tm = k - 1; tm <= tprev - 1; tm += 2) {
        long q = static_cast<long>(tl) * tl - static_cast<long>(tm) * tm - shift;
        if (q < qlo || q >= qhi) continue;
        double lhs = tm, rhs = epsilon * tl;
        if (regime == Regime::elliptic && !(lhs <= rhs + 1e-9)) continue;
        if (regime == Regime::subelliptic && !(lhs >= rhs - 1e-9)) continue;
        tw[static_cast<std::size_t>(pos)] = tm;
        Big val = 1;
        for (int rr = k + 1; rr <= d; ++rr)
          val *= profile_big(rr, tw[static_cast<std::size_t>(d - rr)],
                             tw[static_cast<std::size_t>(d - rr + 1)],
                             xb[static_cast<std::size_t>(rr - k - 1)]);
        Big lam = Big(q) / 4;
        Big weight = harmonic_dim_big(k, (tm - (k - 1)) / 2);
        if (alpha != 0.0) weight *= pow(lam / (Big(tl) * tl / 4), Big(alpha));
        total += weight * val * val;
      }
      return;
    }
    if (r == d) {
      // The shallowest chain from top t bottoms out at tm = t - (d-k), so its
      // quarter-lambda 2t(d-k) - (d-k)^2 - shift is the minimum over chains
      // with that top; once it clears the window no larger top can re-enter.
      for (int t = d - 1;; t += 2) {
        long q_min = 2L * t * (d - k) - static_cast<long>(d - k) * (d - k) - shift;
        if (q_min >= qhi) break;
        tw[0] = t;
        descend(1);
      }
      return;
    }
    for (int t = r - 1; t <= tw[static_cast<std::size_t>(pos - 1)] - 1; t += 2) {
      tw[static_cast<std::size_t>(pos)] = t;
      descend(pos + 1);
    }
  };
  descend(0);
  return static_cast<double>(total);
}

double zonal_basis_sum(int k, int degree, const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (k < 1 || k > 3) throw std::domain_error("basis route supports 1 <= k <= 3");
  if (degree < 0 || degree > 8) throw std::domain_error("basis route supports degree <= 8");
  if (p.size() != k + 1 || q.size() != k + 1)
    throw std::domain_error("points must be unit vectors in R^(k+1)");

  // Exponent multi-indices of homogeneous degree n in k+1 variables.
  auto monomials = [k](int n) {
    std::vector<Eigen::ArrayXi> out;
    Eigen::ArrayXi e = Eigen::ArrayXi::Zero(k + 1);
    std::function<void(int, int)> fill = [&](int var, int left) {
      if (var == k) {
        e[var] = left;
        out.push_back(e);
        return;
      }
      for (int c = 0; c <= left; ++c) {
        e[var] = c;
        fill(var + 1, left - c);
      }
    };
    fill(0, n);
    return out;
  };

  const auto mono_n = monomials(degree);
  const auto count = static_cast<Eigen::Index>(mono_n.size());

  Eigen::MatrixXd basis;  // columns: harmonic polynomials in the monomial basis
  if (degree < 2) {
    basis = Eigen::MatrixXd::Identity(count, count);
  } else {
    const auto mono_low = monomials(degree - 2);
    auto find_low = [&](const Eigen::ArrayXi& e) {
      for (std::size_t t = 0; t < mono_low.size(); ++t)
        if ((mono_low[t] == e).all()) return static_cast<Eigen::Index>(t);
      throw std::logic_error("missing monomial");
    };
    Eigen::MatrixXd lap =
        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(mono_low.size()), count);
    for (Eigen::Index c = 0; c < count; ++c)
      for (int v = 0; v <= k; ++v) {
        int e = mono_n[static_cast<std::size_t>(c)][v];
        if (e < 2) continue;
        Eigen::ArrayXi drop = mono_n[static_cast<std::size_t>(c)];
        drop[v] -= 2;
        lap(find_low(drop), c) += static_cast<double>(e) * (e - 1);
      }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(lap);
    basis = lu.kernel();
  }

  // Gram matrix over S^k from closed-form even moments.
  const auto nb = basis.cols();
  Eigen::MatrixXd gram(nb, nb);
  for (Eigen::Index a = 0; a < nb; ++a)
    for (Eigen::Index b = a; b < nb; ++b) {
      double s = 0.0;
      for (Eigen::Index u = 0; u < count; ++u)
        for (Eigen::Index v = 0; v < count; ++v) {
          double cc = basis(u, a) * basis(v, b);
          if (cc == 0.0) continue;
          s += cc * sphere_moment(mono_n[static_cast<std::size_t>(u)] +
                                  mono_n[static_cast<std::size_t>(v)]);
        }
      gram(a, b) = s;
      gram(b, a) = s;
    }

  auto eval = [&](const Eigen::VectorXd& z) {
    Eigen::VectorXd vals(nb);
    for (Eigen::Index a = 0; a < nb; ++a) {
      double s = 0.0;
      for (Eigen::Index u = 0; u < count; ++u) {
        double cc = basis(u, a);
        if (cc == 0.0) continue;
        double mono = 1.0;
        for (int v = 0; v <= k; ++v)
          mono *= std::pow(z[v], mono_n[static_cast<std::size_t>(u)][v]);
        s += cc * mono;
      }
      vals[a] = s;
    }
    return vals;
  };

  Eigen::VectorXd vp = eval(p), vq = eval(q);
  return vp.dot(gram.ldlt().solve(vq));
}

}  // namespace grushin
