#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "grushin/geometry.hpp"
#include "grushin/kernels.hpp"
#include "grushin/quadrature.hpp"
#include "grushin/rng.hpp"
#include "grushin/special.hpp"
#include "grushin/spectrum.hpp"

using namespace grushin;

namespace {

CylPoint circle_point(double angle, double psi1) {
  CylPoint p;
  p.omega = Eigen::Vector2d(std::cos(angle), std::sin(angle));
  p.psi = Eigen::VectorXd::Constant(1, psi1);
  return p;
}

// Chains with lambda <= lam_max^2 AND top index <= top_max.  The lambda cut
// alone keeps near-diagonal chains of arbitrarily large top index, which the
// brute-force quadratures below could not integrate exactly.
ChainSet truncated_chains(int d, int k, double lam_max, double top_max) {
  std::vector<ChainIndex> keep;
  enumerate_lambda_range(d, k, 0.0, lam_max * lam_max, true, Regime::all, 0.0,
                         [&](const ChainIndex& c, double) {
                           if (c.top().value() <= top_max) keep.push_back(c);
                         });
  return chain_set_from(d, k, std::move(keep));
}

}  // namespace

TEST_CASE("multiplier specs evaluate and dilate as documented") {
  MultiplierSpec h = MultiplierSpec::heat(0.7);
  CHECK(h(0.0) == doctest::Approx(1.0));
  CHECK(h(2.0) == doctest::Approx(std::exp(-0.7 * 4.0)).epsilon(1e-14));
  CHECK(h.dilated(2.0)(1.0) == doctest::Approx(h(2.0)).epsilon(1e-14));

  MultiplierSpec br = MultiplierSpec::bochner_riesz(1.0 / 16.0, 1.0);
  CHECK(br(0.0) == doctest::Approx(1.0));
  CHECK(br(2.0) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(br(4.0) == doctest::Approx(0.0));
  CHECK(br(5.0) == doctest::Approx(0.0));
  MultiplierSpec sharp = MultiplierSpec::bochner_riesz(1.0 / 16.0, 0.0);
  CHECK(sharp(3.999) == doctest::Approx(1.0));
  CHECK(sharp(4.001) == doctest::Approx(0.0));

  MultiplierSpec ind = MultiplierSpec::indicator(1.0, 3.0);
  CHECK(ind(1.0) == doctest::Approx(1.0));
  CHECK(ind(3.0) == doctest::Approx(1.0));
  CHECK(ind(0.999) == doctest::Approx(0.0));
  CHECK(ind.dilated(2.0)(0.5) == doctest::Approx(1.0));  // window rescales to [1/2, 3/2]

  MultiplierSpec tab = MultiplierSpec::table({0.0, 1.0}, 1.0);
  CHECK(tab(0.25) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(tab(2.0) == doctest::Approx(0.0));
  CHECK(tab.tail_sup(0.5) >= 0.999);

  CHECK_THROWS_AS(MultiplierSpec::heat(0.0).validate(), std::domain_error);
  CHECK_THROWS_AS(MultiplierSpec::bochner_riesz(1.0, -0.5).validate(), std::domain_error);
  CHECK_THROWS_AS(MultiplierSpec::indicator(3.0, 1.0).validate(), std::domain_error);
  CHECK_THROWS_AS(MultiplierSpec::table({1.0}, 1.0).validate(), std::domain_error);
}

TEST_CASE("chain sets carry eigenvalues, dimensions, and window counts") {
  ChainSet cs = collect_chains(3, 1, 5.0);  // lambda <= 25
  SpectralWindow w;
  w.i = 2;
  ChainSet win = collect_window(3, 1, w);
  CHECK(win.chains.size() == enumerate_chains(3, 1, w).size());
  for (std::size_t c = 0; c < cs.chains.size(); ++c) {
    CHECK(cs.lambda[static_cast<Eigen::Index>(c)] ==
          doctest::Approx(cs.chains[c].lambda()).epsilon(1e-14));
    CHECK(cs.weight_dim[static_cast<Eigen::Index>(c)] ==
          doctest::Approx(static_cast<double>(sphere_dim(1, cs.chains[c].bottom()))));
    CHECK(cs.lambda[static_cast<Eigen::Index>(c)] <= 25.0);
  }
}

TEST_CASE("chain values reproduce per-chain eigenfunction profiles") {
  ChainSet cs = collect_chains(4, 2, 4.0);
  Rng rng(13, 1);
  for (int t = 0; t < 10; ++t) {
    Eigen::VectorXd psi(2);
    psi << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
    Eigen::ArrayXd vals = chain_values(cs, psi);
    REQUIRE(vals.size() == static_cast<Eigen::Index>(cs.chains.size()));
    for (std::size_t c = 0; c < cs.chains.size(); ++c) {
      double want = chain_eigenfunction(cs.chains[c], psi);
      CHECK(vals[static_cast<Eigen::Index>(c)] == doctest::Approx(want).epsilon(1e-11));
    }
  }
}

TEST_CASE("circle zonal kernels are cosines") {
  CHECK(zonal_kernel(1, HalfInt{0}, 0.3) == doctest::Approx(1.0 / (2 * M_PI)).epsilon(1e-13));
  for (int n : {1, 2, 5}) {
    double theta = 0.77;
    double want = 2.0 * std::cos(n * theta) / (2 * M_PI);
    CHECK(zonal_kernel(1, HalfInt{2 * n}, std::cos(theta)) ==
          doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("two-sphere zonal kernels match legendre polynomials") {
  for (int n = 0; n <= 20; ++n)
    for (double u : {-0.9, -0.3, 0.0, 0.5, 0.99}) {
      double want = (2 * n + 1) * std::legendre(n, u) / (4 * M_PI);
      CHECK(zonal_kernel(2, HalfInt{2 * n + 1}, u) == doctest::Approx(want).epsilon(1e-11));
    }
  // diagonal at the frozen dimension value
  CHECK(zonal_kernel(2, HalfInt{3}, 1.0) == doctest::Approx(3.0 / (4 * M_PI)).epsilon(1e-13));
}

TEST_CASE("zonal family agrees with single-degree evaluations") {
  for (int k : {1, 2, 3}) {
    Eigen::ArrayXd fam = zonal_family(k, 6, 0.42);
    for (int n = 0; n <= 6; ++n)
      CHECK(fam[n] == doctest::Approx(zonal_kernel(k, HalfInt{2 * n + k - 1}, 0.42))
                          .epsilon(1e-13));
  }
}

TEST_CASE("zonal kernels integrate orthogonally on the three-sphere") {
  QuadRule rule = gauss_jacobi_sym(30, 0.5);
  double ring = sphere_area(2), area = sphere_area(3);
  for (int a = 0; a <= 5; ++a)
    for (int b = 0; b <= 5; ++b) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < rule.x.size(); ++i)
        acc += rule.w[i] * zonal_kernel(3, HalfInt{2 * a + 2}, rule.x[i]) *
               zonal_kernel(3, HalfInt{2 * b + 2}, rule.x[i]);
      acc *= ring;
      double want = a == b ? static_cast<double>(sphere_dim(3, HalfInt{2 * a + 2})) / area : 0.0;
      CHECK(acc == doctest::Approx(want).epsilon(1e-11).scale(std::max(1.0, want)));
    }
}

TEST_CASE("kernel column mass equals the multiplier at zero") {
  MultiplierSpec F = MultiplierSpec::heat(0.8);
  ChainSet cs = truncated_chains(2, 1, 12.0, 12.5);
  CylPoint q = circle_point(0.0, 0.37);
  QuadratureGrid g = make_grid(2, 1, 14);
  double ring = sphere_area(0);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < g.psi[0].x.size(); ++i) {
    double inner = 0.0;
    for (Eigen::Index j = 0; j < g.zonal.x.size(); ++j) {
      double u = g.zonal.x[j];
      CylPoint p = circle_point(std::acos(std::clamp(u, -1.0, 1.0)), std::asin(g.psi[0].x[i]));
      inner += g.zonal.w[j] * multiplier_kernel(F, cs, p, q);
    }
    acc += g.psi[0].w[i] * ring * inner;
  }
  CHECK(acc == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("column l2 norms match brute-force quadrature") {
  MultiplierSpec F = MultiplierSpec::heat(0.35);
  ChainSet cs = truncated_chains(2, 1, 12.0, 12.5);
  CylPoint q = circle_point(0.3, -0.25);
  QuadratureGrid g = make_grid(2, 1, 14);
  double ring = sphere_area(0);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < g.psi[0].x.size(); ++i)
    for (Eigen::Index j = 0; j < g.zonal.x.size(); ++j) {
      CylPoint p = circle_point(0.3 + std::acos(std::clamp(g.zonal.x[j], -1.0, 1.0)),
                                std::asin(g.psi[0].x[i]));
      double kv = multiplier_kernel(F, cs, p, q);
      acc += g.psi[0].w[i] * g.zonal.w[j] * ring * kv * kv;
    }
  double closed = kernel_column_l2_sq(F, cs, q);
  CHECK(closed == doctest::Approx(acc).epsilon(1e-10));
}

TEST_CASE("kernel symmetry in its two arguments") {
  MultiplierSpec F = MultiplierSpec::heat(0.5);
  ChainSet cs = collect_chains(3, 2, 6.0);
  Rng rng(13, 2);
  for (int t = 0; t < 20; ++t) {
    CylPoint p, q;
    p.omega = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal()).normalized();
    q.omega = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal()).normalized();
    p.psi = Eigen::VectorXd::Constant(1, rng.uniform(-1.0, 1.0));
    q.psi = Eigen::VectorXd::Constant(1, rng.uniform(-1.0, 1.0));
    double a = multiplier_kernel(F, cs, p, q), b = multiplier_kernel(F, cs, q, p);
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
  }
}

TEST_CASE("heat kernels compose as a semigroup") {
  double t = 0.5;
  MultiplierSpec Ft = MultiplierSpec::heat(t), F2t = MultiplierSpec::heat(2 * t);
  ChainSet cs = truncated_chains(2, 1, 12.0, 12.5);
  CylPoint p = circle_point(0.0, 0.2), q = circle_point(0.9, -0.4);
  QuadratureGrid g = make_grid(2, 1, 14);
  const int m_angle = 128;
  double acc = 0.0;
  for (int a = 0; a < m_angle; ++a) {
    double theta = 2.0 * M_PI * a / m_angle;
    for (Eigen::Index i = 0; i < g.psi[0].x.size(); ++i) {
      CylPoint z = circle_point(theta, std::asin(g.psi[0].x[i]));
      acc += (2.0 * M_PI / m_angle) * g.psi[0].w[i] * multiplier_kernel(Ft, cs, p, z) *
             multiplier_kernel(Ft, cs, z, q);
    }
  }
  CHECK(acc == doctest::Approx(multiplier_kernel(F2t, cs, p, q)).epsilon(1e-7));
}

TEST_CASE("long-time heat column collapses to the constant mode") {
  ChainSet cs = collect_chains(2, 1, 8.0);
  CylPoint q = circle_point(0.2, 0.1);
  double v = kernel_column_l2_sq(MultiplierSpec::heat(50.0), cs, q);
  CHECK(v == doctest::Approx(1.0 / sphere_area(2)).epsilon(1e-10));
}

TEST_CASE("weighted column norm with flat weight reduces to the plain one") {
  MultiplierSpec F = MultiplierSpec::heat(0.4);
  ChainSet cs = truncated_chains(2, 1, 10.0, 12.5);
  QuadratureGrid g = make_grid(2, 1, 14);
  for (double psic : {0.0, 0.3}) {
    CylPoint q = circle_point(0.0, psic);
    double a = weighted_column_l2_sq(F, cs, q, 0.0, 0.25, g);
    double b = kernel_column_l2_sq(F, cs, q);
    CHECK(a == doctest::Approx(b).epsilon(1e-9));
  }
  // positive alpha strictly increases the integral
  CylPoint q = circle_point(0.0, 0.1);
  CHECK(weighted_column_l2_sq(F, cs, q, 0.5, 0.25, g) > kernel_column_l2_sq(F, cs, q));
}

TEST_CASE("l1 norms: long-time limit and center stability") {
  ChainSet cs = collect_chains(2, 1, 8.0);
  QuadratureGrid g = make_grid(2, 1, 10);
  CylPoint q = circle_point(0.0, 0.15);
  double l1 = l1_column_norm(MultiplierSpec::heat(50.0), cs, q, g);
  CHECK(l1 == doctest::Approx(1.0).epsilon(1e-8));
  double op = l1_operator_norm(MultiplierSpec::heat(0.5), cs, {q, circle_point(0.0, 0.4)}, g);
  CHECK(op >= l1_column_norm(MultiplierSpec::heat(0.5), cs, q, g) - 1e-12);
}

TEST_CASE("banded and generic l1 column norms agree at small frequency") {
  double lam = 8.0;
  MultiplierSpec F = MultiplierSpec::bochner_riesz(1.0 / (lam * lam), 1.0);
  ChainSet cs = collect_chains(2, 1, lam);
  int top = static_cast<int>(std::ceil(max_top_index(2, 1, lam * lam).value()));
  QuadratureGrid g = make_grid(2, 1, top + 2);
  for (double psic : {0.0, 0.4}) {
    double generic = l1_column_norm(F, cs, circle_point(0.0, psic), g);
    double banded = l1_column_norm_banded(F, lam, psic);
    CHECK(banded == doctest::Approx(generic).epsilon(0.05));
  }
}

TEST_CASE("chains solve the differential eigenvalue equation") {
  struct Probe {
    ChainIndex c;
    Eigen::VectorXd psi;
  };
  std::vector<Probe> probes;
  probes.push_back({{2, 1, {HalfInt{13}, HalfInt{2}}}, Eigen::VectorXd::Constant(1, 0.31)});
  probes.push_back({{3, 2, {HalfInt{12}, HalfInt{5}}}, Eigen::VectorXd::Constant(1, -0.52)});
  Eigen::VectorXd two(2);
  two << 0.41, -0.23;
  probes.push_back({{4, 2, {HalfInt{13}, HalfInt{10}, HalfInt{3}}}, two});
  for (const Probe& pr : probes) {
    double r1 = apply_grushin_residual(pr.c, pr.psi, 1e-3);
    CHECK(r1 <= 1e-5);
    CHECK(apply_grushin_residual(pr.c, pr.psi, 5e-4) <= std::max(r1, 1e-8));
  }
}

TEST_CASE("grid norms of multipliers at frozen values") {
  MultiplierSpec one = MultiplierSpec::table({1.0, 1.0}, 1.0);
  CHECK(norm_Nq(one, 4, 2.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(norm_Nq(one, 7, std::numeric_limits<double>::infinity()) ==
        doctest::Approx(1.0).epsilon(1e-13));
  MultiplierSpec ramp = MultiplierSpec::table({0.0, 1.0}, 1.0);
  CHECK(norm_Nq(ramp, 1, 2.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(norm_Nq(ramp, 2, 2.0) == doctest::Approx(std::sqrt(0.625)).epsilon(1e-13));
  CHECK(norm_Nq(ramp, 4, 2.0) == doctest::Approx(std::sqrt(0.46875)).epsilon(1e-13));
  CHECK(norm_Nq(ramp, 4, std::numeric_limits<double>::infinity()) ==
        doctest::Approx(1.0).epsilon(1e-13));
  CHECK_THROWS_AS(norm_Nq(ramp, 0, 2.0), std::domain_error);
  CHECK_THROWS_AS(norm_Nq(ramp, 4, 1.0), std::domain_error);
}
