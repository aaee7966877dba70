#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "grushin/bounds.hpp"
#include "grushin/oracle.hpp"

using namespace grushin;

namespace {

CylPoint axis_point(int d, int k, double psi_norm) {
  CylPoint p;
  p.omega = Eigen::VectorXd::Zero(k + 1);
  p.omega[0] = 1.0;
  p.psi = Eigen::VectorXd::Constant(d - k, psi_norm / std::sqrt(double(d - k)));
  return p;
}

}  // namespace

TEST_CASE("cluster sums match the high-precision reference on small windows") {
  for (int i : {1, 2}) {
    for (Regime reg : {Regime::elliptic, Regime::subelliptic}) {
      for (double alpha : {0.0, 0.6}) {
        Eigen::VectorXd x(1);
        x << 0.3;
        std::vector<Eigen::VectorXd> pts{x};
        ClusterScan sc = cluster_scan(2, 1, alpha, reg, {i}, pts);
        double ref = cluster_sum_oracle(2, 1, i, reg, alpha, 0.0, x);
        CHECK(sc.sums(0, 0) ==
              doctest::Approx(ref).epsilon(1e-10).scale(std::max(std::abs(ref), 1e-30)));
      }
    }
  }
}

TEST_CASE("cluster scan layout pairs windows with probe points") {
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(1);
  Eigen::VectorXd x1(1);
  x1 << 0.25;
  ClusterScan sc = cluster_scan(2, 1, 0.0, Regime::all, {2, 4, 8}, {x0, x1});
  CHECK(sc.sums.rows() == 3);
  CHECK(sc.sums.cols() == 2);
  CHECK(sc.i_values == std::vector<int>{2, 4, 8});
  for (Eigen::Index r = 0; r < 3; ++r)
    for (Eigen::Index c = 0; c < 2; ++c) CHECK(sc.sums(r, c) > 0.0);
  CHECK(std::isfinite(sc.slope(0)));
  CHECK(std::isfinite(sc.slope(1)));
}

TEST_CASE("log-log slope recovers exact power laws") {
  std::vector<double> x{1.0, 2.0, 4.0, 8.0, 16.0};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 2.5));
  CHECK(loglog_slope(x, y) == doctest::Approx(2.5).epsilon(1e-12));

  ClusterScan sc;
  sc.i_values = {2, 4, 8};
  sc.x_points = {Eigen::VectorXd::Zero(1)};
  sc.sums.resize(3, 1);
  for (int r = 0; r < 3; ++r) sc.sums(r, 0) = 5.0 * std::pow(sc.i_values[size_t(r)], 3.0);
  CHECK(sc.slope(0) == doctest::Approx(3.0).epsilon(1e-12));

  CHECK_THROWS_AS(loglog_slope({1.0}, {2.0}), std::domain_error);
  CHECK_THROWS_AS(loglog_slope({1.0, -2.0}, {2.0, 3.0}), std::domain_error);
}

TEST_CASE("pointwise ladder sums are even in x and start at the bottom profile") {
  // Minimal top index on the 2-sphere keeps only the constant profile, whose
  // square is 1/2 (the m = 0 term carries the 0^0 = 1 convention).
  CHECK(profile_sup_sum(2, HalfInt{1}, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(profile_sup_sum(2, HalfInt{1}, 0.4) == doctest::Approx(0.5).epsilon(1e-12));

  for (int td : {3, 4}) {
    HalfInt ell{td == 3 ? 20 : 21};  // N_3 = N + 1, N_4 = N + 3/2
    int d = td;
    double a = profile_sup_sum(d, ell, 0.37);
    double b = profile_sup_sum(d, ell, -0.37);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
    CHECK(a > 0.0);
  }

  // Pole values grow like ell^(d-1) across a dyadic ladder.
  std::vector<double> ls, vs;
  for (int t : {41, 81, 161}) {
    ls.push_back(HalfInt{t}.value());
    vs.push_back(profile_sup_sum(2, HalfInt{t}, 0.0));
  }
  CHECK(std::abs(loglog_slope(ls, vs) - 1.0) <= 0.2);
}

TEST_CASE("flat-direction ratios collapse to one at power zero") {
  RieszRatios r = riesz_ratios(2, 1, 0, HalfInt{19}, 6, 77);
  CHECK(r.samples == 6);
  CHECK(r.max_ratio == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.mean_ratio == doctest::Approx(1.0).epsilon(1e-10));

  RieszRatios r1 = riesz_ratios(2, 1, 1, HalfInt{19}, 6, 77);
  CHECK(r1.max_ratio > 0.0);
  CHECK(r1.mean_ratio <= r1.max_ratio + 1e-15);
  CHECK_THROWS_AS(riesz_ratios(2, 1, -1, HalfInt{19}, 6, 77), std::domain_error);
}

TEST_CASE("weighted plancherel probes report consistent columns") {
  std::vector<PlancherelPoint> pts =
      plancherel_scan(2, 1, {8}, {0.0, 0.4}, {axis_point(2, 1, 0.1)});
  REQUIRE(pts.size() == 2);
  for (const PlancherelPoint& p : pts) {
    CHECK(p.resolution == 8);
    CHECK(p.psi_norm == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(p.lhs > 0.0);
    CHECK(p.rhs > 0.0);
    CHECK(p.ratio == doctest::Approx(p.lhs / p.rhs).epsilon(1e-12));
  }
  // The weight factor is >= 1 and increases with alpha.
  CHECK(pts[1].lhs >= pts[0].lhs * (1.0 - 1e-12));
}

TEST_CASE("weight integrability ratios are finite and deterministic") {
  CylPoint c = axis_point(2, 1, 0.05);
  WeightIntegral a = weight_integrability(2, 1, c, 0.125, 0.5, 4.0, 500, 9);
  WeightIntegral b = weight_integrability(2, 1, c, 0.125, 0.5, 4.0, 500, 9);
  CHECK(a.samples == 500);
  CHECK(a.ratio > 0.0);
  CHECK(a.std_error >= 0.0);
  CHECK(a.ratio == b.ratio);
  CHECK(a.std_error == b.std_error);

  double g1 = weight_growth_constant(2, 1, 400, 11);
  double g2 = weight_growth_constant(2, 1, 400, 11);
  CHECK(g1 == g2);
  CHECK(g1 > 0.0);
  CHECK(std::isfinite(g1));
}

TEST_CASE("stationary phase gauge freezes") {
  CHECK(xi_gauge(3.0, 0.25, 3.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(xi_gauge(0.0, 1.0, 3.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(xi_gauge(2.0, 0.5, 1.0) == doctest::Approx(1.0 / std::sqrt(1.5)).epsilon(1e-15));
}

TEST_CASE("unit-diagonal determinants agree with the even subset expansion") {
  Eigen::VectorXd w1(1);
  w1 << 4.0;
  CHECK(det_skew_unit(w1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(even_subset_sum(w1) == doctest::Approx(1.0).epsilon(1e-14));

  Eigen::VectorXd w2(2);
  w2 << 2.0, 3.0;
  CHECK(det_skew_unit(w2) == doctest::Approx(7.0).epsilon(1e-14));
  CHECK(even_subset_sum(w2) == doctest::Approx(7.0).epsilon(1e-14));

  for (int trial = 0; trial < 20; ++trial) {
    int n = 1 + trial % 6;
    Eigen::VectorXd w(n);
    for (int j = 0; j < n; ++j) w[j] = std::sin(7.0 * trial + 1.3 * j) * 1.5;
    double scale = 1.0;
    for (int j = 0; j < n; ++j) scale *= 1.0 + std::abs(w[j]);
    CHECK(std::abs(det_skew_unit(w) - even_subset_sum(w)) <= 1e-12 * scale);
  }
}
