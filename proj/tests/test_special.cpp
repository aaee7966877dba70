#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "grushin/oracle.hpp"
#include "grushin/quadrature.hpp"
#include "grushin/rng.hpp"
#include "grushin/special.hpp"

using namespace grushin;

namespace {

// Direct normalized-profile formula; mirrors the definition rather than the
// ladder code path.
double xtilde_direct(int d, HalfInt ell, HalfInt m, double x) {
  double lv = ell.value(), mv = m.value();
  double logc = 0.5 * (std::log(lv) + std::lgamma(lv - mv + 0.5) + std::lgamma(lv + mv + 0.5)) -
                mv * std::log(2.0) - std::lgamma(lv + 0.5);
  double qexp = 0.5 * mv - 0.25 * (d - 2);
  int j = (ell.twice - m.twice - 1) / 2;
  return std::exp(logc) * std::pow((1.0 - x) * (1.0 + x), qexp) * jacobi_oracle({j, mv, mv}, x);
}

}  // namespace

TEST_CASE("jacobi evaluation matches frozen low-degree values") {
  CHECK(jacobi_eval({0, 0.7, 1.3}, 0.42) == doctest::Approx(1.0).epsilon(1e-15));
  // P_2^(0,0)(0) = -1/2, P_2^(1,1)(0) = -3/4
  CHECK(jacobi_eval({2, 0.0, 0.0}, 0.0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(jacobi_eval({2, 1.0, 1.0}, 0.0) == doctest::Approx(-0.75).epsilon(1e-15));
  // P_1^(a,b)(x) = (a+1) + (a+b+2)(x-1)/2
  CHECK(jacobi_eval({1, 0.5, 0.5}, 0.3) == doctest::Approx(0.45).epsilon(1e-14));
  CHECK(jacobi_eval({1, 2.0, 0.0}, -1.0) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("jacobi evaluation agrees with the high-precision oracle") {
  Rng rng(7, 1);
  for (int t = 0; t < 300; ++t) {
    int j = rng.uniform_int(0, 40);
    double a = 0.5 * rng.uniform_int(0, 80);
    double b = 0.5 * rng.uniform_int(0, 80);
    double x = rng.uniform(-1.0, 1.0);
    double ref = jacobi_oracle({j, a, b}, x);
    double got = jacobi_eval({j, a, b}, x);
    double prev = j >= 1 ? jacobi_eval({j - 1, a, b}, x) : 1.0;
    double scale = std::max({std::abs(ref), std::abs(prev), 1e-12});
    CHECK(std::abs(got - ref) / scale <= 1e-12);
  }
}

TEST_CASE("jacobi endpoint values follow the binomial identity") {
  for (int j : {0, 1, 2, 7, 23, 60})
    for (double a : {0.0, 0.5, 3.0, 17.5}) {
      double ref = std::exp(std::lgamma(j + a + 1.0) - std::lgamma(j + 1.0) - std::lgamma(a + 1.0));
      CHECK(jacobi_eval({j, a, a}, 1.0) == doctest::Approx(ref).epsilon(1e-13));
      double sgn = (j % 2 == 0) ? 1.0 : -1.0;
      CHECK(jacobi_eval({j, a, a}, -1.0) == doctest::Approx(sgn * ref).epsilon(1e-13));
    }
}

TEST_CASE("scaled jacobi values match the plain path in range") {
  Rng rng(7, 2);
  for (int t = 0; t < 200; ++t) {
    int j = rng.uniform_int(0, 50);
    double a = 0.5 * rng.uniform_int(0, 60);
    double x = rng.uniform(-1.0, 1.0);
    ScaledValue sv = jacobi_scaled({j, a, a}, x);
    double plain = jacobi_eval({j, a, a}, x);
    CHECK(sv.value() == doctest::Approx(plain).epsilon(1e-13));
  }
}

TEST_CASE("scaled value log round trip") {
  ScaledValue v = ScaledValue::from_log(-1, -2000.0L);
  CHECK(v.sign() == -1);
  CHECK(static_cast<double>(v.log_abs()) == doctest::Approx(-2000.0).epsilon(1e-12));
  CHECK(v.value() == 0.0);  // far below double range
  ScaledValue w = ScaledValue::from_log(1, std::log(3.0L));
  CHECK(w.value() == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("profile value at the bottom of the d=2 lattice") {
  // X~ for ell=1/2, m=0 is the constant 1/sqrt(2)
  ProfileIndex p{2, HalfInt{1}, HalfInt{0}};
  CHECK(profile_eval(p, 0.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(xtilde_eval(p, 0.9) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(profile_eval(p, 0.3) == doctest::Approx(xtilde_eval(p, std::sin(0.3))).epsilon(1e-15));
}

TEST_CASE("profiles match the direct gamma-normalized formula") {
  Rng rng(7, 3);
  for (int t = 0; t < 300; ++t) {
    int d = rng.uniform_int(2, 6);
    int tl = (d - 1) + 2 * rng.uniform_int(0, 30);
    int tm = (d - 2) + 2 * rng.uniform_int(0, (tl - 1 - (d - 2)) / 2);
    double x = rng.uniform(-0.95, 0.95);
    ProfileIndex p{d, HalfInt{tl}, HalfInt{tm}};
    double ref = xtilde_direct(d, p.ell, p.m, x);
    double got = xtilde_eval(p, x);
    CHECK(std::abs(got - ref) <= 1e-11 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("profile parity follows the jacobi degree") {
  Rng rng(7, 4);
  for (int t = 0; t < 100; ++t) {
    int d = rng.uniform_int(2, 5);
    int tl = (d - 1) + 2 * rng.uniform_int(0, 40);
    int tm = (d - 2) + 2 * rng.uniform_int(0, (tl - 1 - (d - 2)) / 2);
    double x = rng.uniform(0.0, 1.0);
    ProfileIndex p{d, HalfInt{tl}, HalfInt{tm}};
    double sgn = p.jacobi_degree() % 2 == 0 ? 1.0 : -1.0;
    CHECK(xtilde_eval(p, -x) == doctest::Approx(sgn * xtilde_eval(p, x)).epsilon(1e-12));
  }
}

TEST_CASE("profile normalization integrates to one") {
  for (int d : {2, 3, 4}) {
    QuadRule r = gauss_jacobi_sym(80, 0.5 * (d - 2));
    for (int tl : {d - 1, d + 5, d + 21}) {
      int tm = d - 2;
      ProfileIndex p{d, HalfInt{tl}, HalfInt{tm}};
      double acc = 0.0;
      for (Eigen::Index i = 0; i < r.x.size(); ++i) {
        double v = xtilde_eval(p, r.x[i]);
        acc += r.w[i] * v * v;
      }
      CHECK(acc == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("ladder reproduces single evaluations and the dot product") {
  Rng rng(7, 5);
  for (int t = 0; t < 50; ++t) {
    int d = rng.uniform_int(2, 4);
    int tm = (d - 2) + 2 * rng.uniform_int(0, 10);
    int steps = rng.uniform_int(1, 30);
    HalfInt m{tm}, top{tm + 1 + 2 * (steps - 1)};
    double x = rng.uniform(-1.0, 1.0);
    auto lad = xtilde_ladder(d, m, top, x);
    REQUIRE(static_cast<int>(lad.size()) == steps);
    std::vector<double> coef(lad.size());
    double want = 0.0;
    Rng crng(7, 100 + t);
    for (std::size_t a = 0; a < lad.size(); ++a) {
      ProfileIndex p{d, HalfInt{tm + 1 + 2 * static_cast<int>(a)}, m};
      CHECK(lad[a].value() == doctest::Approx(xtilde_eval(p, x)).epsilon(1e-12));
      coef[a] = crng.uniform(-1.0, 1.0);
      want += coef[a] * lad[a].value();
    }
    double got = xtilde_ladder_dot(d, m, x, coef.data(), static_cast<int>(coef.size()));
    CHECK(got == doctest::Approx(want).epsilon(1e-11));
  }
}

TEST_CASE("recurrence coefficients: frozen value, positivity, limit") {
  // d=2, ell=1/2, m=0: sqrt(1/3)
  CHECK(recurrence_coeff({2, HalfInt{1}, HalfInt{0}}) ==
        doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-15));
  CHECK(recurrence_coeff({2, HalfInt{1}, HalfInt{2}}) == 0.0);  // below the ladder
  Rng rng(7, 6);
  for (int t = 0; t < 200; ++t) {
    int d = rng.uniform_int(2, 6);
    int tl = (d - 1) + 2 * rng.uniform_int(0, 100);
    int tm = (d - 2) + 2 * rng.uniform_int(0, (tl - 1 - (d - 2)) / 2);
    double a = recurrence_coeff({d, HalfInt{tl}, HalfInt{tm}});
    CHECK(a > 0.0);
    CHECK(a <= std::sqrt(1.0 / 3.0) + 1e-15);
  }
  // alpha -> 1/2 for ell >> m
  CHECK(recurrence_coeff({2, HalfInt{4001}, HalfInt{0}}) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("three-term identity holds along random ladders") {
  Rng rng(7, 7);
  for (int t = 0; t < 500; ++t) {
    int d = rng.uniform_int(2, 6);
    int tl = (d + 1) + 2 * rng.uniform_int(0, 60);
    int tm = (d - 2) + 2 * rng.uniform_int(0, (tl - 3 - (d - 2)) / 2);
    double x = rng.uniform(-1.0, 1.0);
    HalfInt ell{tl}, m{tm};
    double vc = xtilde_eval({d, ell, m}, x);
    double vp = xtilde_eval({d, ell + HalfInt{2}, m}, x);
    double vm = xtilde_eval({d, ell - HalfInt{2}, m}, x);
    double ac = recurrence_coeff({d, ell, m});
    double am = recurrence_coeff({d, ell - HalfInt{2}, m});
    double resid = std::abs(x * vc - ac * vp - am * vm);
    double scale = std::max({std::abs(x * vc), std::abs(ac * vp), std::abs(am * vm), 1e-30});
    CHECK(resid / scale <= 1e-10);
  }
}

TEST_CASE("envelope dominates sampled profile values") {
  Rng rng(7, 8);
  for (int t = 0; t < 2000; ++t) {
    int d = rng.uniform_int(2, 6);
    int tl = (d - 1) + 2 * rng.uniform_int(0, 150);
    int tm = (d - 2) + 2 * rng.uniform_int(0, (tl - 1 - (d - 2)) / 2);
    double x = rng.uniform(-1.0, 1.0);
    ProfileIndex p{d, HalfInt{tl}, HalfInt{tm}};
    double val = std::abs(xtilde_eval(p, x));
    double bound = envelope_bound(p, x);
    CHECK(val <= bound * (1.0 + 1e-12));
  }
}

TEST_CASE("domain errors are reported") {
  CHECK_THROWS_AS(jacobi_eval({-1, 0.0, 0.0}, 0.0), std::domain_error);
  CHECK_THROWS_AS(jacobi_eval({2, 0.0, 0.0}, 1.5), std::domain_error);
  CHECK_THROWS_AS(xtilde_eval({2, HalfInt{2}, HalfInt{0}}, 0.0), std::domain_error);  // off lattice
  CHECK_THROWS_AS(xtilde_eval({2, HalfInt{1}, HalfInt{1}}, 0.0), std::domain_error);
  CHECK_THROWS_AS(envelope_bound({2, HalfInt{1}, HalfInt{0}}, 2.0), std::domain_error);
}
