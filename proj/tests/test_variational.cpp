#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "corpus.hpp"
#include "gmt/error.hpp"
#include "gmt/variational.hpp"
#include "variational_oracle.hpp"

using namespace gmt;

TEST_CASE("functional at a = 1") {
  corpus::Rng rng(89);
  for (int t = 0; t < 6; ++t) {
    const auto mu = corpus::random_measure(rng, 40, 2 + t % 2);
    const Point c = mu.point(0);
    const auto r0 = mu.query(Ball{c, 0.4});
    const Ball b1{c, 0.2};
    VariationalOptions opt;
    opt.p = t % 2 ? 2.0 : 1.4;
    opt.lambda = 0.3;
    opt.N = 3;
    const oracle::Functional f(mu, r0, b1, opt);
    const std::vector<double> ones(r0.size(), 1.0);
    const double v1 = variational_value(mu, r0, b1, ones, opt);
    CHECK(v1 == doctest::Approx(static_cast<double>(f(ones))).epsilon(1e-10));

    // F(1) is the data term plus three lambda sigma_p.
    VariationalOptions nolam = opt;
    nolam.lambda = 1e-300;
    const double data = variational_value(mu, r0, b1, ones, nolam);
    CHECK(v1 == doctest::Approx(data + 3.0 * opt.lambda * static_cast<double>(f.sigma_p())).epsilon(1e-12));

    std::vector<double> a(r0.size());
    for (double& x : a) x = rng.uniform(0.1, 4.0);
    CHECK(variational_value(mu, r0, b1, a, opt) == doctest::Approx(static_cast<double>(f(a))).epsilon(1e-10));
  }
}

TEST_CASE("three atoms against the multiplier grid") {
  corpus::Rng rng(97);
  for (int t = 0; t < 8; ++t) {
    CAPTURE(t);
    // Three R0 atoms, in half the instances with fixed atoms around them.
    const std::size_t extra = t % 2 ? 3 : 0;
    std::vector<Point> p;
    std::vector<double> w;
    for (std::size_t i = 0; i < 3 + extra; ++i) {
      p.push_back(Point{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
      w.push_back(rng.uniform(0.5, 1.5));
    }
    const PointMeasure mu(2, p, w, 1e-3);
    const std::vector<std::size_t> r0{0, 1, 2};
    const Ball b1{mu.point(0), rng.uniform(0.3, 1.5)};
    VariationalOptions opt;
    opt.p = 2.0;
    opt.lambda = rng.uniform(0.05, 0.9);
    opt.N = 2;
    const oracle::Functional f(mu, r0, b1, opt);

    long double best = std::numeric_limits<long double>::infinity();
    for (int i = 0; i <= 16; ++i) {
      for (int j = 0; j <= 16; ++j) {
        for (int k = 0; k <= 16; ++k) {
          const std::vector<double> a{0.25 * i, 0.25 * j, 0.25 * k};
          best = std::min(best, f(a));
        }
      }
    }
    const auto st = variational_minimize(mu, r0, b1, opt);
    CAPTURE(static_cast<double>(best));
    CHECK(st.value <= static_cast<double>(best) * (1.0 + 1e-3));
    CHECK(st.value == doctest::Approx(static_cast<double>(f(st.a))).epsilon(1e-10));
  }
}

TEST_CASE("minimizer invariants") {
  corpus::Rng rng(101);
  int hypothesis = 0;
  for (int t = 0; t < 14; ++t) {
    CAPTURE(t);
    PointMeasure mu;
    if (t >= 12) {
      // Flat instances where F(1) <= 4 lambda sigma_p holds.
      mu = generate(corpus::spec("segment", 400));
    } else if (t % 3 == 0) {
      auto s = corpus::spec("lipschitz_graph", 120);
      s.amplitude = 0.03 * (t % 4);
      mu = generate(s);
    } else if (t % 3 == 1) {
      mu = corpus::random_measure(rng, 50, 2);
    } else {
      mu = corpus::clustered_measure(rng, 60, 2);
    }
    const Point c = t >= 12 ? Point{0.5, 0.0} : mu.point(rng.index(mu.size()));
    const auto r0 = mu.query(Ball{c, t >= 12 ? 0.1 : 0.3});
    const Ball b1{c, t >= 12 ? 0.1 : rng.uniform(0.02, 0.2)};
    VariationalOptions opt;
    opt.p = t % 2 ? 2.0 : 1.5;
    opt.N = 3;
    opt.b0 = Ball{c, 0.25};
    opt.has_b0 = true;
    const auto st = variational_minimize(mu, r0, b1, opt);

    for (double x : st.a) {
      CHECK(x >= 0.0);
      CHECK(x <= 4.0);
    }
    for (std::size_t k = 1; k < st.history.size(); ++k) CHECK(st.history[k] <= st.history[k - 1]);
    CHECK(st.value <= st.value_at_one);
    CHECK(st.history.front() == st.value_at_one);
    CHECK(st.history.back() == st.value);
    CHECK(st.stationarity_bound == doctest::Approx(16.0 * opt.lambda * std::pow(st.mu_b1 / b1.radius, opt.p)));
    CHECK(std::isfinite(st.stationarity_max));
    if (st.value_at_one <= 4.0 * opt.lambda * st.sigma_p) {
      ++hypothesis;
      CHECK(st.nu_b1 >= 0.25 * st.mu_b1);
    }
  }
  CHECK(hypothesis >= 1);
}

TEST_CASE("variational argument errors") {
  const PointMeasure mu(2, {Point{0.0, 0.0}, Point{1.0, 0.0}}, {1.0, 1.0}, 1e-3);
  const Ball b1{Point{}, 0.5};
  VariationalOptions opt;
  opt.p = 2.5;
  CHECK_THROWS_AS(variational_minimize(mu, {0, 1}, b1, opt), Error);
  opt.p = 2.0;
  opt.lambda = 1.0;
  CHECK_THROWS_AS(variational_minimize(mu, {0, 1}, b1, opt), Error);
  opt.lambda = 0.5;
  CHECK_THROWS_AS(variational_minimize(mu, {}, b1, opt), Error);
  CHECK_THROWS_AS(variational_minimize(mu, {0, 1}, Ball{Point{5.0, 5.0}, 0.1}, opt), Error);
  CHECK_THROWS_AS(variational_value(mu, {0, 1}, b1, {1.0}, opt), Error);
}
