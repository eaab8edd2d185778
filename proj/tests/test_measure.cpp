#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "corpus.hpp"
#include "gmt/density.hpp"
#include "gmt/error.hpp"
#include "gmt/point_measure.hpp"

using namespace gmt;

namespace {

PointMeasure atom(const Point& p, double w, double h = 1e-3, int dim = 2) {
  return PointMeasure(dim, {p}, {w}, h);
}

// Mass of the closed ball by a linear scan, independent of the spatial index.
double brute_mass(const PointMeasure& mu, const Ball& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (dist2(mu.point(i), b.center) <= b.radius * b.radius) m += mu.weight(i);
  }
  return m;
}

double brute_p_mu(const PointMeasure& mu, const Ball& b, int terms) {
  double s = 0.0;
  for (int j = 0; j < terms; ++j) {
    const double r = std::ldexp(b.radius, j);
    s += std::ldexp(1.0, -j) * brute_mass(mu, Ball{b.center, r}) / std::pow(r, mu.n());
  }
  return s;
}

}  // namespace

TEST_CASE("mass_in_ball counts atoms of the closed ball") {
  const auto mu = atom(Point{}, 1.0);
  CHECK(mass_in_ball(mu, Ball{Point{}, 0.5}) == 1.0);
  CHECK(mass_in_ball(mu, Ball{Point{2.0, 0.0}, 0.5}) == 0.0);
  // Boundary atoms count.
  CHECK(mass_in_ball(mu, Ball{Point{1.0, 0.0}, 1.0}) == 1.0);

  auto s = corpus::spec("segment", 1000);
  s.half_length = 0.5;
  const auto seg = generate(s);
  const Ball b{Point{0.5, 0.0}, 0.25};
  int count = 0;
  for (const auto& p : seg.points()) count += (p[0] >= 0.25 && p[0] <= 0.75) ? 1 : 0;
  CHECK(count == 500);
  CHECK(mass_in_ball(seg, b) == doctest::Approx(count / 1000.0).epsilon(1e-12));
}

TEST_CASE("theta and p_mu closed forms") {
  const auto mu = atom(Point{}, 1.0);
  CHECK(theta(mu, Ball{Point{}, 2.0}) == 0.5);
  CHECK(theta(mu, Ball{Point{5.0, 5.0}, 1.0}) == 0.0);
  // sum_j 2^-j 2^-j.
  CHECK(p_mu(mu, Ball{Point{}, 1.0}) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));

  const auto seg = generate(corpus::spec("segment", 1000));
  CHECK(theta(seg, Ball{Point{0.5, 0.0}, 0.25}) == doctest::Approx(2.0).epsilon(1e-12));

  CHECK_THROWS_AS(theta(mu, Ball{Point{}, 0.0}), Error);
  CHECK(p_mu(PointMeasure(), Ball{Point{}, 1.0}) == 0.0);
}

TEST_CASE("ideal plane: P = 2 theta at small balls deep inside a long segment") {
  // Theta(2^j B) = 1 until 2^j B leaves the segment; those terms are 2^-j small.
  auto s = corpus::spec("segment", 1 << 16);
  s.half_length = 1024.0;
  s.center = Point{0.0, 0.0};
  s.mass = 2048.0;
  const auto seg = generate(s);
  const Ball b{Point{0.0, 0.0}, 0.5};
  const double th = theta(seg, b);
  CHECK(th == doctest::Approx(2.0).epsilon(1e-2));
  CHECK(p_mu(seg, b) / th == doctest::Approx(2.0).epsilon(2e-3));
  CHECK(is_p_doubling(seg, b, 4.0));
  CHECK_FALSE(is_p_doubling(seg, b, 1.5));
  CHECK_THROWS_AS(is_p_doubling(seg, b, 0.5), Error);
}

TEST_CASE("p_mu exact tail equals 60 explicit terms on corner Cantor generation 4") {
  auto s = corpus::spec("corner_cantor");
  s.generation = 4;
  const auto mu = generate(s);
  const Ball& bb = mu.bounding_ball();
  std::vector<Ball> balls{bb, Ball{Point{0.1, 0.1}, 0.05}, Ball{Point{0.5, 0.5}, 0.3}, Ball{mu.point(17), 1e-3}};
  for (const auto& b : balls) {
    const double oracle = brute_p_mu(mu, b, 60);
    CHECK(p_mu(mu, b) == doctest::Approx(oracle).epsilon(1e-12));
    for (double c : {1.0, 1.5, 4.0, 10.0}) {
      CHECK(is_p_doubling(mu, b, c) == (oracle <= c * brute_mass(mu, b) / b.radius));
    }
  }
}

TEST_CASE("m_n enumerates jump radii") {
  const auto mu = atom(Point{}, 1.0, 0.5);
  CHECK(m_n(mu, Point{}, 1.0, 4.0) == 1.0);

  const PointMeasure two(2, {Point{1.0, 0.0}, Point{-1.0, 0.0}}, {0.5, 0.5}, 0.5);
  CHECK(m_n(two, Point{}, 0.5, 2.0) == 1.0);
  CHECK(m_n(two, Point{5.0, 5.0}, 0.5, 2.0) == 0.0);
  CHECK_THROWS_AS(m_n(two, Point{}, 2.0, 1.0), Error);
  CHECK_THROWS_AS(m_n(two, Point{}, 0.1, 1.0), Error);

  // Against a dense radius scan: m_n dominates and the scan approaches it.
  corpus::Rng rng(3);
  const auto cloud = corpus::random_measure(rng, 200, 2);
  for (int t = 0; t < 10; ++t) {
    const Point x{rng.uniform(), rng.uniform()};
    const double lo = 0.01, hi = 0.3;
    double scan = 0.0;
    for (int j = 0; j <= 20000; ++j) {
      const double r = lo + (hi - lo) * j / 20000.0;
      scan = std::max(scan, brute_mass(cloud, Ball{x, r}) / r);
    }
    const double exact = m_n(cloud, x, lo, hi);
    CHECK(exact >= scan * (1.0 - 1e-14));
    CHECK(exact <= scan * (1.0 + 2e-3));
  }
}

TEST_CASE("theta_star_upper is the windowed supremum") {
  const auto mu = atom(Point{}, 3.0, 0.01);
  CHECK(theta_star_upper(mu, Point{}) == doctest::Approx(300.0).epsilon(1e-14));
  CHECK(theta_star_upper(mu, Point{0.09, 0.0}) == 0.0);

  const auto seg = generate(corpus::spec("segment", 4096));
  const double h = seg.resolution_floor();
  const Point x{0.5 + 0.3 * h, 0.0};
  double scan = 0.0;
  for (int j = 0; j <= 20000; ++j) {
    const double r = h + 7.0 * h * j / 20000.0;
    scan = std::max(scan, brute_mass(seg, Ball{x, r}) / r);
  }
  const double got = theta_star_upper(seg, x);
  CHECK(got >= scan * (1.0 - 1e-14));
  CHECK(got <= scan * (1.0 + 1e-3));
  // Linear density of the unit segment is 1, and theta counts 2r of it.
  CHECK(got == doctest::Approx(2.0).epsilon(0.3));
}

TEST_CASE("grid and kd-tree indices agree with brute force") {
  corpus::Rng rng(5);
  for (int dim : {2, 3, 4}) {
    const auto base = corpus::clustered_measure(rng, 500, dim);
    const PointMeasure grid(dim, base.points(), base.weights(), 1e-2, IndexKind::kGrid);
    const PointMeasure tree(dim, base.points(), base.weights(), 1e-2, IndexKind::kKdTree);
    for (int t = 0; t < 200; ++t) {
      Ball b{base.point(rng.index(base.size())), std::pow(10.0, rng.uniform(-4.0, 0.0))};
      if (t % 3 == 0) b.center[0] += rng.uniform(-0.1, 0.1);
      std::vector<std::size_t> brute;
      for (std::size_t i = 0; i < base.size(); ++i) {
        if (b.contains(base.point(i))) brute.push_back(i);
      }
      CHECK(grid.query(b) == brute);
      CHECK(tree.query(b) == brute);
    }
  }
}

TEST_CASE("theta scaling identity and P lower bound") {
  corpus::Rng rng(9);
  for (const auto& [name, mu] : corpus::standard()) {
    CAPTURE(name);
    for (int t = 0; t < 20; ++t) {
      const Ball b{mu.point(rng.index(mu.size())), rng.uniform(0.01, 0.5)};
      const double lam = rng.uniform(0.3, 3.0);
      const Ball lb = b.scaled(lam);
      CHECK(theta(mu, lb) * std::pow(lb.radius, mu.n()) == doctest::Approx(mass_in_ball(mu, lb)).epsilon(1e-14));
      CHECK(p_mu(mu, b) >= theta(mu, b));
    }
  }
}

TEST_CASE("Lemma 6.2 dichotomy on random balls") {
  corpus::Rng rng(11);
  int tested = 0;
  for (int m = 0; m < 30; ++m) {
    const int dim = 2 + m % 2;
    const auto mu = corpus::clustered_measure(rng, 200, dim);
    for (int t = 0; t < 30; ++t) {
      Point c = mu.point(rng.index(mu.size()));
      c[0] += rng.uniform(-0.05, 0.05);
      const Ball b{c, std::pow(10.0, rng.uniform(-3.5, 0.0))};
      if (is_p_doubling(mu, b, 4.0)) continue;
      ++tested;
      CHECK(p_mu(mu, b.scaled(2.0)) > 1.5 * p_mu(mu, b) * (1.0 - 1e-10));
    }
  }
  CHECK(tested > 50);
}

TEST_CASE("Lemma 6.3 doubling-scale count on multiscale instances") {
  corpus::Rng rng(13);
  int used = 0;
  for (int t = 0; t < 20; ++t) {
    const int dim = 2 + t % 2;
    const int n = dim - 1;
    const int N = n == 1 ? 48 : 56;
    // Sawtooth periods divide N so that theta(B1) and theta(B0) match.
    const int periods2[] = {3, 4, 6, 8, 12, 16, 24};
    const int periods3[] = {4, 7, 8, 14, 28};
    const int period = n == 1 ? periods2[rng.index(7)] : periods3[rng.index(5)];
    const auto mu = t % 4 < 2 ? corpus::multiscale_measure(rng, dim, N + 4)
                              : corpus::sawtooth_measure(rng, dim, N + 4, rng.uniform(0.8, 3.0), period);
    const Ball b0{Point{}, 1.0};
    const Ball b1{Point{}, std::ldexp(1.0, -N)};
    const double alpha = 0.5, c0 = 4.0;
    if (!is_p_doubling(mu, b0, c0) || theta(mu, b1) < alpha * theta(mu, b0)) continue;
    ++used;
    const auto ds = doubling_scales(mu, b0, b1);
    CHECK(ds.N == N);
    const double needed = std::ceil(static_cast<double>(N) / (1 + 3 * n));
    CHECK(static_cast<double>(ds.doubling.size()) >= needed);
    CHECK(static_cast<double>(ds.doubling.size()) >= doubling_scale_lower_bound(N, n, c0, alpha));
  }
  CHECK(used >= 5);
}

TEST_CASE("rigid motions leave every statistic unchanged") {
  corpus::Rng rng(17);
  const corpus::Motion g{0.7, Point{3.0, -2.0}};
  for (const auto& [name, mu] : corpus::standard()) {
    CAPTURE(name);
    const auto gm = g.apply(mu);
    for (int t = 0; t < 10; ++t) {
      const Point x = mu.point(rng.index(mu.size()));
      const Ball b{x, rng.uniform(0.02, 0.4) * 1.0000001};
      const Ball gb{g.apply(x), b.radius};
      CHECK(theta(gm, gb) == doctest::Approx(theta(mu, b)).epsilon(1e-12));
      CHECK(p_mu(gm, gb) == doctest::Approx(p_mu(mu, b)).epsilon(1e-12));
      const double h = mu.resolution_floor();
      CHECK(m_n(gm, g.apply(x), h * 1.0000001, 0.3) == doctest::Approx(m_n(mu, x, h * 1.0000001, 0.3)).epsilon(1e-12));
    }
  }
}

TEST_CASE("measure files round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "gmt_test_measure";
  std::filesystem::create_directories(dir);
  const auto mu = generate(corpus::spec("circle", 17));
  save_measure_json(mu, (dir / "m.json").string());
  const auto back = load_measure_json((dir / "m.json").string());
  CHECK(back.points() == mu.points());
  CHECK(back.weights() == mu.weights());
  CHECK(back.resolution_floor() == mu.resolution_floor());

  {
    std::ofstream f(dir / "m.csv");
    f << "0.5,0.25,2\n1,1,0.5\n";
  }
  const auto csv = load_measure_csv((dir / "m.csv").string(), 2, 1e-3);
  REQUIRE(csv.size() == 2);
  CHECK(csv.point(0)[1] == 0.25);
  CHECK(csv.total_mass() == 2.5);

  {
    std::ofstream f(dir / "bad.csv");
    f << "0.5,0.25,-2\n";
  }
  CHECK_THROWS_AS(load_measure_csv((dir / "bad.csv").string(), 2, 1e-3), Error);
  CHECK_THROWS_AS(load_measure_json((dir / "missing.json").string()), Error);
  CHECK_THROWS_AS(PointMeasure(2, {Point{}}, {1.0, 2.0}, 1e-3), Error);
  CHECK_THROWS_AS(PointMeasure(2, {Point{}}, {0.0}, 1e-3), Error);
  CHECK_THROWS_AS(PointMeasure(2, {Point{}}, {1.0}, 0.0), Error);
}
