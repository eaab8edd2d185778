#pragma once

// Shared fixtures for the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gmt/generators.hpp"
#include "gmt/point_measure.hpp"

namespace corpus {

using gmt::operator*;
using gmt::operator+;
using gmt::operator-;

inline const double kPi = std::acos(-1.0);

struct Named {
  std::string name;
  gmt::PointMeasure mu;
};

inline gmt::GeneratorSpec spec(const std::string& kind, std::size_t count = 256) {
  gmt::GeneratorSpec s;
  s.kind = kind;
  s.count = count;
  return s;
}

// One instance of every generator kind at sizes that keep O(N^2) checks cheap.
inline std::vector<Named> standard() {
  std::vector<Named> out;
  out.push_back({"segment", gmt::generate(spec("segment", 256))});
  {
    auto s = spec("lipschitz_graph", 300);
    s.amplitude = 0.08;
    s.frequency = 2.0;
    out.push_back({"lipschitz_graph", gmt::generate(s)});
  }
  out.push_back({"circle", gmt::generate(spec("circle", 200))});
  {
    auto s = spec("corner_cantor");
    s.generation = 4;
    out.push_back({"corner_cantor", gmt::generate(s)});
  }
  {
    auto s = spec("cantor_density");
    s.side_ratios = {0.25, 0.2, 0.3, 0.25};
    out.push_back({"cantor_density", gmt::generate(s)});
  }
  out.push_back({"plane_patch_3d", gmt::generate(spec("plane_patch_3d", 14))});
  out.push_back({"grid_square", gmt::generate(spec("grid_square", 16))});
  {
    auto s = spec("atom_cloud", 300);
    s.seed = 7;
    out.push_back({"atom_cloud_2d", gmt::generate(s)});
    s.dim = 3;
    s.seed = 11;
    out.push_back({"atom_cloud_3d", gmt::generate(s)});
  }
  return out;
}

// Uniform doubles in [0, 1) from a 64-bit engine, stable across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }
  double normal() {
    // Box-Muller on the engine above; std::normal_distribution is not portable.
    const double u = 1.0 - uniform();
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * kPi * v);
  }

 private:
  std::mt19937_64 eng_;
};

// Random atoms in [0,1]^dim with weights in [0.5, 1.5].
inline gmt::PointMeasure random_measure(Rng& rng, std::size_t n, int dim, double h = 1e-3) {
  std::vector<gmt::Point> pts(n);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int a = 0; a < dim; ++a) pts[i][a] = rng.uniform();
    w[i] = rng.uniform(0.5, 1.5);
  }
  return gmt::PointMeasure(dim, std::move(pts), std::move(w), h);
}

// Clustered measure: a few Gaussian blobs of very different widths, so both
// doubling and non-doubling balls occur.
inline gmt::PointMeasure clustered_measure(Rng& rng, std::size_t n, int dim) {
  const int blobs = 1 + static_cast<int>(rng.index(4));
  std::vector<gmt::Point> centers(blobs);
  std::vector<double> widths(blobs);
  for (int b = 0; b < blobs; ++b) {
    for (int a = 0; a < dim; ++a) centers[b][a] = rng.uniform();
    widths[b] = std::pow(10.0, rng.uniform(-3.0, -0.5));
  }
  std::vector<gmt::Point> pts(n);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t b = rng.index(blobs);
    for (int a = 0; a < dim; ++a) pts[i][a] = centers[b][a] + widths[b] * rng.normal();
    w[i] = rng.uniform(0.1, 2.0);
  }
  return gmt::PointMeasure(dim, std::move(pts), std::move(w), 1e-4);
}

inline gmt::Point random_unit(Rng& rng, int dim) {
  gmt::Point p{};
  double s = 0.0;
  do {
    s = 0.0;
    for (int a = 0; a < dim; ++a) {
      p[a] = rng.normal();
      s += p[a] * p[a];
    }
  } while (s < 1e-12);
  return (1.0 / std::sqrt(s)) * p;
}

// Rigid motion x -> Q x + t with Q a planar rotation in the (0, 1) axes.
struct Motion {
  double angle = 0.0;
  gmt::Point shift{};
  gmt::Point apply(const gmt::Point& p) const {
    gmt::Point q = p;
    q[0] = std::cos(angle) * p[0] - std::sin(angle) * p[1];
    q[1] = std::sin(angle) * p[0] + std::cos(angle) * p[1];
    return q + shift;
  }
  gmt::PointMeasure apply(const gmt::PointMeasure& mu) const {
    std::vector<gmt::Point> pts;
    for (const auto& p : mu.points()) pts.push_back(apply(p));
    return gmt::PointMeasure(mu.dim(), pts, mu.weights(), mu.resolution_floor());
  }
};

// Radial multiscale measure about the origin: octave shell k (radii in
// [2^{-k-1}, 2^{-k})) carries mass 2^{-kn} e^{g_k}, with g a reflected random
// walk, plus a light halo outside the unit ball. Density ratios between
// scales stay bounded while individual scales can fail to be doubling.
inline gmt::PointMeasure multiscale_measure(Rng& rng, int dim, int octaves, double step = 1.5) {
  const int n = dim - 1;
  std::vector<gmt::Point> pts;
  std::vector<double> w;
  double g = 0.0;
  const int per_shell = 6;
  for (int k = 0; k < octaves; ++k) {
    g += rng.uniform(-step, step);
    if (g > 3.0) g = 6.0 - g;
    if (g < -3.0) g = -6.0 - g;
    const double shell = std::ldexp(1.0, -k * n) * std::exp(g);
    for (int s = 0; s < per_shell; ++s) {
      const double r = std::ldexp(1.0, -k) * std::pow(2.0, -rng.uniform());
      pts.push_back(r * random_unit(rng, dim));
      w.push_back(shell / per_shell);
    }
  }
  for (int s = 0; s < 8; ++s) {
    pts.push_back(rng.uniform(1.5, 3.0) * random_unit(rng, dim));
    w.push_back(0.02);
  }
  return gmt::PointMeasure(dim, std::move(pts), std::move(w), std::ldexp(1.0, -(octaves + 4)));
}

// Radial measure whose shell density decays by e^{-slope} per octave over
// runs of `period` octaves and then jumps back: most balls inside a run fail
// to be doubling, and only the scales just past a jump are doubling.
inline gmt::PointMeasure sawtooth_measure(Rng& rng, int dim, int octaves, double slope, int period) {
  const int n = dim - 1;
  std::vector<gmt::Point> pts;
  std::vector<double> w;
  const int per_shell = 4;
  for (int k = 0; k < octaves; ++k) {
    const double shell = std::ldexp(1.0, -k * n) * std::exp(-slope * (k % period));
    for (int s = 0; s < per_shell; ++s) {
      const double r = std::ldexp(1.0, -k) * std::pow(2.0, -rng.uniform());
      pts.push_back(r * random_unit(rng, dim));
      w.push_back(shell / per_shell);
    }
  }
  return gmt::PointMeasure(dim, std::move(pts), std::move(w), std::ldexp(1.0, -(octaves + 4)));
}

// Uniform unit segment plus a heavy cluster at its midpoint: the segment far
// from the cluster is low density relative to B0.
inline gmt::PointMeasure spiked_segment(std::size_t atoms = 1024, double spike = 50.0) {
  std::vector<gmt::Point> p;
  std::vector<double> w;
  for (std::size_t i = 0; i < atoms; ++i) {
    p.push_back(gmt::Point{(static_cast<double>(i) + 0.5) / static_cast<double>(atoms), 0.0});
    w.push_back(1.0 / static_cast<double>(atoms));
  }
  for (int i = 0; i < 16; ++i) {
    p.push_back(gmt::Point{0.5 + 1e-4 * i, 1e-3});
    w.push_back(spike / 16.0);
  }
  return gmt::PointMeasure(2, p, w, 1e-6);
}

inline double rel_diff(double a, double b) {
  const double s = std::max(std::fabs(a), std::fabs(b));
  return s == 0.0 ? 0.0 : std::fabs(a - b) / s;
}

}  // namespace corpus
