#include "gmt/generators.hpp"

#include <cmath>
#include <random>

#include "gmt/error.hpp"

namespace gmt {

namespace {

const double kPi = std::acos(-1.0);

PointMeasure uniform(int dim, std::vector<Point> pts, double mass, double h) {
  const std::vector<double> w(pts.size(), mass / static_cast<double>(pts.size()));
  return PointMeasure(dim, std::move(pts), w, h);
}

PointMeasure cantor(const std::vector<double>& ratios, double mass) {
  // Cells as (lower-left corner, side); children sit in the four corners.
  std::vector<std::pair<Point, double>> cells{{Point{}, 1.0}};
  for (double s : ratios) {
    if (!(s > 0.0 && s < 0.5)) throw Error(ErrorKind::kInvalidArgument, "Cantor side ratio must lie in (0, 1/2)");
    std::vector<std::pair<Point, double>> next;
    next.reserve(cells.size() * 4);
    for (const auto& [c, side] : cells) {
      const double child = side * s;
      for (int q = 0; q < 4; ++q) {
        Point p = c;
        p[0] += (q & 1) ? side - child : 0.0;
        p[1] += (q & 2) ? side - child : 0.0;
        next.emplace_back(p, child);
      }
    }
    cells = std::move(next);
  }
  std::vector<Point> pts;
  pts.reserve(cells.size());
  for (const auto& [c, side] : cells) pts.push_back(Point{c[0] + side / 2, c[1] + side / 2, 0.0, 0.0});
  return uniform(2, std::move(pts), mass, cells.front().second);
}

}  // namespace

PointMeasure generate(const GeneratorSpec& s) {
  if (!(s.mass > 0.0)) throw Error(ErrorKind::kInvalidArgument, "mass must be positive");
  const std::size_t N = s.count;
  if (s.kind == "segment" || s.kind == "lipschitz_graph") {
    if (N == 0) throw Error(ErrorKind::kInvalidArgument, "count must be positive");
    std::vector<Point> pts(N);
    const double len = 2.0 * s.half_length;
    for (std::size_t k = 0; k < N; ++k) {
      const double t = (static_cast<double>(k) + 0.5) / static_cast<double>(N);
      pts[k] = s.center;
      pts[k][0] += len * (t - 0.5);
      if (s.kind == "lipschitz_graph") pts[k][1] += s.amplitude * std::sin(2.0 * kPi * s.frequency * pts[k][0]);
    }
    return uniform(2, std::move(pts), s.mass, len / static_cast<double>(N));
  }
  if (s.kind == "circle") {
    if (N == 0 || !(s.radius > 0.0)) throw Error(ErrorKind::kInvalidArgument, "circle needs count and radius");
    std::vector<Point> pts(N);
    for (std::size_t k = 0; k < N; ++k) {
      const double t = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(N);
      pts[k] = Point{s.radius * std::cos(t), s.radius * std::sin(t), 0.0, 0.0};
    }
    return uniform(2, std::move(pts), s.mass, 2.0 * kPi * s.radius / static_cast<double>(N));
  }
  if (s.kind == "corner_cantor") {
    if (s.generation < 0 || s.generation > 12) throw Error(ErrorKind::kInvalidArgument, "generation must lie in [0, 12]");
    return cantor(std::vector<double>(static_cast<std::size_t>(s.generation), 0.25), s.mass);
  }
  if (s.kind == "cantor_density") {
    if (s.side_ratios.empty() || s.side_ratios.size() > 12) {
      throw Error(ErrorKind::kInvalidArgument, "cantor_density needs 1 to 12 side ratios");
    }
    return cantor(s.side_ratios, s.mass);
  }
  if (s.kind == "plane_patch_3d" || s.kind == "grid_square") {
    if (N == 0) throw Error(ErrorKind::kInvalidArgument, "count must be positive");
    std::vector<Point> pts;
    pts.reserve(N * N);
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = 0; j < N; ++j) {
        pts.push_back(Point{(static_cast<double>(i) + 0.5) / static_cast<double>(N),
                            (static_cast<double>(j) + 0.5) / static_cast<double>(N), 0.0, 0.0});
      }
    }
    return uniform(s.kind == "grid_square" ? 2 : 3, std::move(pts), s.mass, 1.0 / static_cast<double>(N));
  }
  if (s.kind == "atom_cloud") {
    if (N == 0 || s.dim < 2 || s.dim > kMaxDim) throw Error(ErrorKind::kInvalidArgument, "atom_cloud needs count and 2 <= dim <= 4");
    std::mt19937_64 rng(s.seed);
    std::vector<Point> pts(N);
    for (auto& p : pts) {
      for (int c = 0; c < s.dim; ++c) p[c] = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    }
    return uniform(s.dim, std::move(pts), s.mass, std::pow(static_cast<double>(N), -1.0 / s.dim) / 8.0);
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown generator kind: " + s.kind);
}

}  // namespace gmt
