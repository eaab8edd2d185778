#include "gmt/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gmt {

GridIndex::GridIndex(const std::vector<Point>& points, int dim, double cell_size)
    : points_(points.data()), dim_(dim), cell_(cell_size) {
  if (points.empty()) {
    offsets_.assign(2, 0);
    return;
  }
  Point lo = points[0], hi = points[0];
  for (const auto& p : points) {
    for (int a = 0; a < dim_; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  origin_ = lo;
  std::size_t cells = 1;
  for (int a = 0; a < kMaxDim; ++a) {
    extent_[a] = a < dim_ ? static_cast<std::int64_t>(std::floor((hi[a] - lo[a]) / cell_)) + 1 : 1;
    cells *= static_cast<std::size_t>(extent_[a]);
  }
  std::vector<std::size_t> key(points.size());
  offsets_.assign(cells + 1, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::size_t k = 0;
    for (int a = dim_ - 1; a >= 0; --a) k = k * extent_[a] + cell_coord(points[i][a], a);
    key[i] = k;
    ++offsets_[k + 1];
  }
  for (std::size_t c = 0; c < cells; ++c) offsets_[c + 1] += offsets_[c];
  items_.resize(points.size());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t i = 0; i < points.size(); ++i) items_[fill[key[i]]++] = i;
}

std::int64_t GridIndex::cell_coord(double x, int axis) const {
  const auto c = static_cast<std::int64_t>(std::floor((x - origin_[axis]) / cell_));
  return std::clamp<std::int64_t>(c, 0, extent_[axis] - 1);
}

void GridIndex::query(const Point& center, double radius, std::vector<std::size_t>& out) const {
  if (items_.empty()) return;
  std::array<std::int64_t, kMaxDim> lo{}, hi{};
  for (int a = 0; a < dim_; ++a) {
    const double l = std::floor((center[a] - radius - origin_[a]) / cell_);
    const double h = std::floor((center[a] + radius - origin_[a]) / cell_);
    if (h < 0 || l > static_cast<double>(extent_[a] - 1)) return;
    lo[a] = static_cast<std::int64_t>(std::max(l, 0.0));
    hi[a] = static_cast<std::int64_t>(std::min(h, static_cast<double>(extent_[a] - 1)));
  }
  const double r2 = radius * radius;
  std::array<std::int64_t, kMaxDim> c = lo;
  for (;;) {
    std::size_t k = 0;
    for (int a = dim_ - 1; a >= 0; --a) k = k * extent_[a] + c[a];
    for (std::size_t j = offsets_[k]; j < offsets_[k + 1]; ++j) {
      const std::size_t i = items_[j];
      if (dist2(points_[i], center) <= r2) out.push_back(i);
    }
    int a = 0;
    while (a < dim_) {
      if (++c[a] <= hi[a]) break;
      c[a] = lo[a];
      ++a;
    }
    if (a == dim_) break;
  }
}

KdTree::KdTree(const std::vector<Point>& points, int dim) : points_(points.data()), dim_(dim) {
  perm_.resize(points.size());
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  if (!points.empty()) {
    nodes_.reserve(2 * points.size() / 8 + 1);
    build(0, points.size());
  }
}

int KdTree::build(std::size_t begin, std::size_t end) {
  constexpr std::size_t kLeaf = 16;
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{});
  Point lo = points_[perm_[begin]], hi = lo;
  for (std::size_t j = begin; j < end; ++j) {
    const Point& p = points_[perm_[j]];
    for (int a = 0; a < dim_; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  nodes_[id].lo = lo;
  nodes_[id].hi = hi;
  nodes_[id].begin = begin;
  nodes_[id].end = end;
  if (end - begin <= kLeaf) return id;
  int axis = 0;
  for (int a = 1; a < dim_; ++a) {
    if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                   [&](std::size_t x, std::size_t y) {
                     const double px = points_[x][axis], py = points_[y][axis];
                     return px < py || (px == py && x < y);
                   });
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree::query(const Point& center, double radius, std::vector<std::size_t>& out) const {
  if (nodes_.empty()) return;
  const double r2 = radius * radius;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& nd = nodes_[stack.back()];
    stack.pop_back();
    double gap2 = 0.0;
    for (int a = 0; a < dim_; ++a) {
      const double g = std::max({nd.lo[a] - center[a], 0.0, center[a] - nd.hi[a]});
      gap2 += g * g;
    }
    if (gap2 > r2) continue;
    if (nd.left < 0) {
      for (std::size_t j = nd.begin; j < nd.end; ++j) {
        const std::size_t i = perm_[j];
        if (dist2(points_[i], center) <= r2) out.push_back(i);
      }
    } else {
      stack.push_back(nd.right);
      stack.push_back(nd.left);
    }
  }
}

}  // namespace gmt
