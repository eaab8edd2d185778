#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gmt/geometry.hpp"

namespace gmt {

// Range queries over a fixed point set. The index keeps a pointer to the
// point buffer, which must outlive it and never reallocate. Both implementations append the
// indices of points in the closed ball, in unspecified order.
class SpatialIndex {
 public:
  virtual ~SpatialIndex() = default;
  virtual void query(const Point& center, double radius, std::vector<std::size_t>& out) const = 0;
};

// Dense uniform grid stored in CSR form.
class GridIndex final : public SpatialIndex {
 public:
  GridIndex(const std::vector<Point>& points, int dim, double cell_size);
  void query(const Point& center, double radius, std::vector<std::size_t>& out) const override;
  double cell_size() const { return cell_; }

 private:
  std::int64_t cell_coord(double x, int axis) const;

  const Point* points_;
  int dim_;
  double cell_;
  Point origin_{};
  std::array<std::int64_t, kMaxDim> extent_{};
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> items_;
};

class KdTree final : public SpatialIndex {
 public:
  KdTree(const std::vector<Point>& points, int dim);
  void query(const Point& center, double radius, std::vector<std::size_t>& out) const override;

 private:
  struct Node {
    Point lo{}, hi{};
    std::size_t begin = 0, end = 0;
    int left = -1, right = -1;
  };
  int build(std::size_t begin, std::size_t end);

  const Point* points_;
  int dim_;
  std::vector<std::size_t> perm_;
  std::vector<Node> nodes_;
};

}  // namespace gmt
