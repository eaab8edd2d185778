#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "gmt/geometry.hpp"
#include "gmt/spatial_index.hpp"

namespace gmt {

enum class IndexKind { kAuto, kGrid, kKdTree };

inline constexpr std::size_t kKdTreeThreshold = 1000000;

// Finite atomic measure in R^d with d = n + 1. Immutable after construction.
class PointMeasure {
 public:
  // Empty planar measure.
  PointMeasure();
  PointMeasure(int dim, std::vector<Point> points, std::vector<double> weights,
               double resolution_floor, IndexKind index = IndexKind::kAuto);

  PointMeasure(const PointMeasure& other);
  PointMeasure& operator=(const PointMeasure& other);
  PointMeasure(PointMeasure&&) noexcept;
  PointMeasure& operator=(PointMeasure&&) noexcept;
  ~PointMeasure();

  int dim() const { return dim_; }
  int n() const { return dim_ - 1; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Point& point(std::size_t i) const { return points_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<Point>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  double resolution_floor() const { return h_; }
  double total_mass() const { return total_mass_; }
  IndexKind index_kind() const { return index_kind_; }

  // A ball containing every atom: bounding-box center, max distance to it.
  const Ball& bounding_ball() const { return bounding_; }

  // Indices of atoms in the closed ball, ascending.
  std::vector<std::size_t> query(const Ball& b) const;
  void query(const Ball& b, std::vector<std::size_t>& out) const;

  PointMeasure restricted(const std::vector<std::size_t>& atoms) const;
  PointMeasure restricted(const Ball& b) const;
  PointMeasure with_weights(std::vector<double> weights) const;
  PointMeasure with_resolution_floor(double h) const;

 private:
  void build_index();

  int dim_;
  std::vector<Point> points_;
  std::vector<double> weights_;
  double h_;
  double total_mass_ = 0.0;
  Ball bounding_;
  IndexKind requested_;
  IndexKind index_kind_ = IndexKind::kGrid;
  std::unique_ptr<SpatialIndex> index_;
};

PointMeasure load_measure_json(const std::string& path);
PointMeasure load_measure_csv(const std::string& path, int dim, double resolution_floor);
PointMeasure load_measure(const std::string& path, int dim = 2, double resolution_floor = 1e-3);
void save_measure_json(const PointMeasure& mu, const std::string& path);

}  // namespace gmt
