#include "gmt/point_measure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gmt/error.hpp"
#include "gmt/parallel.hpp"
#include "json.hpp"

namespace gmt {

PointMeasure::PointMeasure(int dim, std::vector<Point> points, std::vector<double> weights,
                           double resolution_floor, IndexKind index)
    : dim_(dim),
      points_(std::move(points)),
      weights_(std::move(weights)),
      h_(resolution_floor),
      requested_(index) {
  if (dim_ < 2 || dim_ > kMaxDim) {
    throw Error(ErrorKind::kInvalidArgument, "ambient dimension must lie in [2, 4]");
  }
  if (points_.size() != weights_.size()) {
    throw Error(ErrorKind::kInvalidArgument, "points and weights differ in length");
  }
  if (!(h_ > 0.0) || !std::isfinite(h_)) {
    throw Error(ErrorKind::kInvalidArgument, "resolution floor must be positive");
  }
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw Error(ErrorKind::kInvalidArgument, "atom weights must be positive and finite");
    }
  }
  total_mass_ = compensated_sum(weights_);
  for (auto& p : points_) {
    for (int a = dim_; a < kMaxDim; ++a) p[a] = 0.0;
    for (int a = 0; a < dim_; ++a) {
      if (!std::isfinite(p[a])) throw Error(ErrorKind::kInvalidArgument, "non-finite coordinate");
    }
  }
  if (!points_.empty()) {
    Point lo = points_[0], hi = points_[0];
    for (const auto& p : points_) {
      for (int a = 0; a < dim_; ++a) {
        lo[a] = std::min(lo[a], p[a]);
        hi[a] = std::max(hi[a], p[a]);
      }
    }
    bounding_.center = 0.5 * (lo + hi);
    double r2 = 0.0;
    for (const auto& p : points_) r2 = std::max(r2, dist2(p, bounding_.center));
    bounding_.radius = std::sqrt(r2);
  } else {
    bounding_.radius = 0.0;
  }
  build_index();
}

PointMeasure::PointMeasure() : PointMeasure(2, {}, {}, 1.0) {}

void PointMeasure::build_index() {
  index_kind_ = requested_;
  if (index_kind_ == IndexKind::kAuto) {
    index_kind_ = points_.size() > kKdTreeThreshold ? IndexKind::kKdTree : IndexKind::kGrid;
  }
  if (index_kind_ == IndexKind::kKdTree) {
    index_ = std::make_unique<KdTree>(points_, dim_);
    return;
  }
  double extent = 0.0;
  if (!points_.empty()) extent = 2.0 * bounding_.radius;
  const double per_axis = std::ceil(std::pow(static_cast<double>(std::max<std::size_t>(points_.size(), 1)),
                                             1.0 / dim_));
  double cell = std::max(h_ * std::sqrt(static_cast<double>(dim_)), extent / per_axis);
  if (!(cell > 0.0)) cell = h_;
  index_ = std::make_unique<GridIndex>(points_, dim_, cell);
}

PointMeasure::PointMeasure(const PointMeasure& o)
    : dim_(o.dim_),
      points_(o.points_),
      weights_(o.weights_),
      h_(o.h_),
      total_mass_(o.total_mass_),
      bounding_(o.bounding_),
      requested_(o.requested_) {
  build_index();
}

PointMeasure& PointMeasure::operator=(const PointMeasure& o) {
  if (this != &o) {
    PointMeasure tmp(o);
    *this = std::move(tmp);
  }
  return *this;
}

PointMeasure::PointMeasure(PointMeasure&&) noexcept = default;
PointMeasure& PointMeasure::operator=(PointMeasure&&) noexcept = default;
PointMeasure::~PointMeasure() = default;

void PointMeasure::query(const Ball& b, std::vector<std::size_t>& out) const {
  out.clear();
  if (b.radius < 0.0) return;
  index_->query(b.center, b.radius, out);
  std::sort(out.begin(), out.end());
}

std::vector<std::size_t> PointMeasure::query(const Ball& b) const {
  std::vector<std::size_t> out;
  query(b, out);
  return out;
}

PointMeasure PointMeasure::restricted(const std::vector<std::size_t>& atoms) const {
  std::vector<Point> pts;
  std::vector<double> ws;
  pts.reserve(atoms.size());
  ws.reserve(atoms.size());
  for (std::size_t i : atoms) {
    pts.push_back(points_[i]);
    ws.push_back(weights_[i]);
  }
  return PointMeasure(dim_, std::move(pts), std::move(ws), h_, requested_);
}

PointMeasure PointMeasure::restricted(const Ball& b) const { return restricted(query(b)); }

PointMeasure PointMeasure::with_weights(std::vector<double> weights) const {
  return PointMeasure(dim_, points_, std::move(weights), h_, requested_);
}

PointMeasure PointMeasure::with_resolution_floor(double h) const {
  return PointMeasure(dim_, points_, weights_, h, requested_);
}

PointMeasure load_measure_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(ErrorKind::kIo, std::string("malformed measure file: ") + e.what());
  }
  const int d = j.at("ambient_dim").get<int>();
  if (j.contains("codim_target") && j.at("codim_target").get<int>() != d - 1) {
    throw Error(ErrorKind::kInvalidArgument, "codim_target must equal ambient_dim - 1");
  }
  std::vector<Point> pts;
  for (const auto& row : j.at("points")) {
    if (static_cast<int>(row.size()) != d) throw Error(ErrorKind::kInvalidArgument, "point of wrong dimension");
    Point p{};
    for (int a = 0; a < d; ++a) p[a] = row[a].get<double>();
    pts.push_back(p);
  }
  auto ws = j.at("weights").get<std::vector<double>>();
  return PointMeasure(d, std::move(pts), std::move(ws), j.at("resolution_floor").get<double>());
}

PointMeasure load_measure_csv(const std::string& path, int dim, double resolution_floor) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  std::vector<Point> pts;
  std::vector<double> ws;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    std::vector<double> vals;
    double v;
    while (row >> v) vals.push_back(v);
    if (static_cast<int>(vals.size()) != dim + 1) {
      throw Error(ErrorKind::kInvalidArgument, "CSV row must hold d coordinates and a weight");
    }
    Point p{};
    for (int a = 0; a < dim; ++a) p[a] = vals[a];
    pts.push_back(p);
    ws.push_back(vals[dim]);
  }
  return PointMeasure(dim, std::move(pts), std::move(ws), resolution_floor);
}

PointMeasure load_measure(const std::string& path, int dim, double resolution_floor) {
  const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  return csv ? load_measure_csv(path, dim, resolution_floor) : load_measure_json(path);
}

void save_measure_json(const PointMeasure& mu, const std::string& path) {
  nlohmann::json j;
  j["ambient_dim"] = mu.dim();
  j["codim_target"] = mu.n();
  j["resolution_floor"] = mu.resolution_floor();
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : mu.points()) {
    nlohmann::json row = nlohmann::json::array();
    for (int a = 0; a < mu.dim(); ++a) row.push_back(p[a]);
    pts.push_back(row);
  }
  j["points"] = pts;
  j["weights"] = mu.weights();
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << j.dump(1) << "\n";
}

}  // namespace gmt
