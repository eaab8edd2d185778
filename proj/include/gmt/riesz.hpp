#pragma once

#include <cstddef>
#include <vector>

#include "gmt/field.hpp"
#include "gmt/point_measure.hpp"

namespace gmt {

struct KernelConfig {
  double eps = 0.0;     // truncation length; 0 means no truncation
  bool smooth = false;  // weight by the bump profile instead of a hard cut
};

// Quintic smoothstep in s - 1: 0 on [0, 1], 1 on [2, inf), C^2 and monotone.
double bump_profile(double s);

// x / |x|^{n+1}; zero at the origin.
Point riesz_kernel(const Point& x, int n);

Point riesz_at(const PointMeasure& mu, const Point& x, const KernelConfig& cfg);

// Self-excluded sum at atom i.
Point riesz_pv(const PointMeasure& mu, std::size_t i);

// Self-excluded sums at every atom: out_i = sum_{j != i, mask_j} c_j K(x_i - x_j).
// Null coeffs means the atom weights; null mask means every source.
VectorField kernel_sum(const PointMeasure& mu, const std::vector<double>* coeffs = nullptr,
                       const std::vector<char>* mask = nullptr);

VectorField riesz_pv_field(const PointMeasure& mu);

// sup over eps >= eps_min of |R_eps mu(x)| for the hard truncation, over the
// jump set of eps values.
double riesz_star(const PointMeasure& mu, const Point& x, double eps_min = 0.0);

// Geometric grid eps_min * ratio^k up to eps_max (inclusive of eps_min).
std::vector<double> geometric_eps_grid(double eps_min, double eps_max, double ratio = 1.4142135623730951);
double riesz_star_smooth(const PointMeasure& mu, const Point& x, const std::vector<double>& eps_grid);

// sum over atoms in b of w |field - mean_b(field)|^2.
double oscillation_l2(const PointMeasure& mu, const Ball& b, const VectorField& field);
double oscillation_l2(const PointMeasure& mu, const std::vector<std::size_t>& atoms, const VectorField& field);

// Scalar f -> vector field sum_{j != i, mask_j} w_j K(x_i - x_j) f_j.
VectorField riesz_apply(const PointMeasure& mu, const std::vector<double>& f,
                        const std::vector<char>* mask = nullptr);

// Vector g -> scalar field sum_{j != i, mask_j} w_j K(x_i - x_j) . g_j.
std::vector<double> riesz_contract(const PointMeasure& mu, const VectorField& g,
                                   const std::vector<char>* mask = nullptr,
                                   const std::vector<double>* coeffs = nullptr);

// Adjoint of riesz_apply in L^2(mu): -riesz_contract.
std::vector<double> riesz_adjoint_apply(const PointMeasure& mu, const VectorField& g,
                                        const std::vector<char>* mask = nullptr,
                                        const std::vector<double>* coeffs = nullptr);

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Power iteration on R*R over the atoms of b.
NormEstimate operator_norm_estimate(const PointMeasure& mu, const Ball& b, int max_iterations = 500,
                                    double tolerance = 1e-6);

// Barnes-Hut traversal with a Cartesian Taylor expansion of the kernel about
// each cell's center of mass. A cell is summed through its expansion when its
// radius about the center of mass is below opening_angle times the distance to
// the target and the whole cell clears the truncation band.
std::vector<Point> treecode_riesz(const PointMeasure& mu, const std::vector<Point>& targets,
                                  const KernelConfig& cfg, double opening_angle);

// Direct counterpart of treecode_riesz.
std::vector<Point> direct_riesz(const PointMeasure& mu, const std::vector<Point>& targets, const KernelConfig& cfg);

}  // namespace gmt
