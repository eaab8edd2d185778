#pragma once

#include <vector>

#include "gmt/corona.hpp"
#include "gmt/lattice.hpp"
#include "gmt/point_measure.hpp"
#include "gmt/report.hpp"

namespace gmt {

struct FieldOptions {
  bool use_treecode = false;
  double opening_angle = 0.5;
};

// pv R mu at every atom, direct or by treecode.
VectorField riesz_field(const PointMeasure& mu, const FieldOptions& opt = {});

// sum over atoms of b of w theta*(x)^2.
double theta_star_integral(const PointMeasure& mu, const Ball& b);

// Local upper-bound comparison: maximal function and square function against
// oscillation, Poisson density and upper density terms.
ExperimentReport experiment_thm_local(const PointMeasure& mu, const Ball& b0, const FieldOptions& fopt = {});

struct LowerParams {
  double alpha = 0.5;
  double delta1 = 1.0 / 16.0;
  double delta0 = 0.0;   // <= 0 selects delta1^{2n+2}
  double c0 = 4.0;       // P-doubling constant for B0
  double c1 = 0.01;      // threshold the ratio is compared with
};

ExperimentReport experiment_thm_lower(const PointMeasure& mu, const Ball& b0, const Ball& b1, const LowerParams& p,
                                      const FieldOptions& fopt = {});

struct ApproximationParams {
  std::vector<int> levels;
  std::size_t samples = 32;   // per replaced cube
  LatticeParams lattice;
};

ExperimentReport experiment_approximation(const PointMeasure& mu, const Ball& b0, const ApproximationParams& p);

struct ContrastParams {
  std::vector<int> generations{3, 4, 5, 6};
  Ball b0{Point{0.5, 0.5, 0.0, 0.0}, 1.0};
  double comparator_half_length = 20.0;
  std::size_t comparator_atoms_per_unit = 256;
  double graph_amplitude = 0.02;
  double graph_frequency = 1.0;
  FieldOptions field{true, 0.5};
};

// Square function and Riesz oscillation of corner Cantor generations against
// flat and Lipschitz comparators with the same mass in B0.
ExperimentReport experiment_cantor_contrast(const ContrastParams& p);

}  // namespace gmt
