#pragma once

#include <cstddef>
#include <vector>

#include "gmt/lattice.hpp"
#include "gmt/point_measure.hpp"

namespace gmt {

struct CoronaParams {
  double theta0 = 0.05;
  double kappa0 = 0.1;
  double eps0 = 0.1;
};

struct StoppingFamily {
  CoronaParams params;
  std::vector<int> fmax;                 // maximal cubes meeting 1.5 B0 inside 1.8 B0
  std::vector<std::size_t> r0_atoms;     // ascending
  std::vector<int> ld;                   // ascending cube ids
  std::vector<std::vector<int>> stop;    // per ld cube
  std::vector<int> stop_all;             // union, ascending
  std::vector<int> stop0;                // decreasing mass prefix of stop_all
  double mu_r0 = 0.0;
  double ld_mass = 0.0;
  double stop_mass = 0.0;
  double stop0_mass = 0.0;
  bool stop0_threshold_met = false;
};

StoppingFamily build_stopping(const PointMeasure& mu, const Lattice& lat, const Ball& b0,
                              const CoronaParams& params = {});

// Atoms of Q at distance >= kappa0 l(Q) from every atom outside Q.
std::vector<std::size_t> inner_region(const PointMeasure& mu, const Lattice& lat, int q, double kappa0);

enum class SurrogateKind { kSigma, kSigmaTilde, kMu0, kEta };

const char* to_string(SurrogateKind kind);

struct SurrogateMeasure {
  SurrogateKind kind = SurrogateKind::kSigma;
  PointMeasure measure;
  std::size_t kept_atoms = 0;  // leading atoms copied unchanged from mu
  std::vector<std::size_t> kept_source;           // mu index of each kept atom
  std::vector<int> cubes;                         // replaced cubes
  std::vector<std::size_t> cube_begin;            // sample range [begin_k, begin_{k+1})
  std::vector<double> cube_mass;                  // mass each replacement must carry
};

// Deterministic samples: equal-angle circle / Fibonacci sphere.
std::vector<Point> sphere_samples(const Point& center, double radius, int dim, std::size_t count);
// Points of a cubic lattice through the center lying in the closed ball, about `count` of them.
std::vector<Point> ball_samples(const Point& center, double radius, int dim, std::size_t count);

// sigma_k (solid = false) or sigma~_k (solid = true).
SurrogateMeasure build_sigma(const PointMeasure& mu, const Lattice& lat, const Ball& b0, int k,
                             std::size_t samples, bool solid = false);
SurrogateMeasure build_mu0(const PointMeasure& mu, const Lattice& lat, const StoppingFamily& fam);
SurrogateMeasure build_eta(const PointMeasure& mu, const Lattice& lat, const StoppingFamily& fam,
                           std::size_t samples);

// Largest relative deviation between carried and required per-cube mass,
// with the carried mass summed in compensated arithmetic.
double surrogate_mass_error(const SurrogateMeasure& s);

struct GoodBallReport {
  double integral = 0.0;  // int_B M_n(chi_B mu) dmu
  double bound = 0.0;     // C2 theta(B) mu(B)
  bool good = false;
};

GoodBallReport good_ball_report(const PointMeasure& mu, const Ball& b, double c2);
bool good_ball(const PointMeasure& mu, const Ball& b, double c2);

// M_n of the restriction of mu to b at each atom of b, window [h, 2 rad].
std::vector<double> restricted_maximal(const PointMeasure& mu, const Ball& b);

struct FrostmanResult {
  std::vector<std::size_t> subset;  // mu indices of E
  double mass_e = 0.0;
  double mass_b = 0.0;
  double scale = 0.0;               // sigma = mu|_E / scale
  double content_bound = 0.0;       // rad^n / (8 C2)
  PointMeasure sigma;
};

FrostmanResult frostman_extract(const PointMeasure& mu, const Ball& b, double c2);

// Upper bound for the radius-convention content inf sum r_i^n: best greedy
// cover by balls centered at the points, over scales from h to the diameter.
double hausdorff_content_upper(const PointMeasure& mu, int n);

}  // namespace gmt
