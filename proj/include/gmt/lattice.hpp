#pragma once

#include <cstddef>
#include <vector>

#include "gmt/field.hpp"
#include "gmt/point_measure.hpp"

namespace gmt {

struct LatticeParams {
  double C0 = 2.0;
  double A0 = 4.0;
  int max_depth = 16;

  double Cd(int n) const;
};

struct Cube {
  int id = -1;
  int level = 0;
  std::size_t center_atom = 0;
  Point center{};
  double radius = 0.0;  // r(Q)
  double side = 0.0;    // l(Q) = 56 C0 r(Q)
  std::vector<std::size_t> atoms;  // ascending
  double mass = 0.0;
  int parent = -1;
  std::vector<int> children;

  bool db = false;
  bool p_doubling = false;
  double bucket = 0.0;
  double p_mu = 0.0;
  int bucket_exp = 0;  // bucket = A0^{bucket_exp * n}
  double mass_2b = 0.0;

  Ball ball() const { return Ball{center, radius}; }
  // B_Q = 28 B(Q).
  Ball big_ball() const { return Ball{center, 28.0 * radius}; }
};

// Cube neighbourhoods of the form lambda Q.
enum class RegionMode {
  kUnionOfCubes,  // same-generation cubes P with dist(x_Q, P) <= lambda l(Q)
  kMetricBall,    // atoms in lambda B_Q
};

struct Lattice {
  LatticeParams params;
  int n = 1;
  double root_scale = 1.0;
  std::vector<Cube> cubes;
  std::vector<std::vector<int>> levels;
  std::vector<std::vector<int>> atom_cube;  // [level][atom] -> cube id
  bool resolution_reached = false;

  int depth() const { return static_cast<int>(levels.size()) - 1; }
  const Cube& cube(int id) const { return cubes[static_cast<std::size_t>(id)]; }
  bool contains(int outer, int inner) const;
};

// Nested greedy nets: level k centers are a maximal subset of atoms with
// pairwise distance > 10 r_k, scanned by decreasing weight then index and
// seeded with the level k-1 centers.
Lattice build_lattice(const PointMeasure& mu, const LatticeParams& params);

struct CubeFlags {
  bool db = false;
  bool p_doubling = false;
  double bucket = 0.0;
  double p_mu = 0.0;
  double density_2b = 0.0;  // mu(2 B_Q) / l(Q)^n
  int bucket_exp = 0;
};

CubeFlags cube_flags(const Lattice& lat, int q, const PointMeasure& mu);

// Integer k with value in [A0^{kn}, A0^{(k+1)n}). Requires value > 0.
int density_bucket_exp(double value, double A0, int n);
double bucket_value(int exp, double A0, int n);

// Maximal cubes P with l(P) < l(Q) and bucket(P) >= A0^{kn} bucket(Q).
std::vector<int> hd_k(const Lattice& lat, int q, int k);

// Atom set of lambda Q.
std::vector<std::size_t> region_atoms(const Lattice& lat, const PointMeasure& mu, int q, double lambda,
                                      RegionMode mode);

// Cubes P with l(P) <= l(Q) and P inside lambda Q.
std::vector<int> cubes_in_region(const Lattice& lat, const PointMeasure& mu, int q, double lambda,
                                 RegionMode mode);

struct CubeEnergy {
  double e_lambda = 0.0;
  double e_inf = 0.0;
  bool db_flag = false;
  double e_inf_9q = 0.0;
  double mass_9q = 0.0;
  int truncation_level = 0;
};

CubeEnergy energies(const Lattice& lat, const PointMeasure& mu, int q, double lambda, double M0,
                    RegionMode mode = RegionMode::kUnionOfCubes);

// Martingale difference on Q; cubes at the finest level use single atoms as
// children, which makes the expansion exact on the finite lattice.
VectorField delta_q(const Lattice& lat, int q, const VectorField& f, const PointMeasure& mu);

// Sum of w |f - m_Q f|^2 over the atoms of Q.
double centered_norm2(const Cube& q, const VectorField& f, const PointMeasure& mu);

// Boundary layers of width lambda l(Q): atoms of Q within that distance of
// E \ Q, and atoms of 3.5 B_Q \ Q within that distance of Q. Measured only;
// the lattice does not enforce a small-boundary bound.
struct BoundaryMass {
  double inner = 0.0;
  double outer = 0.0;
  double ball = 0.0;  // mu(3.5 B_Q)
};
BoundaryMass boundary_mass(const Lattice& lat, const PointMeasure& mu, int q, double lambda);

}  // namespace gmt
