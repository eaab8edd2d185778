#include "gmt/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "gmt/beta.hpp"
#include "gmt/density.hpp"
#include "gmt/error.hpp"
#include "gmt/generators.hpp"
#include "gmt/parallel.hpp"
#include "gmt/riesz.hpp"

namespace gmt {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

nlohmann::json ball_json(const Ball& b, int dim) {
  std::vector<double> c(b.center.begin(), b.center.begin() + dim);
  return {{"center", c}, {"radius", b.radius}};
}

// pv R mu at the atoms of `ids`; other rows stay zero.
VectorField field_on(const PointMeasure& mu, const std::vector<std::size_t>& ids, const FieldOptions& opt) {
  VectorField f(mu.size(), mu.dim());
  if (opt.use_treecode) {
    std::vector<Point> targets;
    targets.reserve(ids.size());
    for (std::size_t i : ids) targets.push_back(mu.point(i));
    const auto vals = treecode_riesz(mu, targets, KernelConfig{}, opt.opening_angle);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      for (int c = 0; c < mu.dim(); ++c) f.at(ids[k], c) = vals[k][c];
    }
  } else {
    parallel_for(
        ids.size(),
        [&](std::size_t k) {
          const Point v = riesz_pv(mu, ids[k]);
          for (int c = 0; c < mu.dim(); ++c) f.at(ids[k], c) = v[c];
        },
        16);
  }
  return f;
}

double oscillation_on(const PointMeasure& mu, const Ball& b, const FieldOptions& opt) {
  const auto ids = mu.query(b);
  return oscillation_l2(mu, ids, field_on(mu, ids, opt));
}

}  // namespace

VectorField riesz_field(const PointMeasure& mu, const FieldOptions& opt) {
  std::vector<std::size_t> all(mu.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return field_on(mu, all, opt);
}

double theta_star_integral(const PointMeasure& mu, const Ball& b) {
  const auto ids = mu.query(b);
  return blocked_sum(ids.size(), [&](std::size_t k) {
    const double t = theta_star_upper(mu, mu.point(ids[k]));
    return mu.weight(ids[k]) * t * t;
  });
}

ExperimentReport experiment_thm_local(const PointMeasure& mu, const Ball& b0, const FieldOptions& fopt) {
  ExperimentReport r;
  r.id = "thm_local";
  const int n = mu.n();
  r.constant("b0", ball_json(b0, mu.dim()));
  r.constant("h", mu.resolution_floor());
  r.constant("n", n);
  r.constant("theta_star_window", kThetaStarWindow);
  r.constant("use_treecode", fopt.use_treecode);
  r.constant("opening_angle", fopt.opening_angle);

  auto t0 = Clock::now();
  const auto ids = mu.query(b0);
  if (ids.empty()) throw Error(ErrorKind::kEmptyDomain, "B0 holds no atoms");
  const auto mx = restricted_maximal(mu, b0);
  double lhs_max = 0.0;
  for (std::size_t k = 0; k < ids.size(); ++k) lhs_max += mu.weight(ids[k]) * mx[k] * mx[k];
  r.timings["maximal"] = seconds_since(t0);

  t0 = Clock::now();
  const double lhs_sq = square_function_lhs(mu, b0);
  r.timings["square_function"] = seconds_since(t0);

  t0 = Clock::now();
  const Ball b2 = b0.scaled(2.0);
  const double osc = oscillation_on(mu, b2, fopt);
  r.timings["oscillation"] = seconds_since(t0);

  const double p = p_mu(mu, b0);
  const double m2 = mass_in_ball(mu, b2);
  const double ts = theta_star_integral(mu, b2);
  const double lhs = lhs_max + lhs_sq;
  const double rhs = osc + p * p * m2 + ts;
  r.scalar("lhs_maximal", lhs_max, "int_{B0} M_n(mu|B0)^2 dmu");
  r.scalar("lhs_square_function", lhs_sq, "int_{B0} J_mu(x; h, 2 rad B0)^2 dmu");
  r.scalar("lhs", lhs, "lhs_maximal + lhs_square_function");
  r.scalar("rhs_oscillation", osc, "int_{2B0} |R mu - m_{2B0} R mu|^2 dmu");
  r.scalar("rhs_poisson", p * p * m2, "P_mu(B0)^2 mu(2B0)");
  r.scalar("rhs_theta_star", ts, "int_{2B0} theta*(x)^2 dmu");
  r.scalar("rhs", rhs, "rhs_oscillation + rhs_poisson + rhs_theta_star");
  r.scalar("ratio", lhs / rhs, "lhs / rhs");
  r.scalar("p_mu_b0", p, "P_mu(B0)");
  r.scalar("mass_2b0", m2, "mu(2B0)");
  return r;
}

ExperimentReport experiment_thm_lower(const PointMeasure& mu, const Ball& b0, const Ball& b1, const LowerParams& p,
                                      const FieldOptions& fopt) {
  ExperimentReport r;
  r.id = "thm_lower";
  const int n = mu.n();
  const double delta0 = p.delta0 > 0.0 ? p.delta0 : std::pow(p.delta1, 2 * n + 2);
  r.constant("b0", ball_json(b0, mu.dim()));
  r.constant("b1", ball_json(b1, mu.dim()));
  r.constant("alpha", p.alpha);
  r.constant("delta0", delta0);
  r.constant("delta1", p.delta1);
  r.constant("c0", p.c0);
  r.constant("c1", p.c1);
  r.constant("h", mu.resolution_floor());
  r.constant("theta_star_window", kThetaStarWindow);
  r.constant("use_treecode", fopt.use_treecode);
  r.constant("opening_angle", fopt.opening_angle);

  const double th0 = theta(mu, b0);
  const double th1 = theta(mu, b1);
  const double pm0 = p_mu(mu, b0);
  std::vector<std::string> failed;
  if (!(pm0 <= p.c0 * th0)) failed.emplace_back("b0-p-doubling");
  if (!(th1 >= p.alpha * th0)) failed.emplace_back("b1-density");
  if (!(b1.radius >= delta0 * b0.radius && b1.radius <= p.delta1 * b0.radius)) failed.emplace_back("radius-window");
  if (!b0.contains(b1.center)) failed.emplace_back("b1-center");
  r.constant("hypotheses_failed", failed);

  auto t0 = Clock::now();
  const Ball b2 = b0.scaled(2.0);
  const double osc = oscillation_on(mu, b2, fopt);
  r.timings["oscillation"] = seconds_since(t0);
  const double ts = theta_star_integral(mu, b2);
  const double denom = th0 * th0 * mass_in_ball(mu, b0);
  r.scalar("theta_b0", th0, "mu(B0) / rad(B0)^n");
  r.scalar("theta_b1", th1, "mu(B1) / rad(B1)^n");
  r.scalar("p_mu_b0", pm0, "P_mu(B0)");
  r.scalar("oscillation", osc, "int_{2B0} |R mu - m_{2B0} R mu|^2 dmu");
  r.scalar("theta_star", ts, "int_{2B0} theta*(x)^2 dmu");
  r.scalar("denominator", denom, "Theta_mu(B0)^2 mu(B0)");
  r.scalar("ratio_oscillation", osc / denom, "oscillation / denominator");
  r.scalar("ratio_theta_star", ts / denom, "theta_star / denominator");
  r.scalar("ratio", (osc + ts) / denom, "(oscillation + theta_star) / denominator");
  r.scalar("hypotheses_hold", failed.empty() ? 1.0 : 0.0, "all hypothesis checks pass");
  r.scalar("clears_c1", (osc + ts) / denom >= p.c1 ? 1.0 : 0.0, "ratio >= c1");
  return r;
}

ExperimentReport experiment_approximation(const PointMeasure& mu, const Ball& b0, const ApproximationParams& p) {
  ExperimentReport r;
  r.id = "approximation";
  r.constant("b0", ball_json(b0, mu.dim()));
  r.constant("levels", p.levels);
  r.constant("samples", p.samples);
  r.constant("A0", p.lattice.A0);
  r.constant("C0", p.lattice.C0);
  r.constant("max_depth", p.lattice.max_depth);
  r.constant("h", mu.resolution_floor());
  r.constant("theta_star_window", kThetaStarWindow);

  const Lattice lat = build_lattice(mu, p.lattice);
  const Ball b2 = b0.scaled(2.0);
  const double osc_mu = oscillation_on(mu, b2, {});
  const double ts = theta_star_integral(mu, b2);
  r.scalar("oscillation_mu", osc_mu, "int_{2B0} |R mu - m R mu|^2 dmu");
  r.scalar("theta_star", ts, "int_{2B0} theta*(x)^2 dmu");
  r.scalar("lattice_depth", lat.depth(), "number of lattice levels - 1");

  r.table("levels", {"k", "osc_sigma", "osc_sigma_tilde", "tilde_over_sigma", "implied_c", "mass_error"});
  std::vector<double> osc;
  double worst_mass = 0.0;
  for (int k : p.levels) {
    if (k < 0 || k > lat.depth()) throw Error(ErrorKind::kInvalidArgument, "level beyond the lattice depth");
    const auto s = build_sigma(mu, lat, b0, k, p.samples, false);
    const auto st = build_sigma(mu, lat, b0, k, p.samples, true);
    const double o = oscillation_on(s.measure, b2, {});
    const double ot = oscillation_on(st.measure, b2, {});
    const double merr = std::max(surrogate_mass_error(s), surrogate_mass_error(st));
    worst_mass = std::max(worst_mass, merr);
    osc.push_back(o);
    r.row("levels", {static_cast<double>(k), o, ot, ot / o, (o - 2.0 * osc_mu) / ts, merr});
  }
  r.scalar("mass_error_max", worst_mass, "max relative per-cube mass deviation");
  // C(k0) = max(0, max_{k0 <= k <= k0+3} osc_k - 2 osc_mu) / theta_star over full windows.
  r.table("windows", {"k0", "implied_c"});
  for (std::size_t i = 0; i + 3 < osc.size(); ++i) {
    const double top = *std::max_element(osc.begin() + static_cast<long>(i), osc.begin() + static_cast<long>(i) + 4);
    r.row("windows", {static_cast<double>(p.levels[i]), std::max(0.0, top - 2.0 * osc_mu) / ts});
  }
  return r;
}

ExperimentReport experiment_cantor_contrast(const ContrastParams& p) {
  ExperimentReport r;
  r.id = "cantor_contrast";
  r.constant("generations", p.generations);
  r.constant("b0", ball_json(p.b0, 2));
  r.constant("comparator_half_length", p.comparator_half_length);
  r.constant("comparator_atoms_per_unit", p.comparator_atoms_per_unit);
  r.constant("graph_amplitude", p.graph_amplitude);
  r.constant("graph_frequency", p.graph_frequency);
  r.constant("use_treecode", p.field.use_treecode);
  r.constant("opening_angle", p.field.opening_angle);

  const Ball b2 = p.b0.scaled(2.0);
  r.table("cantor", {"generation", "square_function", "oscillation", "mass_b0"});
  std::vector<double> sq, osc;
  double target_mass = 0.0;
  for (int g : p.generations) {
    GeneratorSpec spec;
    spec.kind = "corner_cantor";
    spec.generation = g;
    const PointMeasure mu = generate(spec);
    auto t0 = Clock::now();
    sq.push_back(square_function_lhs(mu, p.b0));
    osc.push_back(oscillation_on(mu, b2, p.field));
    r.timings["cantor_g" + std::to_string(g)] = seconds_since(t0);
    target_mass = mass_in_ball(mu, p.b0);
    r.row("cantor", {static_cast<double>(g), sq.back(), osc.back(), target_mass});
  }
  bool increasing = true;
  double ratio_lo = INFINITY, ratio_hi = 0.0;
  for (std::size_t i = 1; i < sq.size(); ++i) {
    increasing = increasing && sq[i] > sq[i - 1] && osc[i] > osc[i - 1];
    if (i >= 2) {
      for (const auto* v : {&sq, &osc}) {
        const double q = ((*v)[i] - (*v)[i - 1]) / ((*v)[i - 1] - (*v)[i - 2]);
        ratio_lo = std::min(ratio_lo, q);
        ratio_hi = std::max(ratio_hi, q);
      }
    }
  }
  r.scalar("strictly_increasing", increasing ? 1.0 : 0.0, "both statistics increase in g");
  r.scalar("difference_ratio_min", ratio_lo, "min (v_g - v_{g-1}) / (v_{g-1} - v_{g-2})");
  r.scalar("difference_ratio_max", ratio_hi, "max (v_g - v_{g-1}) / (v_{g-1} - v_{g-2})");

  const double sq_min = *std::min_element(sq.begin(), sq.end());
  const double osc_min = *std::min_element(osc.begin(), osc.end());
  for (const char* kind : {"segment", "lipschitz_graph"}) {
    GeneratorSpec spec;
    spec.kind = kind;
    spec.center = p.b0.center;
    spec.half_length = p.comparator_half_length;
    spec.count = static_cast<std::size_t>(2.0 * p.comparator_half_length) * p.comparator_atoms_per_unit;
    spec.mass = target_mass * p.comparator_half_length / p.b0.radius;
    spec.amplitude = p.graph_amplitude;
    spec.frequency = p.graph_frequency;
    const PointMeasure mu = generate(spec);
    auto t0 = Clock::now();
    const double s = square_function_lhs(mu, p.b0);
    const double o = oscillation_on(mu, b2, p.field);
    r.timings[kind] = seconds_since(t0);
    const std::string k = kind;
    r.scalar(k + "_mass_b0", mass_in_ball(mu, p.b0), "mu(B0)");
    r.scalar(k + "_square_function", s, "int_{B0} J^2 dmu");
    r.scalar(k + "_oscillation", o, "int_{2B0} |R mu - m R mu|^2 dmu");
    r.scalar(k + "_square_fraction", s / sq_min, "comparator square function / smallest Cantor value");
    r.scalar(k + "_oscillation_fraction", o / osc_min, "comparator oscillation / smallest Cantor value");
  }
  return r;
}

}  // namespace gmt
