// gmt: command-line front end. Settings come from --config (JSON) with
// command-line flags taking precedence; results land in --out as JSON/CSV.
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gmt/beta.hpp"
#include "gmt/corona.hpp"
#include "gmt/density.hpp"
#include "gmt/error.hpp"
#include "gmt/experiments.hpp"
#include "gmt/generators.hpp"
#include "gmt/lattice.hpp"
#include "gmt/parallel.hpp"
#include "gmt/potentials.hpp"
#include "gmt/report.hpp"
#include "gmt/riesz.hpp"
#include "gmt/variational.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Flags {
  std::string config;
  std::string out = ".";
  int threads = 1;
  bool timings = false;
  // Overrides, applied only when given on the command line.
  std::map<std::string, std::string> strings;
  std::map<std::string, double> numbers;
  std::map<std::string, std::vector<double>> vectors;
};

json settings;  // config file merged with command-line overrides

double num(const std::string& key, double fallback) {
  return settings.contains(key) ? settings.at(key).get<double>() : fallback;
}

std::string str(const std::string& key, const std::string& fallback) {
  return settings.contains(key) ? settings.at(key).get<std::string>() : fallback;
}

gmt::Point point_from(const json& j, int dim) {
  gmt::Point p{};
  const auto v = j.get<std::vector<double>>();
  if (static_cast<int>(v.size()) != dim) throw gmt::Error(gmt::ErrorKind::kInvalidArgument, "center has wrong dimension");
  for (int i = 0; i < dim; ++i) p[i] = v[i];
  return p;
}

gmt::Ball ball(const std::string& prefix, int dim, const gmt::Ball& fallback) {
  gmt::Ball b = fallback;
  if (settings.contains(prefix + "_center")) b.center = point_from(settings.at(prefix + "_center"), dim);
  b.radius = num(prefix + "_radius", b.radius);
  return b;
}

gmt::GeneratorSpec generator_spec() {
  gmt::GeneratorSpec s;
  s.kind = str("kind", s.kind);
  s.count = static_cast<std::size_t>(num("count", static_cast<double>(s.count)));
  s.generation = static_cast<int>(num("generation", s.generation));
  s.amplitude = num("amplitude", s.amplitude);
  s.frequency = num("frequency", s.frequency);
  s.radius = num("circle_radius", s.radius);
  s.half_length = num("half_length", s.half_length);
  s.mass = num("mass", s.mass);
  s.dim = static_cast<int>(num("dim", s.dim));
  s.seed = static_cast<std::uint64_t>(num("seed", static_cast<double>(s.seed)));
  if (settings.contains("segment_center")) s.center = point_from(settings.at("segment_center"), 2);
  if (settings.contains("side_ratios")) s.side_ratios = settings.at("side_ratios").get<std::vector<double>>();
  return s;
}

gmt::PointMeasure measure() {
  if (settings.contains("measure")) {
    return gmt::load_measure(str("measure", ""), static_cast<int>(num("dim", 2)), num("resolution_floor", 1e-3));
  }
  auto mu = gmt::generate(generator_spec());
  if (settings.contains("resolution_floor")) mu = mu.with_resolution_floor(num("resolution_floor", mu.resolution_floor()));
  return mu;
}

gmt::Ball default_ball(const gmt::PointMeasure& mu) {
  gmt::Ball b = mu.bounding_ball();
  if (!(b.radius > 0.0)) b.radius = 1.0;
  return b;
}

std::string out_path(const Flags& f, const std::string& name) { return (fs::path(f.out) / name).string(); }

void write_json(const Flags& f, const std::string& name, const json& j) {
  gmt::write_text(out_path(f, name), j.dump(2) + "\n");
}

json vec(const gmt::Point& p, int dim) { return std::vector<double>(p.begin(), p.begin() + dim); }

json lattice_params_json(const gmt::LatticeParams& lp) {
  return {{"A0", lp.A0}, {"C0", lp.C0}, {"max_depth", lp.max_depth}};
}

gmt::LatticeParams lattice_params() {
  gmt::LatticeParams lp;
  lp.A0 = num("A0", lp.A0);
  lp.C0 = num("C0", lp.C0);
  lp.max_depth = static_cast<int>(num("max_depth", lp.max_depth));
  return lp;
}

void cmd_generate(const Flags& f) {
  const auto mu = measure();
  gmt::save_measure_json(mu, out_path(f, "measure.json"));
}

void cmd_stats(const Flags& f) {
  const auto mu = measure();
  const auto b = ball("ball", mu.dim(), default_ball(mu));
  const double c = num("c", 4.0);
  const auto s = gmt::density_stats(mu, b, c);
  const double h = mu.resolution_floor();
  json j = {{"ball", {{"center", vec(b.center, mu.dim())}, {"radius", b.radius}}},
            {"constant", c},
            {"theta", s.theta},
            {"p_mu", s.p_mu},
            {"is_p_doubling", s.is_p_doubling},
            {"mass", gmt::mass_in_ball(mu, b)},
            {"m_n_center", b.radius >= h ? gmt::m_n(mu, b.center, h, b.radius) : 0.0},
            {"theta_star_center", gmt::theta_star_upper(mu, b.center)},
            {"atoms", mu.size()},
            {"total_mass", mu.total_mass()},
            {"resolution_floor", h}};
  write_json(f, "stats.json", j);
}

void cmd_riesz(const Flags& f) {
  const auto mu = measure();
  const auto b = ball("ball", mu.dim(), default_ball(mu));
  gmt::FieldOptions fo;
  fo.use_treecode = num("treecode", 0.0) != 0.0;
  fo.opening_angle = num("opening_angle", fo.opening_angle);
  const auto field = gmt::riesz_field(mu, fo);
  std::string csv;
  for (int c = 0; c < mu.dim(); ++c) csv += "x" + std::to_string(c) + ",";
  for (int c = 0; c < mu.dim(); ++c) csv += "R" + std::to_string(c) + (c + 1 < mu.dim() ? "," : "\n");
  for (std::size_t i = 0; i < mu.size(); ++i) {
    std::ostringstream row;
    row.precision(17);
    for (int c = 0; c < mu.dim(); ++c) row << mu.point(i)[c] << ",";
    for (int c = 0; c < mu.dim(); ++c) row << field.at(i, c) << (c + 1 < mu.dim() ? "," : "\n");
    csv += row.str();
  }
  gmt::write_text(out_path(f, "riesz.csv"), csv);
  json j = {{"ball", {{"center", vec(b.center, mu.dim())}, {"radius", b.radius}}},
            {"use_treecode", fo.use_treecode},
            {"opening_angle", fo.opening_angle},
            {"oscillation", gmt::oscillation_l2(mu, b, field)},
            {"riesz_star_center", gmt::riesz_star(mu, b.center, mu.resolution_floor())},
            {"riesz_center", vec(gmt::riesz_at(mu, b.center, {}), mu.dim())}};
  write_json(f, "riesz.json", j);
}

void cmd_beta(const Flags& f) {
  const auto mu = measure();
  const auto b = ball("ball", mu.dim(), default_ball(mu));
  json j = {{"ball", {{"center", vec(b.center, mu.dim())}, {"radius", b.radius}}}};
  for (double p : {1.0, 2.0}) {
    const auto fit = gmt::beta_p(mu, b, p);
    j[p == 1.0 ? "beta1" : "beta2"] = {{"beta", fit.beta},
                                       {"base", vec(fit.base, mu.dim())},
                                       {"normal", vec(fit.normal, mu.dim())},
                                       {"empty", fit.empty},
                                       {"converged", fit.converged}};
  }
  write_json(f, "beta.json", j);
}

void cmd_jw(const Flags& f) {
  const auto mu = measure();
  const auto b = ball("ball", mu.dim(), default_ball(mu));
  gmt::JonesWolffConfig cfg;
  cfg.step_log2 = num("step_log2", cfg.step_log2);
  cfg.exact = num("exact", 0.0) != 0.0;
  const double r_min = num("r_min", mu.resolution_floor());
  const double r_max = num("r_max", 2.0 * b.radius);
  json j = {{"ball", {{"center", vec(b.center, mu.dim())}, {"radius", b.radius}}},
            {"r_min", r_min},
            {"r_max", r_max},
            {"step_log2", cfg.step_log2},
            {"exact", cfg.exact},
            {"jones_wolff_center", gmt::jones_wolff(mu, b.center, r_min, r_max, cfg)},
            {"square_function_lhs", gmt::square_function_lhs(mu, b, cfg)}};
  write_json(f, "jw.json", j);
}

void cmd_lattice(const Flags& f) {
  const auto mu = measure();
  const auto lp = lattice_params();
  const auto lat = gmt::build_lattice(mu, lp);
  // Boundary layers at width l(Q) / A0, with the constant c of c lambda^gamma.
  const double width = 1.0 / lp.A0;
  const double gamma = 0.9;
  json levels = json::array();
  for (int k = 0; k <= lat.depth(); ++k) {
    int db = 0, pd = 0;
    double ratio = 0.0;
    for (int q : lat.levels[k]) {
      db += lat.cube(q).db;
      pd += lat.cube(q).p_doubling;
      const auto bm = gmt::boundary_mass(lat, mu, q, width);
      ratio = std::max(ratio, (bm.inner + bm.outer) / bm.ball);
    }
    const auto& c0 = lat.cube(lat.levels[k][0]);
    levels.push_back({{"level", k},
                      {"cubes", lat.levels[k].size()},
                      {"doubling", db},
                      {"p_doubling", pd},
                      {"radius", c0.radius},
                      {"side", c0.side},
                      {"boundary_ratio_max", ratio},
                      {"boundary_constant_max", ratio / std::pow(width, gamma)}});
  }
  json j = {{"params", lattice_params_json(lp)},
            {"boundary_width", width},
            {"boundary_gamma", gamma},
            {"root_scale", lat.root_scale},
            {"depth", lat.depth()},
            {"resolution_reached", lat.resolution_reached},
            {"levels", levels}};
  write_json(f, "lattice.json", j);
}

void cmd_corona(const Flags& f) {
  const auto mu = measure();
  const auto b0 = ball("ball", mu.dim(), default_ball(mu));
  const auto lp = lattice_params();
  const auto lat = gmt::build_lattice(mu, lp);
  gmt::CoronaParams cp;
  cp.theta0 = num("theta0", cp.theta0);
  cp.kappa0 = num("kappa0", cp.kappa0);
  cp.eps0 = num("eps0", cp.eps0);
  const auto fam = gmt::build_stopping(mu, lat, b0, cp);
  const auto samples = static_cast<std::size_t>(num("samples", 32));
  const int k = static_cast<int>(num("level", std::min(2, lat.depth())));
  const auto sigma = gmt::build_sigma(mu, lat, b0, k, samples, false);
  const auto sigma_t = gmt::build_sigma(mu, lat, b0, k, samples, true);
  const auto mu0 = gmt::build_mu0(mu, lat, fam);
  const auto eta = gmt::build_eta(mu, lat, fam, samples);
  gmt::save_measure_json(sigma.measure, out_path(f, "sigma.json"));
  gmt::save_measure_json(sigma_t.measure, out_path(f, "sigma_tilde.json"));
  if (!mu0.measure.empty()) gmt::save_measure_json(mu0.measure, out_path(f, "mu0.json"));
  if (!eta.measure.empty()) gmt::save_measure_json(eta.measure, out_path(f, "eta.json"));
  json stop = json::array();
  for (const auto& s : fam.stop) stop.push_back(s);
  json j = {{"params", {{"theta0", cp.theta0}, {"kappa0", cp.kappa0}, {"eps0", cp.eps0}}},
            {"lattice", lattice_params_json(lp)},
            {"ball", {{"center", vec(b0.center, mu.dim())}, {"radius", b0.radius}}},
            {"fmax", fam.fmax},
            {"ld", fam.ld},
            {"stop", stop},
            {"stop0", fam.stop0},
            {"mu_r0", fam.mu_r0},
            {"ld_mass", fam.ld_mass},
            {"stop_mass", fam.stop_mass},
            {"stop0_mass", fam.stop0_mass},
            {"stop0_threshold_met", fam.stop0_threshold_met},
            {"sigma_level", k},
            {"samples", samples},
            {"mass_error_sigma", gmt::surrogate_mass_error(sigma)},
            {"mass_error_sigma_tilde", gmt::surrogate_mass_error(sigma_t)},
            {"mass_error_eta", gmt::surrogate_mass_error(eta)}};
  write_json(f, "corona.json", j);
}

void cmd_variational(const Flags& f) {
  const auto mu = measure();
  const auto b0 = ball("ball", mu.dim(), default_ball(mu));
  const auto b1 = ball("b1", mu.dim(), b0.scaled(0.125));
  gmt::VariationalOptions opt;
  opt.p = num("p", opt.p);
  opt.lambda = num("lambda", opt.lambda);
  opt.N = static_cast<int>(num("N", opt.N));
  opt.max_iterations = static_cast<int>(num("max_iterations", opt.max_iterations));
  opt.b0 = b0;
  opt.has_b0 = true;
  // R0: atoms of 1.5 B0.
  const auto r0 = mu.query(b0.scaled(1.5));
  const auto st = gmt::variational_minimize(mu, r0, b1, opt);
  std::string csv = "iterate,F\n";
  for (std::size_t i = 0; i < st.history.size(); ++i) {
    std::ostringstream row;
    row.precision(17);
    row << i << "," << st.history[i] << "\n";
    csv += row.str();
  }
  gmt::write_text(out_path(f, "variational_iterates.csv"), csv);
  json j = {{"p", st.p},
            {"lambda", st.lambda},
            {"N", st.N},
            {"b1", {{"center", vec(b1.center, mu.dim())}, {"radius", b1.radius}}},
            {"c_r0", vec(st.c_r0, mu.dim())},
            {"sigma_p", st.sigma_p},
            {"F", st.value},
            {"F_at_one", st.value_at_one},
            {"nu_b1", st.nu_b1},
            {"mu_b1", st.mu_b1},
            {"a", st.a},
            {"iterations", st.iterations},
            {"line_search_failed", st.line_search_failed},
            {"stationarity_max", st.stationarity_max},
            {"stationarity_bound", st.stationarity_bound}};
  write_json(f, "variational.json", j);
}

void cmd_capacity(const Flags& f) {
  const auto mu = measure();
  const double smear = num("smear", mu.resolution_floor());
  const auto cb = gmt::capacity_lower_bound(mu, smear, num("c_n", 0.0));
  json j = {{"kernel", cb.energy.kernel},
            {"c_n", cb.energy.c_n},
            {"smear", smear},
            {"energy", cb.energy.energy},
            {"cross", cb.energy.cross},
            {"self", cb.energy.self},
            {"capacity_lower_bound", cb.value},
            {"inverse_energy", cb.inverse_energy},
            {"scale_warning", cb.scale_warning}};
  write_json(f, "capacity.json", j);
}

void cmd_dimscan(const Flags& f) {
  const auto mu = measure();
  const auto b = ball("ball", mu.dim(), default_ball(mu));
  gmt::DimScanParams dp;
  dp.m = static_cast<int>(num("m", dp.m));
  dp.alpha = num("alpha", dp.alpha);
  dp.max_steps = static_cast<int>(num("max_steps", dp.max_steps));
  const auto starts = static_cast<std::size_t>(num("starts", 8));
  const auto ids = mu.query(b);
  std::vector<gmt::Point> pts;
  for (std::size_t k = 0; k < starts && !ids.empty(); ++k) pts.push_back(mu.point(ids[k * ids.size() / starts]));
  const auto res = gmt::dimension_scan(mu, b, pts, dp);
  json trajs = json::array();
  for (const auto& t : res.trajectories) {
    json steps = json::array();
    for (const auto& s : t.steps) {
      steps.push_back({{"radius", s.radius},
                       {"p_mu", s.p_mu},
                       {"mass", s.mass},
                       {"option", s.option},
                       {"ratio", s.ratio},
                       {"lemma_check", s.lemma_check}});
    }
    trajs.push_back({{"start", vec(t.start, mu.dim())},
                     {"stop_reason", t.stop_reason},
                     {"measured_exponent", t.measured_exponent},
                     {"sandwich_ok", t.sandwich_ok},
                     {"max_ratio", t.max_ratio},
                     {"steps", steps}});
  }
  json j = {{"m", res.m},
            {"alpha", res.alpha},
            {"delta1", res.delta1},
            {"beta", res.beta},
            {"scan_exponent", res.scan_exponent},
            {"certified", res.certified},
            {"trajectories", trajs}};
  write_json(f, "dimscan.json", j);
}

void cmd_experiment(const Flags& f, const std::string& name) {
  gmt::ExperimentReport rep;
  gmt::FieldOptions fo;
  fo.use_treecode = num("treecode", 0.0) != 0.0;
  fo.opening_angle = num("opening_angle", fo.opening_angle);
  if (name == "thm_local") {
    const auto mu = measure();
    rep = gmt::experiment_thm_local(mu, ball("ball", mu.dim(), default_ball(mu)), fo);
  } else if (name == "thm_lower") {
    const auto mu = measure();
    const auto b0 = ball("ball", mu.dim(), default_ball(mu));
    gmt::LowerParams lp;
    lp.alpha = num("alpha", lp.alpha);
    lp.delta1 = num("delta1", lp.delta1);
    lp.delta0 = num("delta0", lp.delta0);
    lp.c0 = num("c0", lp.c0);
    lp.c1 = num("c1", lp.c1);
    rep = gmt::experiment_thm_lower(mu, b0, ball("b1", mu.dim(), b0.scaled(lp.delta1)), lp, fo);
  } else if (name == "approximation") {
    const auto mu = measure();
    gmt::ApproximationParams ap;
    ap.lattice = lattice_params();
    ap.samples = static_cast<std::size_t>(num("samples", static_cast<double>(ap.samples)));
    if (settings.contains("levels")) {
      ap.levels = settings.at("levels").get<std::vector<int>>();
    } else {
      ap.levels = {1, 2, 3};
    }
    rep = gmt::experiment_approximation(mu, ball("ball", mu.dim(), default_ball(mu)), ap);
  } else if (name == "cantor_contrast") {
    gmt::ContrastParams cp;
    if (settings.contains("generations")) cp.generations = settings.at("generations").get<std::vector<int>>();
    cp.b0 = ball("ball", 2, cp.b0);
    cp.comparator_half_length = num("half_length", cp.comparator_half_length);
    cp.comparator_atoms_per_unit =
        static_cast<std::size_t>(num("atoms_per_unit", static_cast<double>(cp.comparator_atoms_per_unit)));
    cp.graph_amplitude = num("amplitude", cp.graph_amplitude);
    cp.graph_frequency = num("frequency", cp.graph_frequency);
    cp.field.use_treecode = num("treecode", 1.0) != 0.0;
    cp.field.opening_angle = fo.opening_angle;
    rep = gmt::experiment_cantor_contrast(cp);
  } else {
    throw gmt::Error(gmt::ErrorKind::kInvalidArgument, "unknown experiment: " + name);
  }
  rep.constant("threads_independent", true);
  gmt::emit_report(rep, out_path(f, name + ".json"), gmt::ReportFormat::kJson, f.timings);
  gmt::emit_report(rep, out_path(f, name + ".csv"), gmt::ReportFormat::kCsv);
  for (const auto& [t, _] : rep.tables.items()) {
    gmt::write_text(out_path(f, name + "_" + t + ".csv"), gmt::table_csv(rep, t));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measured quantities of point-cloud measures in R^{n+1}"};
  app.require_subcommand(1);
  Flags flags;
  app.add_option("--config", flags.config, "JSON settings file");
  app.add_option("--out", flags.out, "output directory");
  app.add_option("--threads", flags.threads, "worker threads")->check(CLI::Range(1, 256));
  app.add_flag("--timings", flags.timings, "include wall-clock timings in experiment JSON");

  // Settings that may also come from the config file.
  const std::vector<std::string> string_keys{"kind", "measure"};
  const std::vector<std::string> number_keys{
      "count", "generation", "amplitude", "frequency", "circle_radius", "half_length", "mass", "dim", "seed", "resolution_floor",
      "ball_radius", "b1_radius", "c", "treecode", "opening_angle", "step_log2", "exact", "r_min", "r_max", "A0",
      "C0", "max_depth", "theta0", "kappa0", "eps0", "samples", "level", "p", "lambda", "N", "max_iterations",
      "smear", "c_n", "m", "alpha", "max_steps", "starts", "delta1", "delta0", "c0", "c1", "atoms_per_unit"};
  const std::vector<std::string> vector_keys{"ball_center", "b1_center", "segment_center", "side_ratios", "levels",
                                             "generations"};
  for (const auto& k : string_keys) app.add_option("--" + k, flags.strings[k]);
  for (const auto& k : number_keys) app.add_option("--" + k, flags.numbers[k]);
  for (const auto& k : vector_keys) app.add_option("--" + k, flags.vectors[k])->delimiter(',');

  std::string experiment_name;
  app.fallthrough();
  const std::vector<std::string> simple{"generate", "stats", "riesz", "beta", "jw", "lattice",
                                        "corona", "variational", "capacity", "dimscan"};
  for (const auto& s : simple) app.add_subcommand(s, s + " subcommand");
  auto* exp = app.add_subcommand("experiment", "run a named experiment");
  exp->add_option("name", experiment_name, "thm_local | thm_lower | approximation | cantor_contrast")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    settings = json::object();
    if (!flags.config.empty()) {
      std::ifstream in(flags.config);
      if (!in) throw gmt::Error(gmt::ErrorKind::kIo, "cannot open " + flags.config);
      settings = json::parse(in);
    }
    for (const auto& k : string_keys) {
      if (app.count("--" + k)) settings[k] = flags.strings[k];
    }
    for (const auto& k : number_keys) {
      if (app.count("--" + k)) settings[k] = flags.numbers[k];
    }
    for (const auto& k : vector_keys) {
      if (app.count("--" + k)) {
        if (k == "levels" || k == "generations") {
          std::vector<int> iv;
          for (double v : flags.vectors[k]) iv.push_back(static_cast<int>(v));
          settings[k] = iv;
        } else {
          settings[k] = flags.vectors[k];
        }
      }
    }
    gmt::set_thread_count(flags.threads);
    fs::create_directories(flags.out);

    auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "generate") cmd_generate(flags);
    else if (name == "stats") cmd_stats(flags);
    else if (name == "riesz") cmd_riesz(flags);
    else if (name == "beta") cmd_beta(flags);
    else if (name == "jw") cmd_jw(flags);
    else if (name == "lattice") cmd_lattice(flags);
    else if (name == "corona") cmd_corona(flags);
    else if (name == "variational") cmd_variational(flags);
    else if (name == "capacity") cmd_capacity(flags);
    else if (name == "dimscan") cmd_dimscan(flags);
    else if (name == "experiment") cmd_experiment(flags, experiment_name);
  } catch (const gmt::Error& e) {
    std::cerr << "gmt: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "gmt: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
