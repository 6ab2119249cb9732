#ifndef SLMS_TOOLS_CONFIG_HPP
#define SLMS_TOOLS_CONFIG_HPP

// JSON run configuration: the problem datum at top level plus one optional
// section per command.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "slms/error.hpp"
#include "slms/problem.hpp"
#include "slms/sampling.hpp"
#include "slms/spectrum.hpp"

namespace slms::cli {

using json = nlohmann::ordered_json;

struct Tolerances {
  double ode_rel = 1e-12;
  double ode_abs = 1e-14;
  double quad_rel = 1e-12;
  double root_rel = 1e-14;
};

struct SpectrumSection {
  int count = 20;
  double negative_floor = -100.0;
  int points_per_spacing = 8;
  int grid_points = 512;
};

struct SweepSection {
  double epsilon_min = 0.0;
  double epsilon_max = 0.0;
  int steps = 11;
  int count = 10;
};

struct GreenSection {
  double lambda = 0.0;
  int points_per_piece = 16;
};

struct GSection {
  std::string preset = "one";
  double k = 1.0;
  std::array<PieceTable, 3> table{};
};

struct ReconstructSection {
  KernelKind kernel = KernelKind::Phi;
  std::optional<double> y0;  // defaults to theta
  OmegaSource omega_source = OmegaSource::Wronskian;
  GSection g;
  int N = 60;
  std::vector<double> eval_points;  // empty: gap midpoints
  int eval_from = 5;
  int eval_to = 15;
};

struct RunConfig {
  ProblemSpec problem;
  Tolerances tol;
  SpectrumSection spectrum;
  SweepSection sweep;
  GreenSection green;
  ReconstructSection reconstruct;
};

namespace detail {

[[noreturn]] inline void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

inline const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) config_error("missing key '" + where + key + "'");
  return j.at(key);
}

inline double num(const json& j, const char* key, const std::string& where) {
  const auto& v = need(j, key, where);
  if (!v.is_number()) config_error("'" + where + key + "' must be a number");
  return v.get<double>();
}

inline double num_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.is_object() && j.contains(key) ? num(j, key, where) : fallback;
}

inline int int_or(const json& j, const char* key, int fallback, const std::string& where) {
  if (!(j.is_object() && j.contains(key))) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer()) config_error("'" + where + key + "' must be an integer");
  return v.get<int>();
}

inline std::vector<double> num_list(const json& j, const std::string& where) {
  if (!j.is_array()) config_error("'" + where + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) config_error("'" + where + "' must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

inline std::array<PieceTable, 3> tables(const json& j, const std::string& where) {
  std::array<PieceTable, 3> out;
  for (Piece p : kPieces) {
    const std::string w = where + to_string(p) + ".";
    const auto& t = need(j, to_string(p), where);
    out[index(p)].x = num_list(need(t, "x", w), w + "x");
    const char* vkey = t.contains("q") ? "q" : "values";
    out[index(p)].q = num_list(need(t, vkey, w), w + vkey);
  }
  return out;
}

inline PotentialSpec parse_potential(const json& j) {
  if (j.is_null()) return ZeroPotential{};
  const auto& kind_v = need(j, "kind", "potential.");
  if (!kind_v.is_string()) config_error("'potential.kind' must be a string");
  const auto kind = kind_v.get<std::string>();
  const json params = j.contains("parameters") ? j.at("parameters") : json::object();
  if (kind == "zero") return ZeroPotential{};
  if (kind == "constant") {
    return PerPieceConstant{num(params, "left", "potential.parameters."), num(params, "mid", "potential.parameters."),
                            num(params, "right", "potential.parameters.")};
  }
  if (kind == "polynomial") {
    PerPiecePolynomial poly;
    for (Piece p : kPieces) {
      poly.coefficients[index(p)] =
          num_list(need(params, to_string(p), "potential.parameters."), std::string("potential.parameters.") + to_string(p));
    }
    return poly;
  }
  if (kind == "tabulated") return Tabulated{tables(params, "potential.parameters.")};
  config_error("unknown potential kind '" + kind + "' (zero, constant, polynomial, tabulated)");
}

inline json potential_to_json(const PotentialSpec& pot) {
  json out;
  if (std::holds_alternative<ZeroPotential>(pot)) {
    out["kind"] = "zero";
    out["parameters"] = json::object();
  } else if (const auto* c = std::get_if<PerPieceConstant>(&pot)) {
    out["kind"] = "constant";
    out["parameters"] = {{"left", c->left}, {"mid", c->mid}, {"right", c->right}};
  } else if (const auto* poly = std::get_if<PerPiecePolynomial>(&pot)) {
    out["kind"] = "polynomial";
    json p = json::object();
    for (Piece pc : kPieces) p[to_string(pc)] = poly->coefficients[index(pc)];
    out["parameters"] = p;
  } else if (const auto* tab = std::get_if<Tabulated>(&pot)) {
    out["kind"] = "tabulated";
    json p = json::object();
    for (Piece pc : kPieces) p[to_string(pc)] = {{"x", tab->pieces[index(pc)].x}, {"q", tab->pieces[index(pc)].q}};
    out["parameters"] = p;
  }
  return out;
}

}  // namespace detail

inline ProblemSpec parse_problem(const json& j) {
  using detail::need;
  using detail::num;
  ProblemSpec s;
  const auto& iv = need(j, "interval", "");
  s.a = num(iv, "a", "interval.");
  s.b = num(iv, "b", "interval.");
  s.epsilon = num(j, "epsilon", "");
  const auto& l = need(j, "left_bc", "");
  s.beta1 = num(l, "beta1", "left_bc.");
  s.beta2 = num(l, "beta2", "left_bc.");
  const auto& r = need(j, "right_bc", "");
  s.alpha1 = num(r, "alpha1", "right_bc.");
  s.alpha2 = num(r, "alpha2", "right_bc.");
  s.alpha1p = num(r, "alpha1p", "right_bc.");
  s.alpha2p = num(r, "alpha2p", "right_bc.");
  const auto& t = need(j, "transmission", "");
  s.delta = num(t, "delta", "transmission.");
  s.gamma = num(t, "gamma", "transmission.");
  s.potential = detail::parse_potential(j.contains("potential") ? j.at("potential") : json());
  return s;
}

inline json problem_to_json(const ProblemSpec& s) {
  json j;
  j["interval"] = {{"a", s.a}, {"b", s.b}};
  j["epsilon"] = s.epsilon;
  j["left_bc"] = {{"beta1", s.beta1}, {"beta2", s.beta2}};
  j["right_bc"] = {{"alpha1", s.alpha1}, {"alpha2", s.alpha2}, {"alpha1p", s.alpha1p}, {"alpha2p", s.alpha2p}};
  j["transmission"] = {{"delta", s.delta}, {"gamma", s.gamma}};
  j["potential"] = detail::potential_to_json(s.potential);
  return j;
}

inline KernelKind parse_kernel(const std::string& s) {
  if (s == "phi") return KernelKind::Phi;
  if (s == "green") return KernelKind::Green;
  detail::config_error("unknown kernel '" + s + "' (phi, green)");
}

inline OmegaSource parse_omega_source(const std::string& s) {
  if (s == "wronskian") return OmegaSource::Wronskian;
  if (s == "canonical_product") return OmegaSource::CanonicalProduct;
  detail::config_error("unknown omega source '" + s + "' (wronskian, canonical_product)");
}

inline std::string str_or(const json& j, const char* key, const std::string& fallback, const std::string& where) {
  if (!(j.is_object() && j.contains(key))) return fallback;
  if (!j.at(key).is_string()) detail::config_error("'" + where + key + "' must be a string");
  return j.at(key).get<std::string>();
}

inline RunConfig parse_config(const json& j) {
  using detail::int_or;
  using detail::num_or;
  if (!j.is_object()) detail::config_error("configuration must be a JSON object");
  RunConfig c;
  c.problem = parse_problem(j);

  const json none = json::object();
  const auto& tol = j.contains("tolerances") ? j.at("tolerances") : none;
  c.tol.ode_rel = num_or(tol, "ode_rel", c.tol.ode_rel, "tolerances.");
  c.tol.ode_abs = num_or(tol, "ode_abs", c.tol.ode_abs, "tolerances.");
  c.tol.quad_rel = num_or(tol, "quad_rel", c.tol.quad_rel, "tolerances.");
  c.tol.root_rel = num_or(tol, "root_rel", c.tol.root_rel, "tolerances.");
  for (double v : {c.tol.ode_rel, c.tol.ode_abs, c.tol.quad_rel, c.tol.root_rel}) {
    if (!(v > 0.0)) detail::config_error("tolerances must be > 0");
  }

  const auto& sp = j.contains("spectrum") ? j.at("spectrum") : none;
  c.spectrum.count = int_or(sp, "count", c.spectrum.count, "spectrum.");
  c.spectrum.negative_floor = num_or(sp, "negative_floor", c.spectrum.negative_floor, "spectrum.");
  c.spectrum.points_per_spacing = int_or(sp, "points_per_spacing", c.spectrum.points_per_spacing, "spectrum.");
  c.spectrum.grid_points = int_or(sp, "grid_points", c.spectrum.grid_points, "spectrum.");
  if (c.spectrum.count < 1) detail::config_error("spectrum.count must be >= 1");
  if (c.spectrum.points_per_spacing < 8) detail::config_error("spectrum.points_per_spacing must be >= 8");
  if (c.spectrum.grid_points < 2) detail::config_error("spectrum.grid_points must be >= 2");

  const auto& sw = j.contains("sweep") ? j.at("sweep") : none;
  const double half = (c.problem.b - c.problem.a) / 2.0;
  c.sweep.epsilon_min = num_or(sw, "epsilon_min", 0.1 * half, "sweep.");
  c.sweep.epsilon_max = num_or(sw, "epsilon_max", 0.9 * half, "sweep.");
  c.sweep.steps = int_or(sw, "steps", c.sweep.steps, "sweep.");
  c.sweep.count = int_or(sw, "count", c.sweep.count, "sweep.");
  if (c.sweep.steps < 1) detail::config_error("sweep.steps must be >= 1");
  if (c.sweep.count < 1) detail::config_error("sweep.count must be >= 1");
  if (!(c.sweep.epsilon_min > 0.0 && c.sweep.epsilon_max < half && c.sweep.epsilon_min <= c.sweep.epsilon_max)) {
    detail::config_error("sweep range must satisfy 0 < epsilon_min <= epsilon_max < (b-a)/2");
  }

  const auto& gr = j.contains("green") ? j.at("green") : none;
  c.green.lambda = num_or(gr, "lambda", c.green.lambda, "green.");
  c.green.points_per_piece = int_or(gr, "points_per_piece", c.green.points_per_piece, "green.");
  if (c.green.points_per_piece < 0) detail::config_error("green.points_per_piece must be >= 0");

  const auto& rc = j.contains("reconstruct") ? j.at("reconstruct") : none;
  c.reconstruct.kernel = parse_kernel(str_or(rc, "kernel", "phi", "reconstruct."));
  if (rc.contains("y0")) c.reconstruct.y0 = num_or(rc, "y0", 0.0, "reconstruct.");
  c.reconstruct.omega_source = parse_omega_source(str_or(rc, "omega_source", "wronskian", "reconstruct."));
  c.reconstruct.N = int_or(rc, "N", c.reconstruct.N, "reconstruct.");
  if (c.reconstruct.N < 2) detail::config_error("reconstruct.N must be >= 2");
  if (rc.contains("eval_points")) c.reconstruct.eval_points = detail::num_list(rc.at("eval_points"), "reconstruct.eval_points");
  c.reconstruct.eval_from = int_or(rc, "eval_from", c.reconstruct.eval_from, "reconstruct.");
  c.reconstruct.eval_to = int_or(rc, "eval_to", c.reconstruct.eval_to, "reconstruct.");
  if (rc.contains("g")) {
    const auto& g = rc.at("g");
    if (g.is_string()) {
      c.reconstruct.g.preset = g.get<std::string>();
    } else {
      c.reconstruct.g.preset = str_or(g, "preset", "one", "reconstruct.g.");
      c.reconstruct.g.k = num_or(g, "k", 1.0, "reconstruct.g.");
      if (g.contains("table")) c.reconstruct.g.table = detail::tables(g.at("table"), "reconstruct.g.table.");
    }
  }
  const auto& pre = c.reconstruct.g.preset;
  if (pre != "one" && pre != "zero" && pre != "bump_mid" && pre != "sin_k" && pre != "custom") {
    detail::config_error("unknown g preset '" + pre + "' (one, zero, bump_mid, sin_k, custom)");
  }
  return c;
}

inline json config_to_json(const RunConfig& c) {
  json j = problem_to_json(c.problem);
  j["tolerances"] = {{"ode_rel", c.tol.ode_rel}, {"ode_abs", c.tol.ode_abs}, {"quad_rel", c.tol.quad_rel},
                     {"root_rel", c.tol.root_rel}};
  j["spectrum"] = {{"count", c.spectrum.count},
                   {"negative_floor", c.spectrum.negative_floor},
                   {"points_per_spacing", c.spectrum.points_per_spacing},
                   {"grid_points", c.spectrum.grid_points}};
  j["sweep"] = {{"epsilon_min", c.sweep.epsilon_min},
                {"epsilon_max", c.sweep.epsilon_max},
                {"steps", c.sweep.steps},
                {"count", c.sweep.count}};
  j["green"] = {{"lambda", c.green.lambda}, {"points_per_piece", c.green.points_per_piece}};
  json g = {{"preset", c.reconstruct.g.preset}, {"k", c.reconstruct.g.k}};
  if (c.reconstruct.g.preset == "custom") {
    json t = json::object();
    for (Piece p : kPieces) {
      t[to_string(p)] = {{"x", c.reconstruct.g.table[index(p)].x}, {"q", c.reconstruct.g.table[index(p)].q}};
    }
    g["table"] = t;
  }
  j["reconstruct"] = {{"kernel", to_string(c.reconstruct.kernel)},
                      {"y0", c.reconstruct.y0 ? json(*c.reconstruct.y0) : json((c.problem.a + c.problem.b) / 2.0)},
                      {"omega_source", to_string(c.reconstruct.omega_source)},
                      {"g", g},
                      {"N", c.reconstruct.N},
                      {"eval_points", c.reconstruct.eval_points},
                      {"eval_from", c.reconstruct.eval_from},
                      {"eval_to", c.reconstruct.eval_to}};
  return j;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

inline ScanOptions scan_options(const RunConfig& c) {
  ScanOptions s;
  s.negative_floor = c.spectrum.negative_floor;
  s.points_per_spacing = c.spectrum.points_per_spacing;
  s.root_tol = c.tol.root_rel;
  s.grid_points = c.spectrum.grid_points;
  s.quad_rel_tol = c.tol.quad_rel;
  s.shoot.ode.rel_tol = c.tol.ode_rel;
  s.shoot.ode.abs_tol = c.tol.ode_abs;
  s.shoot.grid_points = c.spectrum.grid_points;
  return s;
}

inline PieceFunction make_g(const Problem& problem, const GSection& g) {
  if (g.preset == "one") return g_one();
  if (g.preset == "zero") return g_zero();
  if (g.preset == "bump_mid") return g_bump_mid(problem);
  if (g.preset == "sin_k") return g_sin_k(problem, g.k);
  return g_table(problem, g.table);
}

}  // namespace slms::cli

#endif  // SLMS_TOOLS_CONFIG_HPP
