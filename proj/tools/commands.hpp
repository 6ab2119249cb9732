#ifndef SLMS_TOOLS_COMMANDS_HPP
#define SLMS_TOOLS_COMMANDS_HPP

// The four CLI workflows. Each returns a {config, results, diagnostics}
// document; results is always an array of flat rows so CSV can mirror it.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "config.hpp"
#include "slms/green.hpp"
#include "slms/sampling.hpp"
#include "slms/spectrum.hpp"

#ifndef SLMS_VERSION
#define SLMS_VERSION "0.0.0"
#endif

namespace slms::cli {

enum ExitCode : int { kOk = 0, kValidation = 2, kNumerical = 3, kIo = 4 };

inline int exit_code_for(ErrorCode code) noexcept {
  if (code == ErrorCode::IoError) return kIo;
  if (is_validation_error(code)) return kValidation;
  return kNumerical;
}

inline json envelope(const RunConfig& cfg, const std::string& command, json results, json diagnostics) {
  json doc;
  doc["tool"] = {{"name", "slms"}, {"version", SLMS_VERSION}, {"command", command}};
  doc["config"] = config_to_json(cfg);
  doc["results"] = std::move(results);
  doc["diagnostics"] = std::move(diagnostics);
  return doc;
}

// Spectrum ------------------------------------------------------------------

inline json cmd_spectrum(const RunConfig& cfg) {
  const Problem problem = validate(cfg.problem);
  const auto spec = find_eigenvalues(problem, cfg.spectrum.count, scan_options(cfg));
  json rows = json::array();
  double max_dev = 0.0;
  for (const auto& r : spec.records) {
    rows.push_back({{"n", r.n},
                    {"lambda_n", r.lambda},
                    {"sqrt_lambda_n", signed_sqrt(r.lambda)},
                    {"omega_prime", r.omega_prime},
                    {"norm_sq", r.norm_sq},
                    {"k_n", r.k_n},
                    {"residual", r.residual}});
    max_dev = std::max(max_dev, r.k_deviation);
  }
  json brackets = json::array();
  for (const auto& r : spec.records) brackets.push_back({r.bracket_lo, r.bracket_hi});
  json diag = {{"scan_lambda_min", spec.scan_lo},
               {"scan_lambda_max", spec.scan_hi},
               {"grid_step_sqrt_lambda", spec.grid_step},
               {"omega_evaluations", spec.omega_evaluations},
               {"brackets", brackets},
               {"max_coupling_deviation", max_dev},
               {"warnings", spec.warnings}};
  return envelope(cfg, "spectrum", rows, diag);
}

// Sweep ---------------------------------------------------------------------

inline json cmd_sweep(const RunConfig& cfg, int jobs) {
  validate(cfg.problem);
  const int steps = cfg.sweep.steps;
  std::vector<double> eps(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    eps[static_cast<std::size_t>(i)] =
        steps == 1 ? cfg.sweep.epsilon_min
                   : cfg.sweep.epsilon_min + (cfg.sweep.epsilon_max - cfg.sweep.epsilon_min) * i / (steps - 1);
  }
  struct Outcome {
    std::vector<double> lambdas;
    std::string status = "ok";
  };
  std::vector<Outcome> out(eps.size());
  ScanOptions scan = scan_options(cfg);
  scan.characterize = false;

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < eps.size(); i = next++) {
      try {
        ProblemSpec s = cfg.problem;
        s.epsilon = eps[i];
        const auto sp = find_eigenvalues(validate(s), cfg.sweep.count, scan);
        out[i].lambdas = sp.eigenvalues();
      } catch (const Error& e) {
        out[i].status = "error:" + std::string(to_string(e.code()));
      }
    }
  };
  const int k = std::clamp(jobs, 1, std::max(1, steps));
  std::vector<std::thread> pool;
  for (int t = 1; t < k; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  json rows = json::array();
  std::vector<double> max_jump(static_cast<std::size_t>(cfg.sweep.count), 0.0);
  int failures = 0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (out[i].status != "ok") {
      ++failures;
      rows.push_back({{"epsilon", eps[i]}, {"n", nullptr}, {"lambda_n", nullptr}, {"delta_prev", nullptr},
                      {"status", out[i].status}});
      continue;
    }
    for (std::size_t n = 0; n < out[i].lambdas.size(); ++n) {
      json d = nullptr;
      if (i > 0 && out[i - 1].status == "ok") {
        const double jump = std::abs(out[i].lambdas[n] - out[i - 1].lambdas[n]);
        d = jump;
        max_jump[n] = std::max(max_jump[n], jump);
      }
      rows.push_back({{"epsilon", eps[i]}, {"n", n}, {"lambda_n", out[i].lambdas[n]}, {"delta_prev", d},
                      {"status", "ok"}});
    }
  }
  json diag = {{"jobs", k}, {"failures", failures}, {"max_adjacent_jump", max_jump},
               {"max_adjacent_jump_overall", *std::max_element(max_jump.begin(), max_jump.end())}};
  return envelope(cfg, "sweep", rows, diag);
}

// Green ---------------------------------------------------------------------

inline json cmd_green(const RunConfig& cfg) {
  const Problem problem = validate(cfg.problem);
  ShootOptions shoot = scan_options(cfg).shoot;
  const GreenFunction<double> G(problem, cfg.green.lambda, shoot);
  struct Node {
    double x;
    Piece p;
  };
  std::vector<Node> nodes;
  for (Piece p : kPieces) {
    for (double x : ShotSolution<double>::piece_grid(problem.geometry(), p, cfg.green.points_per_piece)) {
      nodes.push_back({x, p});
    }
  }
  json rows = json::array();
  double gmax = 0.0;
  double asym = 0.0;
  std::vector<double> vals;
  vals.reserve(nodes.size() * nodes.size());
  for (const auto& a : nodes) {
    for (const auto& b : nodes) vals.push_back(G(a.x, a.p, b.x, b.p));
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const double v = vals[i * nodes.size() + j];
      gmax = std::max(gmax, std::abs(v));
      asym = std::max(asym, std::abs(v - vals[j * nodes.size() + i]));
      rows.push_back({{"x", nodes[i].x}, {"x_piece", to_string(nodes[i].p)}, {"y", nodes[j].x},
                      {"y_piece", to_string(nodes[j].p)}, {"G", v}});
    }
  }
  json diag = {{"omega", G.omega()},
               {"omega_scaled", G.omega() / omega_envelope(problem, cfg.green.lambda)},
               {"max_abs_G", gmax},
               {"max_asymmetry", asym},
               {"grid_points", nodes.size()}};
  return envelope(cfg, "green", rows, diag);
}

// Reconstruct ---------------------------------------------------------------

inline json cmd_reconstruct(const RunConfig& cfg) {
  const Problem problem = validate(cfg.problem);
  const auto& rc = cfg.reconstruct;
  const int N = rc.N;
  const int full = 2 * N;
  const auto spectrum = find_eigenvalues(problem, full, scan_options(cfg));

  TransformSpec ts;
  ts.kernel = rc.kernel;
  ts.y0 = rc.y0.value_or(problem.geometry().theta);
  ts.omega_source = rc.omega_source;
  ts.g = make_g(problem, rc.g);
  ts.quad_rel_tol = cfg.tol.quad_rel;
  ts.shoot = scan_options(cfg).shoot;
  if (ts.kernel == KernelKind::Green) problem.locate(ts.y0);

  const auto points = rc.eval_points.empty() ? gap_midpoints(spectrum, rc.eval_from, rc.eval_to) : rc.eval_points;
  const auto rep = reconstruction_report(problem, ts, spectrum, N, points);

  json rows = json::array();
  for (const auto& p : rep.points) {
    rows.push_back({{"lambda", p.lambda},
                    {"direct", p.direct},
                    {"series", p.series},
                    {"abs_error", p.abs_error},
                    {"rel_error", p.rel_error},
                    {"tail", p.tail},
                    {"series_product", p.series_product}});
  }
  json conv = json::array();
  for (int m : {N / 2, N, full}) {
    const auto r = m == N ? rep : reconstruction_report(problem, ts, spectrum, m, points);
    conv.push_back({{"N", m}, {"max_rel_error", r.max_rel_error}, {"max_tail", r.max_tail}});
  }
  const auto samples = sample_at_spectrum(problem, ts, spectrum, N);
  json diag = {{"kernel", to_string(ts.kernel)},
               {"y0", ts.y0},
               {"omega_source", to_string(ts.omega_source)},
               {"N", N},
               {"max_rel_error", rep.max_rel_error},
               {"max_tail", rep.max_tail},
               {"product_discrepancy", rep.product_discrepancy},
               {"product_terms", spectrum.size()},
               {"convergence", conv},
               {"samples", samples.values},
               {"sample_lambdas", samples.lambdas},
               {"type_estimate_t20", type_diagnostic(problem, ts, 20.0)},
               {"interval_length", problem.geometry().length()}};
  return envelope(cfg, "reconstruct", rows, diag);
}

// Output --------------------------------------------------------------------

inline std::string format_number(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string csv_field(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_number(v.get<double>());
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return v.dump();
}

/// CSV mirror of the results rows; the header is taken from the first row or,
/// for an empty payload, from `empty_header`.
inline std::string to_csv(const json& results, const std::vector<std::string>& empty_header) {
  std::vector<std::string> cols;
  if (!results.empty()) {
    for (const auto& [k, v] : results.front().items()) cols.push_back(k);
  } else {
    cols = empty_header;
  }
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += '\n';
  for (const auto& row : results) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      out += (i ? "," : "") + csv_field(row.contains(cols[i]) ? row.at(cols[i]) : json());
    }
    out += '\n';
  }
  return out;
}

inline std::vector<std::string> header_for(const std::string& command) {
  if (command == "spectrum") return {"n", "lambda_n", "sqrt_lambda_n", "omega_prime", "norm_sq", "k_n", "residual"};
  if (command == "sweep") return {"epsilon", "n", "lambda_n", "delta_prev", "status"};
  if (command == "green") return {"x", "x_piece", "y", "y_piece", "G"};
  return {"lambda", "direct", "series", "abs_error", "rel_error", "tail", "series_product"};
}

inline std::string render(const json& doc, const std::string& format) {
  if (format == "csv") return to_csv(doc.at("results"), header_for(doc.at("tool").at("command").get<std::string>()));
  return doc.dump(2) + "\n";
}

inline void write_output(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw Error(ErrorCode::IoError, "cannot write to standard output");
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open output '" + path + "'");
  f << text;
  f.close();
  if (!f) throw Error(ErrorCode::IoError, "failed writing output '" + path + "'");
}

/// Runs one command end to end; returns the process exit code. Diagnostics
/// for failures go to `err`.
inline int run(const std::string& command, const std::string& config_path, const std::string& out_path,
               const std::string& format, int jobs, std::ostream& err) {
  try {
    const RunConfig cfg = load_config(config_path);
    json doc;
    if (command == "spectrum") {
      doc = cmd_spectrum(cfg);
    } else if (command == "sweep") {
      doc = cmd_sweep(cfg, jobs);
    } else if (command == "green") {
      doc = cmd_green(cfg);
    } else if (command == "reconstruct") {
      doc = cmd_reconstruct(cfg);
    } else {
      err << "slms: unknown command '" << command << "'\n";
      return kValidation;
    }
    write_output(render(doc, format), out_path);
    return kOk;
  } catch (const Error& e) {
    err << "slms " << command << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "slms " << command << ": " << e.what() << '\n';
    return kNumerical;
  }
}

}  // namespace slms::cli

#endif  // SLMS_TOOLS_COMMANDS_HPP
