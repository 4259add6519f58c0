#pragma once

// Subcommand bodies for the `orliczot` tool. Each takes parsed arguments and
// output streams and returns the process exit code:
//   0 success, 1 bad input, 2 solver did not converge, 3 instance too large.

#include <filesystem>
#include <functional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "orliczot/excess_mass.hpp"
#include "orliczot/experiment.hpp"
#include "orliczot/measures.hpp"
#include "orliczot/orlicz.hpp"
#include "orliczot/ow_solver.hpp"

namespace orliczot::cli {

enum ExitCode : int { kOk = 0, kBadInput = 1, kNotConverged = 2, kTooLarge = 3 };

struct Args {
  std::string a;  // source measure file (or g for excess)
  std::string b;  // target measure file (or g0 for excess)
  std::string phi = "exp:1.1";
  double lambda = 1.0;
  double epsilon = 0.0;  // <= 0 selects 1e-6 * max(M)
  double eta = 0.0;
  double order = 2.0;  // wr only
  Seed seed = 1;
  std::size_t n = 300;
  std::string out;
  std::string format = "text";  // text | json | csv
};

inline nlohmann::json to_json(const BracketState& b) {
  return {{"x_low", b.x_low}, {"x_upp", b.x_upp}, {"f_low", b.f_low}, {"f_upp", b.f_upp}};
}

inline nlohmann::json to_json(const SolveReport& r) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& b : r.trace) trace.push_back(to_json(b));
  return {{"value", r.value},
          {"status", to_string(r.status)},
          {"iterations", r.iterations},
          {"epsilon", r.epsilon},
          {"objective", r.objective},
          {"inner_iterations", r.inner_iterations},
          {"marginal_violation", marginal_violation(r.plan)},
          {"trace", trace}};
}

namespace detail {

inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

inline int status_code(const SolveReport& r) {
  return r.status == SolveStatus::max_iters ? kNotConverged : kOk;
}

inline SolveReport entropic_report(const Args& args, const DiscreteMeasure& a, const DiscreteMeasure& b) {
  return solve_entropic_ow(a, b, parse_phi(args.phi), args.lambda, args.epsilon);
}

inline void print_value(std::ostream& out, double value, const std::string& status) {
  out << format_real(value) << ' ' << status << '\n';
}

}  // namespace detail

/// Maps exceptions onto exit codes and prints the message to `err`.
inline int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const SizeError& e) {
    err << "error: " << e.what() << '\n';
    return kTooLarge;
  } catch (const SolveError& e) {
    err << "error: " << e.what() << " (after " << e.report().iterations << " outer iterations)\n";
    return kNotConverged;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kNotConverged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  }
}

/// Entropic Orlicz-Wasserstein distance between two measure files.
inline int cmd_dist(const Args& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const DiscreteMeasure a = read_measure_file(args.a);
    const DiscreteMeasure b = read_measure_file(args.b);
    const SolveReport rep = detail::entropic_report(args, a, b);
    if (args.format == "json") {
      out << to_json(rep).dump(2) << '\n';
    } else {
      detail::print_value(out, rep.value, to_string(rep.status));
    }
    if (!args.out.empty()) write_json_file(args.out, to_json(rep));
    return detail::status_code(rep);
  });
}

/// Writes the entropic OW plan as `i,j,mass` CSV plus a `<out>.json` sidecar.
inline int cmd_plan(const Args& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.out.empty()) throw std::invalid_argument("plan: --out is required");
    const DiscreteMeasure a = read_measure_file(args.a);
    const DiscreteMeasure b = read_measure_file(args.b);
    const SolveReport rep = detail::entropic_report(args, a, b);
    write_plan_csv(args.out, rep.plan.matrix);
    nlohmann::json side = to_json(rep);
    side["row_marginal"] = detail::to_std(rep.plan.row_marginal);
    side["col_marginal"] = detail::to_std(rep.plan.col_marginal);
    side["phi"] = render_phi(parse_phi(args.phi));
    side["lambda"] = args.lambda;
    write_json_file(args.out + ".json", side);
    detail::print_value(out, rep.value, to_string(rep.status));
    return detail::status_code(rep);
  });
}

/// The outlier-transport experiment; writes five files into `args.out`.
inline int cmd_simulate(const Args& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::filesystem::path dir = args.out.empty() ? std::filesystem::path(".") : std::filesystem::path(args.out);
    std::filesystem::create_directories(dir);
    SimulationConfig cfg;
    cfg.seed = args.seed;
    cfg.n_samples = args.n;
    cfg.lambda = args.lambda;
    cfg.phi = parse_phi(args.phi);
    cfg.epsilon = args.epsilon;
    const SimulationResult res = run_simulation(cfg);

    write_measure_file((dir / "nu1.json").string(), res.source);
    write_measure_file((dir / "nu2.json").string(), res.target);
    write_plan_csv((dir / "w1_plan.csv").string(), res.w1.plan.matrix);
    write_plan_csv((dir / "ow_plan.csv").string(), res.ow.plan.matrix);

    nlohmann::json summary;
    summary["seed"] = cfg.seed;
    summary["n_samples"] = cfg.n_samples;
    summary["lambda"] = cfg.lambda;
    summary["phi"] = render_phi(cfg.phi);
    summary["source_spec"] = mixture_to_json(cfg.source);
    summary["target_spec"] = mixture_to_json(cfg.target);
    summary["outlier_component_mean"] = cfg.target.means[lightest_component(cfg.target)];
    summary["outlier_columns"] = res.outlier_columns.size();
    summary["w1_outlier_mass"] = res.w1_outlier_mass;
    summary["ow_outlier_mass"] = res.ow_outlier_mass;
    summary["w1_outlier_column_mass"] = res.w1_outlier_column_mass;
    summary["ow_outlier_column_mass"] = res.ow_outlier_column_mass;
    summary["outlier_mass_definition"] =
        "sum over source atoms of min(mass sent to outlier columns, mass sent elsewhere)";
    summary["w1_transport_cost"] = res.w1.transport_cost;
    summary["w1_entropy"] = res.w1.entropy;
    summary["w1_plan_violation"] = res.w1.violation;
    summary["ow_value"] = res.ow.value;
    summary["ow_status"] = to_string(res.ow.status);
    summary["ow_iterations"] = res.ow.iterations;
    summary["ow_plan_violation"] = marginal_violation(res.ow.plan);
    write_json_file((dir / "summary.json").string(), summary);

    out << "w1_outlier_mass " << format_real(res.w1_outlier_mass) << '\n'
        << "ow_outlier_mass " << format_real(res.ow_outlier_mass) << '\n'
        << "ow_value " << format_real(res.ow.value) << ' ' << to_string(res.ow.status) << '\n';
    return detail::status_code(res.ow);
  });
}

/// Excess-mass report of g against g0 at radius eta.
inline int cmd_excess(const Args& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!(args.eta > 0.0)) throw std::invalid_argument("excess: --eta must be > 0");
    const DiscreteMeasure g = read_measure_file(args.a);
    const DiscreteMeasure g0 = read_measure_file(args.b);
    const PhiFunction phi = parse_phi(args.phi);
    const bool small = g.size() * g0.size() <= kExactSizeLimit;
    const SolveReport rep = small ? solve_exact_ow(g, g0, phi, args.epsilon)
                                  : solve_entropic_ow(g, g0, phi, args.lambda, args.epsilon);
    const ExcessMassReport em = excess_mass_report(g, g0, phi, args.eta, rep.value, small);
    nlohmann::json j = to_json(em);
    j["phi"] = render_phi(phi);
    j["w_status"] = to_string(rep.status);
    out << j.dump(2) << '\n';
    if (!args.out.empty()) write_json_file(args.out, j);
    return detail::status_code(rep);
  });
}

/// Exact W_Phi for small instances.
inline int cmd_oracle(const Args& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const DiscreteMeasure a = read_measure_file(args.a);
    const DiscreteMeasure b = read_measure_file(args.b);
    const SolveReport rep = solve_exact_ow(a, b, parse_phi(args.phi), args.epsilon);
    if (args.format == "json") {
      out << to_json(rep).dump(2) << '\n';
    } else {
      detail::print_value(out, rep.value, to_string(rep.status));
    }
    return detail::status_code(rep);
  });
}

/// Exact classical W_r.
inline int cmd_wr(const Args& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const DiscreteMeasure a = read_measure_file(args.a);
    const DiscreteMeasure b = read_measure_file(args.b);
    out << format_real(wasserstein_r(a, b, args.order)) << '\n';
    return static_cast<int>(kOk);
  });
}

}  // namespace orliczot::cli
