// orliczot: Orlicz-Wasserstein distances, plans and excess-mass diagnostics.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "orliczot/commands.hpp"

namespace {

using orliczot::cli::Args;

void add_pair(CLI::App* sub, Args& args, const std::string& first = "a", const std::string& second = "b") {
  sub->add_option(first, args.a, "first measure file (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option(second, args.b, "second measure file (JSON)")->required()->check(CLI::ExistingFile);
}

void add_phi(CLI::App* sub, Args& args) {
  sub->add_option("--phi", args.phi, "Orlicz function: pow:<p> | exp:<beta> | exppow:<beta> | sup(A,B) | mix:<a>(A,B)")
      ->capture_default_str();
}

void add_entropic(CLI::App* sub, Args& args) {
  sub->add_option("--lambda", args.lambda, "inverse entropic regularization")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--epsilon", args.epsilon, "bracket tolerance (default 1e-6 * max cost)")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orlicz-Wasserstein distances between discrete measures"};
  app.require_subcommand(1);
  Args args;

  auto* dist = app.add_subcommand("dist", "entropic Orlicz-Wasserstein distance");
  add_pair(dist, args);
  add_phi(dist, args);
  add_entropic(dist, args);
  dist->add_option("--out", args.out, "also write the solve report as JSON");
  dist->add_option("--format", args.format, "text | json")->check(CLI::IsMember({"text", "json"}));

  auto* plan = app.add_subcommand("plan", "entropic Orlicz-Wasserstein plan as CSV");
  add_pair(plan, args);
  add_phi(plan, args);
  add_entropic(plan, args);
  plan->add_option("--out", args.out, "CSV path; a JSON sidecar is written next to it")->required();
  plan->add_option("--format", args.format, "csv")->check(CLI::IsMember({"csv", "text"}));

  auto* simulate = app.add_subcommand("simulate", "Gaussian vs Laplace mixture outlier-transport experiment");
  simulate->add_option("--seed", args.seed, "random seed")->capture_default_str();
  simulate->add_option("--n", args.n, "samples per measure")->capture_default_str()->check(CLI::PositiveNumber);
  simulate->add_option("--lambda", args.lambda, "inverse entropic regularization (default 0.01)")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--phi", args.phi, "Orlicz function")->capture_default_str();
  simulate->add_option("--epsilon", args.epsilon, "bracket tolerance")->check(CLI::PositiveNumber);
  simulate->add_option("--out", args.out, "output directory")->capture_default_str();

  auto* excess = app.add_subcommand("excess", "excess mass of g relative to g0 and its W_Phi bounds");
  add_pair(excess, args, "g", "g0");
  add_phi(excess, args);
  add_entropic(excess, args);
  excess->add_option("--eta", args.eta, "outlier radius")->required()->check(CLI::PositiveNumber);
  excess->add_option("--out", args.out, "also write the report to this path");
  excess->add_option("--format", args.format, "json")->check(CLI::IsMember({"json", "text"}));

  auto* oracle = app.add_subcommand("oracle", "exact Orlicz-Wasserstein distance (k * k' <= 10^4)");
  add_pair(oracle, args);
  add_phi(oracle, args);
  oracle->add_option("--epsilon", args.epsilon, "bisection tolerance")->check(CLI::PositiveNumber);
  oracle->add_option("--format", args.format, "text | json")->check(CLI::IsMember({"text", "json"}));

  auto* wr = app.add_subcommand("wr", "exact classical Wasserstein distance of order r");
  add_pair(wr, args);
  wr->add_option("--r", args.order, "order r >= 1")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : orliczot::cli::kBadInput;
  }

  using namespace orliczot::cli;
  if (simulate->parsed()) {
    if (simulate->count("--lambda") == 0) args.lambda = 0.01;
    return cmd_simulate(args, std::cout, std::cerr);
  }
  if (dist->parsed()) return cmd_dist(args, std::cout, std::cerr);
  if (plan->parsed()) return cmd_plan(args, std::cout, std::cerr);
  if (excess->parsed()) return cmd_excess(args, std::cout, std::cerr);
  if (oracle->parsed()) return cmd_oracle(args, std::cout, std::cerr);
  if (wr->parsed()) return cmd_wr(args, std::cout, std::cerr);
  return kBadInput;
}
