// degensink command line: solve, classify, support, experiment, appendix-a, gen.
// Exit codes: 0 success, 1 usage or input error, 2 not converged, 3 infeasible
// or assumption error.

#include "degensink/degensink.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

namespace ds = degensink;

namespace {

constexpr int kNotConverged = 2;
constexpr int kInfeasible = 3;

struct Source {
  std::string instance;
  std::string gen;
};

struct Output {
  std::string path;

  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      if (!text.empty() && text.back() != '\n') std::cout << '\n';
      return;
    }
    std::ofstream out(path);
    if (!out) throw ds::InvalidInput("cannot write " + path);
    out << text;
  }
};

void add_source(CLI::App* cmd, Source& src) {
  auto* a = cmd->add_option("--instance", src.instance, "Instance JSON file");
  auto* b = cmd->add_option("--gen", src.gen, "Generated instance, e.g. kind=staircase,n=20,blocks=3");
  a->excludes(b);
}

ds::Instance load(const Source& src) {
  if (!src.instance.empty()) return ds::load_instance(src.instance);
  if (!src.gen.empty()) return ds::gen_instance(ds::parse_instance_spec(src.gen));
  throw ds::InvalidInput("one of --instance or --gen is required");
}

bool has_source(const Source& src) { return !src.instance.empty() || !src.gen.empty(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sinkhorn scaling with zero patterns and degenerate limits"};
  app.require_subcommand(1);
  Output out;
  app.add_option("--out", out.path, "Write the result to this file instead of stdout");

  // solve
  Source solve_src;
  double solve_tol = -1.0;
  double solve_lambda = 1000.0;
  long solve_max_iter = 100000;
  std::string solve_stop = "delta", solve_emit = "report";
  auto* solve = app.add_subcommand("solve", "Run Sinkhorn and print the limit report");
  add_source(solve, solve_src);
  solve->add_option("--tol", solve_tol, "Stop tolerance (default 1e-10 for delta, 1e-3 for gap)");
  solve->add_option("--lambda", solve_lambda, "Penalty weight of the gap criterion");
  solve->add_option("--max-iter", solve_max_iter, "Sweep cap")->check(CLI::PositiveNumber);
  solve->add_option("--stop", solve_stop, "Stop rule")->check(CLI::IsMember({"gap", "delta"}));
  solve->add_option("--emit", solve_emit, "Output")->check(CLI::IsMember({"report", "trace"}));

  // classify
  Source cls_src;
  auto* classify = app.add_subcommand("classify", "Scalable, approximately scalable or not");
  add_source(classify, cls_src);

  // support
  Source sup_src;
  std::string sup_method = "exact";
  double sup_tol = 1e-10;
  double sup_lambda = 1000.0;
  bool sup_trace = false;
  auto* support = app.add_subcommand("support", "Support of the limit couplings");
  add_source(support, sup_src);
  support->add_option("--method", sup_method, "Procedure")
      ->check(CLI::IsMember({"exact", "approx"}));
  support->add_option("--tol", sup_tol, "Inner stop tolerance of the approximate method");
  support->add_option("--lambda", sup_lambda, "Penalty weight when a gap stop is used");
  support->add_flag("--emit-trace", sup_trace, "Also print the procedure trace");

  // experiment
  std::string exp_name;
  Source exp_src;
  ds::ExperimentConfig exp_cfg;
  int blocks_lo = 1, blocks_hi = 10;
  auto* experiment = app.add_subcommand("experiment", "CSV experiment tables");
  experiment->add_option("name", exp_name, "Experiment")
      ->required()
      ->check(CLI::IsMember({"iterations-vs-zeros", "tv-vs-lambda", "tv-vs-epsilon"}));
  add_source(experiment, exp_src);
  experiment->add_option("--size", exp_cfg.size, "Staircase size")->check(CLI::PositiveNumber);
  experiment->add_option("--seed", exp_cfg.seed, "Generator seed");
  experiment->add_option("--tol", exp_cfg.tol, "Stop tolerance");
  experiment->add_option("--max-iter", exp_cfg.max_iter, "Sweep cap");
  experiment->add_option("--blocks-min", blocks_lo, "Smallest block count");
  experiment->add_option("--blocks-max", blocks_hi, "Largest block count");

  auto* appendix = app.add_subcommand("appendix-a", "Iterates and limits of the 3 x 3 example");

  Source gen_src;
  auto* gen = app.add_subcommand("gen", "Print an instance as JSON");
  add_source(gen, gen_src);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      const auto inst = load(solve_src);
      ds::StopConfig cfg;
      cfg.max_iter = solve_max_iter;
      cfg.lambda = solve_lambda;
      if (solve_stop == "gap") {
        cfg.mode = ds::StopMode::UnbalancedGap;
        cfg.epsilon_tol = solve_tol > 0.0 ? solve_tol : 1e-3;
      } else {
        cfg.mode = ds::StopMode::IterateDelta;
        cfg.epsilon_tol = solve_tol > 0.0 ? solve_tol : 1e-10;
      }
      const auto rep = ds::run_sinkhorn(inst.R, inst.mu, inst.nu, cfg);
      out.write(solve_emit == "trace" ? ds::gap_trace_csv(rep) : ds::report_to_json(rep));
      if (!rep.converged) {
        std::fprintf(stderr, "not converged after %ld sweeps\n", rep.iterations);
        return kNotConverged;
      }
    } else if (*classify) {
      const auto inst = load(cls_src);
      out.write(ds::classification_to_json(ds::classify_exact(inst.R, inst.mu, inst.nu)));
    } else if (*support) {
      const auto inst = load(sup_src);
      std::string text;
      if (sup_method == "exact") {
        const auto tr = ds::exact_support_procedure(inst.R, inst.mu, inst.nu);
        text = ds::mask_to_json(tr.final_mask);
        if (sup_trace) text += "\n" + ds::trace_to_json(tr);
      } else {
        ds::StopConfig cfg;
        cfg.epsilon_tol = sup_tol;
        cfg.lambda = sup_lambda;
        const auto res = ds::approx_support_algorithm1(inst.R, inst.mu, inst.nu, {}, cfg);
        text = ds::mask_to_json(res.mask);
        if (sup_trace)
          text += "\n{\"iterations\":" + std::to_string(res.iterations) +
                  ",\"rounds\":" + std::to_string(res.rounds) +
                  ",\"converged\":" + (res.converged ? "true" : "false") +
                  ",\"degenerate\":" + (res.degenerate ? "true" : "false") + "}";
        out.write(text);
        if (!res.converged) return kNotConverged;
        return 0;
      }
      out.write(text);
    } else if (*experiment) {
      if (exp_name == "iterations-vs-zeros") {
        if (blocks_lo < 1 || blocks_hi < blocks_lo) throw ds::InvalidInput("bad block range");
        std::vector<int> blocks;
        for (int k = blocks_lo; k <= blocks_hi; ++k) blocks.push_back(k);
        out.write(ds::zeros_csv(ds::experiment_iterations_vs_zeros(blocks, exp_cfg)));
      } else if (!has_source(exp_src)) {
        const auto t = ds::experiment_fig6(exp_cfg);
        out.write(exp_name == "tv-vs-lambda" ? ds::lambda_csv(t.lambda_rows)
                                             : ds::epsilon_csv(t.epsilon_rows));
      } else {
        const auto inst = load(exp_src);
        ds::StopConfig cfg;
        cfg.epsilon_tol = exp_cfg.tol;
        cfg.max_iter = exp_cfg.max_iter;
        const auto ref = ds::run_sinkhorn(inst.R, inst.mu, inst.nu, cfg);
        if (exp_name == "tv-vs-lambda")
          out.write(ds::lambda_csv(ds::sweep_lambda(inst.R, inst.mu, inst.nu, ref.r_star,
                                                    ds::kFig6Lambdas, exp_cfg.tol)));
        else
          out.write(ds::epsilon_csv(ds::sweep_epsilon(inst.R, inst.mu, inst.nu, ref.r_star,
                                                      ds::kFig6Epsilons, exp_cfg.tol)));
      }
    } else if (*appendix) {
      out.write(ds::run_appendix_a());
    } else if (*gen) {
      out.write(ds::instance_to_json(load(gen_src)));
    }
  } catch (const ds::Assumption1Violated& e) {
    std::fprintf(stderr, "assumption violated: %s\n", e.what());
    return kInfeasible;
  } catch (const ds::Assumption2Violated& e) {
    std::fprintf(stderr, "assumption violated: %s\n", e.what());
    return kInfeasible;
  } catch (const ds::InfeasibleProjection& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kInfeasible;
  } catch (const ds::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
