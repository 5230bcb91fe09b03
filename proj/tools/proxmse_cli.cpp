// proxmse command-line front end: msd, bounds, denoise and lasso experiments.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical or run-quality error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "proxmse/denoise.hpp"
#include "proxmse/errors.hpp"
#include "proxmse/io.hpp"
#include "proxmse/lasso.hpp"
#include "proxmse/parallel.hpp"
#include "proxmse/signal_model.hpp"
#include "proxmse/subdiff.hpp"

namespace {

using namespace proxmse;
using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonOptions {
  std::string structure;
  std::uint64_t seed = 0;
  std::string output;
  std::string format = "csv";
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--structure", o.structure, "sparse:N:K | block:T:B:K | lowrank:D:R | weighted:N:K:W1,W2 | JSON")
      ->required();
  cmd->add_option("--seed", o.seed, "RNG seed (mandatory)")->required();
  cmd->add_option("-o,--output", o.output, "output file, '-' for stdout")->required();
  cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--threads", o.threads, "OpenMP threads (does not change results)");
}

json base_config(const std::string& command, const SignalRecipe& recipe, const CommonOptions& o) {
  return json{{"command", command}, {"structure", recipe}, {"seed", o.seed}, {"format", o.format}};
}

void write_output(const CommonOptions& o, const ResultTable& table, const json& config) {
  const std::string text = o.format == "json" ? to_json_text(table, config) : to_csv(table, config);
  if (o.output == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(o.output, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file '" + o.output + "'");
  out << text;
}

// ---- msd ---------------------------------------------------------------------

struct MsdOptions {
  std::string lambda_grid;
  std::vector<double> lambdas;
  bool cone = false;
  bool optimal = false;
  std::size_t samples = 10000;
};

void run_msd(const CommonOptions& o, const MsdOptions& m) {
  const SignalRecipe recipe = parse_signal_descriptor(o.structure, o.seed);
  const SignalInstance inst = make_signal(recipe);
  if (m.samples < 2) throw std::invalid_argument("--samples must be at least 2");
  std::vector<double> grid = m.lambdas;
  if (!m.lambda_grid.empty()) {
    const auto parsed = parse_real_grid(m.lambda_grid);
    grid.insert(grid.end(), parsed.begin(), parsed.end());
  }
  if (grid.empty() && !m.cone && !m.optimal) {
    throw std::invalid_argument("msd needs --lambda, --lambda-grid, --cone or --optimal");
  }
  const McConfig mc{m.samples, o.seed, Exec::kParallel};
  std::vector<MsdEstimate> rows;
  if (!grid.empty()) rows = msd_lambda_grid(inst.structure, grid, mc);
  if (m.cone) rows.push_back(msd_cone(inst.structure, mc));
  ResultTable table = msd_table(label(recipe), rows);
  if (m.optimal) {
    const auto best = optimal_lambda(inst.structure, mc);
    auto opt_table = msd_table(label(recipe), {best.msd});
    table.rows.push_back(opt_table.rows.front());
  }
  json config = base_config("msd", recipe, o);
  config["samples"] = m.samples;
  config["lambdas"] = grid;
  config["cone"] = m.cone;
  config["optimal"] = m.optimal;
  write_output(o, table, config);
}

// ---- bounds -------------------------------------------------------------------

struct BoundsOptions {
  std::optional<double> lambda;
  std::size_t samples = 10000;
};

void run_bounds(const CommonOptions& o, const BoundsOptions& b) {
  const SignalRecipe recipe = parse_signal_descriptor(o.structure, o.seed);
  const SignalInstance inst = make_signal(recipe);
  const auto& s = inst.structure;
  if (b.samples < 2) throw std::invalid_argument("--samples must be at least 2");
  const McConfig mc{b.samples, o.seed, Exec::kParallel};
  const std::string name = label(recipe);
  ResultTable table{{"structure", "quantity", "lambda", "value", "stderr", "status"}, {}};
  auto row = [&](const std::string& q, json lambda, json value, json err, const std::string& status) {
    table.rows.push_back({name, q, std::move(lambda), std::move(value), std::move(err), status});
  };

  std::optional<double> threshold;
  try {
    threshold = table1_threshold(s);
  } catch (const InvalidStructure&) {
  }
  const double lambda = b.lambda.value_or(threshold.value_or(0.0));
  if (threshold) {
    row("table1_threshold", nullptr, *threshold, nullptr, "ok");
    try {
      row("table1_bound", lambda, table1_bound(s, lambda), nullptr, "ok");
    } catch (const BoundNotValid&) {
      row("table1_bound", lambda, nullptr, nullptr, "bound_invalid");
    }
  } else {
    row("table1_bound", lambda, nullptr, nullptr, "unsupported");
  }
  const auto at_lambda = msd_lambda(s, lambda, mc);
  row("msd_lambda", lambda, at_lambda.mean, at_lambda.std_error, "ok");

  const auto gc = geometry_constants(s);
  const auto cone = msd_cone(s, mc);
  const auto best = optimal_lambda(s, mc);
  const double gap = sandwich_gap(s);
  row("cone_msd", nullptr, cone.mean, cone.std_error, "ok");
  row("optimal_msd", best.lambda, best.msd.mean, best.msd.std_error, "ok");
  row("R_over_fmax", nullptr, gc.R / gc.f_max, nullptr, "ok");
  row("sandwich_gap", nullptr, gap, nullptr, "ok");
  row("sandwich_upper", nullptr, cone.mean + gap, cone.std_error, "ok");
  row("lipschitz_bound", nullptr, lipschitz_upper_bound(s, cone.mean), nullptr, "ok");

  json config = base_config("bounds", recipe, o);
  config["samples"] = b.samples;
  config["lambda"] = lambda;
  write_output(o, table, config);
}

// ---- denoise --------------------------------------------------------------------

struct DenoiseOptions {
  std::string estimator = "regularized";
  std::optional<double> lambda;
  std::string sigma_grid = "default";
  std::size_t trials = 200;
};

void run_denoise(const CommonOptions& o, const DenoiseOptions& d) {
  const SignalRecipe recipe = parse_signal_descriptor(o.structure, o.seed);
  const SignalInstance inst = make_signal(recipe);
  const std::vector<double> grid =
      d.sigma_grid == "default" ? default_sigma_grid(inst) : parse_real_grid(d.sigma_grid);
  DenoiseRun run;
  if (d.estimator == "constrained") {
    run = run_constrained(inst, grid, d.trials, o.seed);
  } else {
    if (!d.lambda) throw std::invalid_argument("--lambda is required for the " + d.estimator + " estimator");
    run = d.estimator == "mixed" ? run_mixed_nonneg_sparse(inst, *d.lambda, grid, d.trials, o.seed)
                                 : run_regularized(inst, *d.lambda, grid, d.trials, o.seed);
  }
  json config = base_config("denoise", recipe, o);
  config["estimator"] = d.estimator;
  config["lambda"] = d.lambda ? json(*d.lambda) : json(nullptr);
  config["sigma_grid"] = grid;
  config["trials"] = d.trials;
  write_output(o, denoise_table(run), config);
}

// ---- lasso ------------------------------------------------------------------------

struct LassoOptions {
  std::string m_grid;
  std::size_t trials = 50;
  std::string matrix = "unitary";
  std::optional<double> sigma;
  std::size_t cone_samples = 20000;
  std::size_t max_iters = 50000;
};

void run_lasso(const CommonOptions& o, const LassoOptions& l) {
  const SignalRecipe recipe = parse_signal_descriptor(o.structure, o.seed);
  const SignalInstance inst = make_signal(recipe);
  const auto grid = parse_count_grid(l.m_grid);
  if (l.cone_samples < 2) throw std::invalid_argument("--cone-samples must be at least 2");
  const auto cone = msd_cone(inst.structure, McConfig{l.cone_samples, o.seed, Exec::kParallel});
  LassoExperiment cfg;
  cfg.trials = l.trials;
  cfg.matrix = l.matrix == "gaussian" ? MatrixKind::kGaussian : MatrixKind::kUnitary;
  cfg.sigma = l.sigma;
  cfg.solver.max_iters = l.max_iters;
  cfg.seed = o.seed;
  const auto records = sweep_measurements(inst, grid, cone.mean, cfg);
  json config = base_config("lasso", recipe, o);
  config["m_grid"] = grid;
  config["trials"] = l.trials;
  config["matrix"] = l.matrix;
  config["sigma"] = cfg.sigma.value_or(default_lasso_sigma(inst));
  config["cone_samples"] = l.cone_samples;
  config["cone_msd"] = cone.mean;
  config["max_iters"] = l.max_iters;
  write_output(o, lasso_table(label(recipe), cfg.matrix, records), config);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Worst-case NMSE of proximal denoising and LASSO phase-transition experiments"};
  app.require_subcommand(1);

  CommonOptions common;
  MsdOptions msd;
  BoundsOptions bounds;
  DenoiseOptions denoise;
  LassoOptions lasso;

  auto* msd_cmd = app.add_subcommand("msd", "Monte Carlo D(lambda * subdiff f(x0)) and D(cone)");
  add_common(msd_cmd, common);
  msd_cmd->add_option("--lambda-grid", msd.lambda_grid, "start:step:stop or comma list");
  msd_cmd->add_option("--lambda", msd.lambdas, "individual lambda values");
  msd_cmd->add_flag("--cone", msd.cone, "estimate D(cone(subdiff f(x0)))");
  msd_cmd->add_flag("--optimal", msd.optimal, "estimate the optimally tuned lambda");
  msd_cmd->add_option("--samples", msd.samples, "Monte Carlo samples");

  auto* bounds_cmd = app.add_subcommand("bounds", "Closed-form bounds, sandwich gap and Lipschitz bound");
  add_common(bounds_cmd, common);
  bounds_cmd->add_option("--lambda", bounds.lambda, "lambda for the closed-form bound (default: threshold)");
  bounds_cmd->add_option("--samples", bounds.samples, "Monte Carlo samples for the cone estimates");

  auto* denoise_cmd = app.add_subcommand("denoise", "NMSE versus sigma for a denoising estimator");
  add_common(denoise_cmd, common);
  denoise_cmd->add_option("--estimator", denoise.estimator)
      ->check(CLI::IsMember({"regularized", "constrained", "mixed"}));
  denoise_cmd->add_option("--lambda", denoise.lambda, "penalty scale");
  denoise_cmd->add_option("--sigma-grid", denoise.sigma_grid, "'default', start:step:stop or comma list");
  denoise_cmd->add_option("--trials", denoise.trials, "trials per sigma");

  auto* lasso_cmd = app.add_subcommand("lasso", "Constrained LASSO sweep over measurement counts");
  add_common(lasso_cmd, common);
  lasso_cmd->add_option("--m-grid", lasso.m_grid, "start:step:stop or comma list")->required();
  lasso_cmd->add_option("--trials", lasso.trials, "trials per measurement count");
  lasso_cmd->add_option("--matrix", lasso.matrix)->check(CLI::IsMember({"unitary", "gaussian"}));
  lasso_cmd->add_option("--sigma", lasso.sigma, "noise level (default 1e-4 * ||x0||)");
  lasso_cmd->add_option("--cone-samples", lasso.cone_samples, "samples for the predicted phase transition");
  lasso_cmd->add_option("--max-iters", lasso.max_iters, "solver iteration cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    set_threads(common.threads);
    if (*msd_cmd) run_msd(common, msd);
    if (*bounds_cmd) run_bounds(common, bounds);
    if (*denoise_cmd) run_denoise(common, denoise);
    if (*lasso_cmd) run_lasso(common, lasso);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
