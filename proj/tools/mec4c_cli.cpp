// Command-line front end: run, compare-rules, oracle, cluster, validate-config.

#include <future>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mec4c/mec4c.hpp"

namespace
{

using mec4c::RunStatus;

int exit_code(RunStatus s) {return static_cast<int>(s);}

struct CommonFlags
{
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string rule;
  std::string out = "out";
  std::optional<int> epochs;
};

void add_common(CLI::App * cmd, CommonFlags & f, bool with_rule)
{
  cmd->add_option("--config", f.config, "scenario config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "override the config seed");
  if (with_rule) {
    cmd->add_option("--rule", f.rule, "block rule")->check(CLI::IsMember({"cyclic", "gs", "random"}));
  }
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--epochs", f.epochs, "simulation epochs")->check(CLI::NonNegativeNumber);
}

mec4c::RunOverrides overrides(const CommonFlags & f)
{
  mec4c::RunOverrides ov;
  ov.seed = f.seed;
  ov.epochs = f.epochs;
  if (!f.rule.empty()) {ov.rule = mec4c::parse_rule(f.rule);}
  return ov;
}

void print_summary(const mec4c::PipelineResult & r, const std::filesystem::path & dir)
{
  const auto & s = r.solve;
  std::cout << "run " << mec4c::run_id(r) << ": " << mec4c::to_string(r.status) << "\n"
            << "  iterations " << s.trace.iterations << (s.trace.converged ? " (converged)" : " (not converged)") << "\n"
            << "  objective relaxed " << s.relaxed_objective << ", final " << s.final_objective
            << ", delta " << s.violations.delta_total() << ", beta "
            << (s.gap.beta ? std::to_string(*s.gap.beta) : std::string("undefined")) << "\n"
            << "  mean delay " << r.metrics.delay.mean << " s, hit ratio " << r.metrics.hit_ratio
            << ", saving " << r.metrics.bandwidth_saving_bits << " bits\n"
            << "  outputs in " << dir.string() << "\n";
}

int cmd_run(const CommonFlags & f)
{
  const auto cfg = mec4c::load_config(f.config);
  const auto r = mec4c::run_pipeline(cfg, overrides(f));
  const auto dir = mec4c::write_outputs(r, f.out);
  print_summary(r, dir);
  if (r.status == RunStatus::infeasible && !r.solve.infeasible_reason.empty()) {
    std::cerr << "infeasible: " << r.solve.infeasible_reason << "\n";
  }
  return exit_code(r.status);
}

int cmd_compare(const CommonFlags & f)
{
  const auto cfg = mec4c::load_config(f.config);
  const mec4c::Rule rules[] = {mec4c::Rule::cyclic, mec4c::Rule::gauss_southwell, mec4c::Rule::randomized};
  std::vector<std::future<mec4c::PipelineResult>> jobs;
  for (auto rule : rules) {
    auto ov = overrides(f);
    ov.rule = rule;
    jobs.push_back(std::async(std::launch::async, [cfg, ov] {return mec4c::run_pipeline(cfg, ov);}));
  }
  std::cout << std::left << std::setw(8) << "rule" << std::setw(7) << "iters" << std::setw(16) << "final_B"
            << std::setw(12) << "delta" << "beta\n";
  int worst = 0;
  for (auto & j : jobs) {
    const auto r = j.get();
    mec4c::write_outputs(r, f.out);
    const auto & s = r.solve;
    std::cout << std::left << std::setw(8) << mec4c::to_string(r.rule) << std::setw(7) << s.trace.iterations
              << std::setw(16) << s.final_objective << std::setw(12) << s.violations.delta_total()
              << (s.gap.beta ? std::to_string(*s.gap.beta) : std::string("undefined")) << "\n";
    worst = std::max(worst, exit_code(r.status));
  }
  return worst;
}

int cmd_oracle(const CommonFlags & f)
{
  const auto cfg = mec4c::load_config(f.config);
  const auto built = mec4c::build_scenario(cfg, f.seed ? *f.seed : cfg.seed);
  const auto pb = mec4c::build_problem(built.scenario);
  const auto res = mec4c::brute_force_solve(pb);
  if (!res.feasible) {
    std::cout << "no binary decision satisfies the capacity constraints\n";
    return exit_code(RunStatus::infeasible);
  }
  std::cout << "optimum " << res.objective << " over " << res.enumerated << " combinations\n"
            << mec4c::decisions_json(built.scenario, res.best).dump(2) << "\n";
  return 0;
}

int cmd_cluster(const CommonFlags & f)
{
  const auto cfg = mec4c::load_config(f.config);
  const auto built = mec4c::build_scenario(cfg, f.seed ? *f.seed : cfg.seed);
  nlohmann::json j{
    {"spaces", mec4c::spaces_to_json(built.okm.spaces)},
    {"objective_trace", built.okm.objective_trace},
    {"iterations", built.okm.iterations},
    {"converged", built.okm.converged}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"MEC collaboration-space planner and simulator"};
  app.require_subcommand(1);
  CommonFlags run_f, cmp_f, orc_f, clu_f;
  std::string validate_path;

  auto * run = app.add_subcommand("run", "solve, round, simulate and write a report");
  add_common(run, run_f, true);
  auto * cmp = app.add_subcommand("compare-rules", "run all three block rules on one scenario");
  add_common(cmp, cmp_f, false);
  auto * orc = app.add_subcommand("oracle", "exhaustive optimum of a tiny scenario");
  add_common(orc, orc_f, false);
  auto * clu = app.add_subcommand("cluster", "form collaboration spaces only");
  add_common(clu, clu_f, false);
  auto * val = app.add_subcommand("validate-config", "check a config file");
  val->add_option("--config", validate_path, "scenario config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    return app.exit(e);
  }

  try {
    if (*run) {return cmd_run(run_f);}
    if (*cmp) {return cmd_compare(cmp_f);}
    if (*orc) {return cmd_oracle(orc_f);}
    if (*clu) {return cmd_cluster(clu_f);}
    if (*val) {
      const auto cfg = mec4c::load_config(validate_path);
      std::cout << cfg.name << ": ok\n";
      return 0;
    }
  } catch (const mec4c::ConfigError & e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_code(RunStatus::config_error);
  } catch (const mec4c::InfeasibleError & e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return exit_code(RunStatus::infeasible);
  } catch (const mec4c::Error & e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
