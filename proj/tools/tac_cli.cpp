#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "tac/checks.hpp"
#include "tac/config.hpp"
#include "tac/diagnostics.hpp"
#include "tac/io.hpp"
#include "tac/solvers.hpp"

namespace fs = std::filesystem;
using namespace tac;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitHard = 1;
constexpr int kExitFlagged = 2;
constexpr int kExitConfig = 64;

struct RunArtifacts {
  RunResult run;
  std::vector<LedgerRow> ledger;
  EnergyCheck energy;
  EstimateMonitors monitors;
  double min_dissip = 0.0;
  bool dissip_ok = true;
};

std::string snap_name(const char* prefix, int idx) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%04d.csv", prefix, idx);
  return buf;
}

int single_run(const RunConfig& cfg, double eps, const std::string& outdir, int stride,
               bool quiet, RunArtifacts* keep) {
  fs::create_directories(outdir);
  Simulator sim(build_unit_square_mesh(cfg.mesh_n), cfg.material(), cfg.reg(eps), cfg.tols);
  const Scenario scen = cfg.scenario();

  RunArtifacts art;
  art.run = run_simulation(sim, scen);
  write_trajectory_csv(outdir + "/trajectory.csv", sim, art.run);
  for (size_t n = 0; n < art.run.trajectory.size(); ++n) {
    const bool last = n + 1 == art.run.trajectory.size();
    if (n % static_cast<size_t>(stride) != 0 && !last) continue;
    write_bulk_snapshot(outdir + "/" + snap_name("bulk", static_cast<int>(n)), sim,
                        art.run.trajectory[n]);
    write_surface_snapshot(outdir + "/" + snap_name("surf", static_cast<int>(n)), sim,
                           art.run.trajectory[n]);
  }
  if (!art.run.completed) {
    std::cerr << "run failed: " << art.run.message << "\n";
    if (keep) *keep = std::move(art);
    return kExitHard;
  }

  art.ledger = compute_ledger(sim, scen, art.run.trajectory);
  write_ledger_csv(outdir + "/ledger.csv", art.ledger);
  art.energy = energy_check(art.ledger, cfg.energy_slack);
  art.monitors = estimate_monitors(sim, art.run.trajectory);
  write_monitors_csv(outdir + "/monitors.csv", art.monitors);

  art.min_dissip = 0.0;
  const double dissip_slack = cfg.dissip_tol * art.energy.data_scale;
  for (size_t n = 1; n < art.run.trajectory.size(); ++n) {
    const auto d = dissipation_density(sim, art.run.trajectory[n - 1], art.run.trajectory[n]);
    art.min_dissip = std::min({art.min_dissip, d.min_bulk, d.min_surface});
  }
  art.dissip_ok = art.min_dissip >= -dissip_slack;

  if (!quiet) {
    std::cout << "run [" << scen.name << "] eps=" << eps << ": " << art.run.reports.size()
              << " steps, energy check " << (art.energy.pass ? "ok" : "FLAGGED")
              << " (worst term " << art.energy.worst_term_value << ", cum margin "
              << art.energy.worst_cum_margin << "), dissipation "
              << (art.dissip_ok ? "ok" : "FLAGGED") << " (min " << art.min_dissip << ")\n";
  }
  const bool flagged = !art.energy.pass || !art.dissip_ok;
  if (keep) *keep = std::move(art);
  return flagged ? kExitFlagged : kExitOk;
}

std::string eps_dir(const std::string& base, double eps) {
  std::ostringstream os;
  os << base << "/eps_" << eps;
  return os.str();
}

int cmd_run(const RunConfig& cfg, const std::string& outdir, int stride, bool quiet) {
  if (cfg.eps_list.size() != 1) {
    std::cerr << "run: reg.eps must be a single value (use sweep-eps for a list)\n";
    return kExitConfig;
  }
  return single_run(cfg, cfg.eps_list.front(), outdir, stride, quiet, nullptr);
}

int cmd_sweep_eps(const RunConfig& cfg, const std::string& outdir, int stride, bool quiet) {
  if (cfg.eps_list.size() < 2) {
    std::cerr << "sweep-eps: need at least 2 values in reg.eps\n";
    return kExitConfig;
  }
  int worst = kExitOk;
  std::vector<std::vector<State>> trajectories;
  for (double eps : cfg.eps_list) {
    RunArtifacts art;
    const int code = single_run(cfg, eps, eps_dir(outdir, eps), stride, quiet, &art);
    if (code == kExitHard) return kExitHard;
    worst = std::max(worst, code);
    trajectories.push_back(std::move(art.run.trajectory));
  }
  Simulator sim(build_unit_square_mesh(cfg.mesh_n), cfg.material(), cfg.reg(cfg.eps_list.front()),
                cfg.tols);
  const auto table = eps_convergence_study(sim, cfg.eps_list, trajectories);
  fs::create_directories(outdir);
  write_cauchy_csv(outdir + "/cauchy.csv", table);
  if (!quiet) {
    bool monotone = true;
    for (size_t i = 1; i < table.size(); ++i)
      if (table[i].total > table[i - 1].total) monotone = false;
    std::cout << "sweep-eps: " << table.size() << " distance rows, Cauchy trend "
              << (monotone ? "nonincreasing" : "NOT monotone") << "\n";
  }
  return worst;
}

int cmd_check(const RunConfig& cfg, bool quiet) {
  std::vector<CheckResult> all;
  auto absorb = [&all](std::vector<CheckResult> v) {
    for (auto& r : v) all.push_back(std::move(r));
  };
  absorb(lemma_inequality_suite(cfg.eps_list, 10000, 1e-10, cfg.seed));
  absorb(resolvent_identity_checks(1e-12));
  absorb(energy_density_checks(1e-10, cfg.seed));
  const MaterialModel mat = cfg.material();
  {
    const auto rep = validate_hypotheses(mat, static_cast<unsigned>(cfg.seed));
    for (const auto& it : rep.items)
      all.push_back({"hypothesis " + it.name, it.pass, false, 0.0, it.witness});
  }
  absorb(mesh_assembly_checks(cfg.mesh_n, mat));
  if (!quiet) std::cout << render_checks(all);
  const bool ok = all_pass(all);
  std::cout << (ok ? "check: all suites passed\n" : "check: FAILURES present\n");
  return ok ? kExitOk : kExitHard;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thermoviscoelastic adhesive-contact simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_override;
  int stride_override = 0;
  bool quiet = false;
  app.add_option("--config", config_path, "run configuration file")->required();
  app.add_option("--out", out_override, "override output.dir");
  app.add_option("--stride", stride_override, "override output.stride");
  app.add_flag("--quiet", quiet, "suppress progress output");

  auto* run_cmd = app.add_subcommand("run", "run one simulation and the mandatory checks");
  auto* sweep_cmd = app.add_subcommand("sweep-eps", "run the eps list and the Cauchy study");
  auto* check_cmd = app.add_subcommand("check", "run the property suites without a simulation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }
  const std::string outdir = out_override.empty() ? cfg.output_dir : out_override;
  const int stride = stride_override > 0 ? stride_override : cfg.stride;

  try {
    if (run_cmd->parsed()) return cmd_run(cfg, outdir, stride, quiet);
    if (sweep_cmd->parsed()) return cmd_sweep_eps(cfg, outdir, stride, quiet);
    if (check_cmd->parsed()) return cmd_check(cfg, quiet);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return kExitHard;
  }
  return kExitConfig;
}
