#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "belldice/equivalence.hpp"
#include "belldice/format.hpp"
#include "belldice/optimizer.hpp"
#include "belldice/povm.hpp"
#include "belldice/randomness.hpp"
#include "belldice/sweep.hpp"

namespace {

using belldice::ErrorKind;
using ordered_json = nlohmann::ordered_json;

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    belldice::raise(ErrorKind::kIoError, "cannot open for writing: " + path);
  }
  out << content;
  out.flush();
  if (!out.good()) {
    belldice::raise(ErrorKind::kIoError, "write failed: " + path);
  }
}

belldice::SweepRecord record_from(const belldice::OptimizationResult& r, double eta,
                                  double eta_h, double p_dc) {
  belldice::SweepRecord rec;
  rec.eta = eta;
  rec.s_opt = r.s_opt;
  rec.g_opt = r.params.g;
  rec.t_opt = r.params.t;
  rec.alpha1 = r.params.alpha1;
  rec.alpha2 = r.params.alpha2;
  rec.beta1 = r.params.beta1;
  rec.beta2 = r.params.beta2;
  rec.converged = r.converged;
  const double s = std::min(r.s_opt, 2.0 * std::numbers::sqrt2);
  rec.h_min = belldice::min_entropy(s);
  rec.rate_pump = belldice::rate_pump_limited(r.params.source(eta_h, p_dc), s);
  rec.rate_detection = belldice::rate_detection_limited(s);
  return rec;
}

struct CommonOptimizeFlags {
  double eta = 1.0;
  std::optional<double> eta_h;
  double p_dc = 0.0;
  int restarts = 64;
  uint64_t seed = 1;
  double tol = 1e-9;
  int workers = 0;

  void attach(CLI::App* sub, bool with_eta) {
    if (with_eta) {
      sub->add_option("--eta", eta, "detection efficiency")
          ->check(CLI::Range(0.0, 1.0))
          ->capture_default_str();
    }
    sub->add_option("--eta-h", eta_h,
                    "herald detector efficiency (defaults to --eta)")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--pdc", p_dc, "herald dark-count probability per trial")
        ->check(CLI::Range(0.0, 0.999999))
        ->capture_default_str();
    sub->add_option("--restarts", restarts, "multistart count")
        ->check(CLI::Range(1, 1000000))
        ->capture_default_str();
    sub->add_option("--seed", seed, "seed for the quasirandom start set")
        ->capture_default_str();
    sub->add_option("--tol", tol, "optimizer objective tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--workers", workers,
                    "parallel workers (0: BELLDICE_WORKERS or hardware)")
        ->check(CLI::Range(0, 4096))
        ->capture_default_str();
  }

  belldice::OptimizationProblem problem() const {
    belldice::OptimizationProblem p;
    p.eta = eta;
    p.eta_h = eta_h;
    p.p_dc = p_dc;
    p.restarts = restarts;
    p.seed = seed;
    p.tol = tol;
    p.workers = workers;
    return p;
  }
};

std::string optimize_json(const belldice::OptimizationResult& r,
                          const belldice::SweepRecord& rec, double eta_h,
                          double p_dc) {
  ordered_json j;
  j["eta"] = rec.eta;
  j["eta_h"] = eta_h;
  j["p_dc"] = p_dc;
  j["s_opt"] = rec.s_opt;
  j["g_opt"] = rec.g_opt;
  j["t_opt"] = rec.t_opt;
  j["alpha1"] = rec.alpha1;
  j["alpha2"] = rec.alpha2;
  j["beta1"] = rec.beta1;
  j["beta2"] = rec.beta2;
  j["h_min"] = rec.h_min;
  j["rate_pump"] = rec.rate_pump;
  j["rate_detection"] = rec.rate_detection;
  j["strategy_a"] = r.strategy.s_a;
  j["strategy_b"] = r.strategy.s_b;
  j["converged"] = rec.converged;
  j["evaluations"] = r.evaluations;
  return j.dump(2) + "\n";
}

std::string trajectory_json(double eta, const std::vector<double>& grid) {
  ordered_json arr = ordered_json::array();
  for (double a : grid) {
    const belldice::ExtremalDecomposition d =
        belldice::extremal_decomposition({a, 0.0, eta});
    ordered_json row;
    row["alpha"] = a;
    row["mu"] = d.mu;
    row["nx"] = d.n_vec.x();
    row["ny"] = d.n_vec.y();
    row["nz"] = d.n_vec.z();
    row["mu_nx"] = d.mu * d.n_vec.x();
    row["mu_ny"] = d.mu * d.n_vec.y();
    row["mu_nz"] = d.mu * d.n_vec.z();
    arr.push_back(std::move(row));
  }
  return arr.dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bell violation and certified randomness of a heralded photon "
               "with displacement-based click detection"};
  app.require_subcommand(1);
  // Config handling lives on the root app: keys sit in a [subcommand]
  // section, flags given on the command line win. Subcommands fall through so
  // --config may appear after the subcommand name.
  app.set_config("--config", "",
                 "key=value file with [subcommand] sections; flags win");

  // optimize
  auto* opt = app.add_subcommand("optimize", "maximize the CHSH value");
  opt->fallthrough();
  CommonOptimizeFlags opt_flags;
  opt_flags.attach(opt, true);
  std::string opt_out, opt_format = "json";
  opt->add_option("--out", opt_out, "output path (default: stdout)");
  opt->add_option("--format", opt_format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  // sweep
  auto* swp = app.add_subcommand("sweep", "optimize across a detection-efficiency grid");
  swp->fallthrough();
  belldice::SweepConfig sweep_cfg;
  CommonOptimizeFlags swp_flags;
  swp_flags.attach(swp, false);
  swp->add_option("--eta-start", sweep_cfg.eta_start, "grid start")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  swp->add_option("--eta-stop", sweep_cfg.eta_stop, "grid end (inclusive)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  swp->add_option("--eta-step", sweep_cfg.eta_step, "grid spacing")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bool no_warm = false;
  swp->add_flag("--no-warm-start", no_warm, "forget the previous grid point's optimum");
  std::string swp_out, swp_format = "csv";
  swp->add_option("--out", swp_out, "output path (default: stdout)");
  swp->add_option("--format", swp_format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  // trajectory
  auto* trj = app.add_subcommand(
      "trajectory", "measurement-direction path on the Bloch ball vs displacement");
  trj->fallthrough();
  double trj_eta = 0.0, trj_alpha_max = 4.0;
  int trj_steps = 401;
  trj->add_option("--eta", trj_eta, "detector efficiency")
      ->check(CLI::Range(0.0, 1.0))
      ->required();
  trj->add_option("--alpha-max", trj_alpha_max, "largest displacement magnitude")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  trj->add_option("--steps", trj_steps, "grid points from 0 to alpha-max")
      ->check(CLI::Range(2, 1000000))
      ->capture_default_str();
  std::string trj_out, trj_format = "csv";
  trj->add_option("--out", trj_out, "output path (default: stdout)");
  trj->add_option("--format", trj_format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  // oracle-check
  auto* chk = app.add_subcommand(
      "oracle-check", "compare closed forms against the Fock-space reference");
  chk->fallthrough();
  belldice::EquivalenceOptions chk_opts;
  std::optional<int> chk_n_max;
  chk->add_option("--samples", chk_opts.samples, "number of random parameter draws")
      ->check(CLI::Range(1, 1000000))
      ->capture_default_str();
  chk->add_option("--seed", chk_opts.seed, "sampling seed")->capture_default_str();
  chk->add_option("--tol", chk_opts.tol, "largest accepted deviation")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  chk->add_option("--n-max", chk_n_max,
                  "pin the Fock truncation instead of growing it automatically")
      ->check(CLI::Range(1, 200));
  chk->add_option("--workers", chk_opts.workers,
                  "parallel workers (0: BELLDICE_WORKERS or hardware)")
      ->check(CLI::Range(0, 4096));
  std::string chk_out;
  chk->add_option("--out", chk_out, "output path (default: stdout)");

  try {
    app.parse(argc, argv);

    if (opt->parsed()) {
      const belldice::OptimizationResult r = belldice::optimize_chsh(opt_flags.problem());
      const double eta_h = opt_flags.problem().herald_efficiency();
      const belldice::SweepRecord rec =
          record_from(r, opt_flags.eta, eta_h, opt_flags.p_dc);
      const std::string text = opt_format == "csv"
                                   ? belldice::sweep_csv({rec})
                                   : optimize_json(r, rec, eta_h, opt_flags.p_dc);
      write_output(opt_out, text);
      return 0;
    }

    if (swp->parsed()) {
      sweep_cfg.eta_h = swp_flags.eta_h;
      sweep_cfg.p_dc = swp_flags.p_dc;
      sweep_cfg.restarts = swp_flags.restarts;
      sweep_cfg.seed = swp_flags.seed;
      sweep_cfg.tol = swp_flags.tol;
      sweep_cfg.workers = swp_flags.workers;
      sweep_cfg.warm_start = !no_warm;
      const std::vector<belldice::SweepRecord> records = belldice::run_sweep(sweep_cfg);
      const std::string text = swp_format == "json" ? belldice::sweep_json(records)
                                                    : belldice::sweep_csv(records);
      write_output(swp_out, text);
      return 0;
    }

    if (trj->parsed()) {
      std::vector<double> grid(trj_steps);
      for (int i = 0; i < trj_steps; ++i) {
        grid[i] = trj_alpha_max * static_cast<double>(i) / (trj_steps - 1);
      }
      const std::string text = trj_format == "json"
                                   ? trajectory_json(trj_eta, grid)
                                   : belldice::trajectory_csv(trj_eta, grid);
      write_output(trj_out, text);
      return 0;
    }

    if (chk->parsed()) {
      if (chk_n_max) {
        chk_opts.oracle.n_max = *chk_n_max;
        chk_opts.oracle.auto_raise = false;
      }
      const belldice::EquivalenceReport report = belldice::run_oracle_equivalence(chk_opts);
      write_output(chk_out, report.summary(chk_opts.tol));
      return report.passed(chk_opts.tol) ? 0 : 1;
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const belldice::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::kIoError ? 2 : 3;
  }
  return 0;
}
