#include "belldice/sweep.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "belldice/format.hpp"
#include "belldice/randomness.hpp"
#include "belldice/rng.hpp"
#include "belldice/workers.hpp"

namespace belldice {

void SweepConfig::validate() const {
  if (!(eta_stop <= 1.0)) {
    raise(ErrorKind::kInvalidEfficiency, "sweep stop must be <= 1");
  }
  if (!(eta_start > 0.0 && eta_start <= eta_stop)) {
    raise(ErrorKind::kInvalidParameter,
          "sweep range must satisfy 0 < start <= stop <= 1");
  }
  if (!(eta_step > 0.0) || !std::isfinite(eta_step)) {
    raise(ErrorKind::kInvalidParameter, "sweep step must be finite and > 0");
  }
  if (restarts < 1) {
    raise(ErrorKind::kInvalidParameter, "restarts must be >= 1");
  }
  if (!(tol > 0.0) || !std::isfinite(tol)) {
    raise(ErrorKind::kInvalidParameter, "tolerance must be finite and > 0");
  }
}

std::vector<double> SweepConfig::grid() const {
  validate();
  const int count =
      static_cast<int>(std::floor((eta_stop - eta_start) / eta_step + 1e-9)) + 1;
  std::vector<double> etas(count);
  for (int i = 0; i < count; ++i) {
    etas[i] = std::min(eta_start + i * eta_step, eta_stop);
  }
  return etas;
}

std::vector<SweepRecord> run_sweep(const SweepConfig& config) {
  const std::vector<double> etas = config.grid();
  const int n = static_cast<int>(etas.size());
  std::vector<SweepRecord> records(n);
  const int workers = std::min(resolve_workers(config.workers), n);

  auto solve_point = [&](int i, const std::vector<std::array<double, 6>>& warm) {
    OptimizationProblem problem;
    problem.eta = etas[i];
    problem.eta_h = config.eta_h;
    problem.p_dc = config.p_dc;
    problem.restarts = config.restarts;
    problem.seed = derive_seed(config.seed, static_cast<uint64_t>(i));
    problem.tol = config.tol;
    problem.workers = 1;  // parallelism lives at the grid level
    problem.warm_starts = warm;

    SweepRecord rec;
    rec.eta = etas[i];
    const OptimizationResult r = optimize_chsh(problem);
    rec.s_opt = r.s_opt;
    rec.g_opt = r.params.g;
    rec.t_opt = r.params.t;
    rec.alpha1 = r.params.alpha1;
    rec.alpha2 = r.params.alpha2;
    rec.beta1 = r.params.beta1;
    rec.beta2 = r.params.beta2;
    rec.converged = r.converged;
    rec.h_min = min_entropy(std::min(r.s_opt, 2.0 * std::numbers::sqrt2));
    const SourceParams src = r.params.source(problem.herald_efficiency(), config.p_dc);
    rec.rate_pump = rate_pump_limited(src, std::min(r.s_opt, 2.0 * std::numbers::sqrt2));
    rec.rate_detection = rec.h_min;
    return rec;
  };

#pragma omp parallel num_threads(workers)
  {
#ifdef _OPENMP
    const int team = omp_get_num_threads();
    const int w = omp_get_thread_num();
#else
    const int team = 1;
    const int w = 0;
#endif
    // Contiguous chunks so warm starts chain within one worker only.
    const int begin = static_cast<int>(static_cast<long>(n) * w / team);
    const int end = static_cast<int>(static_cast<long>(n) * (w + 1) / team);
    std::vector<std::array<double, 6>> warm;
    for (int i = begin; i < end; ++i) {
      records[i] = solve_point(i, warm);
      if (config.warm_start) {
        warm.assign(1, {records[i].g_opt, records[i].t_opt, records[i].alpha1,
                        records[i].alpha2, records[i].beta1, records[i].beta2});
      }
    }
  }
  return records;
}

std::string sweep_csv(const std::vector<SweepRecord>& records) {
  std::ostringstream os;
  os << "eta,s_opt,g_opt,t_opt,alpha1,alpha2,beta1,beta2,h_min,rate_pump,"
        "rate_detection,converged\n";
  for (const SweepRecord& r : records) {
    os << format_g17(r.eta) << ',' << format_g17(r.s_opt) << ',' << format_g17(r.g_opt)
       << ',' << format_g17(r.t_opt) << ',' << format_g17(r.alpha1) << ','
       << format_g17(r.alpha2) << ',' << format_g17(r.beta1) << ','
       << format_g17(r.beta2) << ',' << format_g17(r.h_min) << ','
       << format_g17(r.rate_pump) << ',' << format_g17(r.rate_detection) << ','
       << (r.converged ? "true" : "false") << '\n';
  }
  return os.str();
}

std::string sweep_json(const std::vector<SweepRecord>& records) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const SweepRecord& r : records) {
    nlohmann::ordered_json row;
    row["eta"] = r.eta;
    row["s_opt"] = r.s_opt;
    row["g_opt"] = r.g_opt;
    row["t_opt"] = r.t_opt;
    row["alpha1"] = r.alpha1;
    row["alpha2"] = r.alpha2;
    row["beta1"] = r.beta1;
    row["beta2"] = r.beta2;
    row["h_min"] = r.h_min;
    row["rate_pump"] = r.rate_pump;
    row["rate_detection"] = r.rate_detection;
    row["converged"] = r.converged;
    arr.push_back(std::move(row));
  }
  return arr.dump(2) + "\n";
}

}  // namespace belldice
