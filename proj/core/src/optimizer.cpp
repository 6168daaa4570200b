#include "cfqkd/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <tuple>

#include "cfqkd/analytic.hpp"
#include "cfqkd/errors.hpp"

namespace cfqkd {
namespace {

struct Candidate {
  double max_deviation = 0.0;
  double x = 0.0;
  double z = 0.0;
  bool valid = false;
};

// Strict weak order: (max_deviation, x, z) lexicographic.
bool better(const Candidate& a, const Candidate& b) {
  if (!b.valid) return a.valid;
  if (!a.valid) return false;
  return std::tie(a.max_deviation, a.x, a.z) < std::tie(b.max_deviation, b.x, b.z);
}

unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

class Evaluator {
 public:
  Evaluator(const ProtocolConfig& cfg, AttackScenario scenario)
      : cfg_(cfg), scenario_(scenario), baseline_(baseline_stats(cfg)) {}

  RatioReport report(const AttackParams& p) const {
    return ratio_report(attack_stats(cfg_, scenario_, p), baseline_);
  }

  // Scans xs x zs; returns the best candidate and adds to `count`.
  Candidate scan(const std::vector<double>& xs, const std::vector<double>& zs, unsigned workers,
                 std::size_t& count) const {
    workers = std::min<unsigned>(workers, static_cast<unsigned>(xs.size()));
    std::vector<Candidate> local(workers);
    auto run = [&](unsigned w) {
      Candidate best;
      for (std::size_t i = w; i < xs.size(); i += workers) {
        AttackParams p = complete_params(cfg_, scenario_, xs[i], 0.0);
        for (double z : zs) {
          if (scenario_ == AttackScenario::CombinedNoDisc) p.z = z;
          const Candidate c{report(p).max_deviation, p.x, p.z, true};
          if (better(c, best)) best = c;
        }
      }
      local[w] = best;
    };
    if (workers <= 1) {
      run(0);
    } else {
      std::vector<std::thread> threads;
      for (unsigned w = 0; w < workers; ++w) threads.emplace_back(run, w);
      for (auto& t : threads) t.join();
    }
    count += xs.size() * zs.size();
    Candidate best;
    for (const auto& c : local) {
      if (better(c, best)) best = c;
    }
    return best;
  }

 private:
  const ProtocolConfig& cfg_;
  AttackScenario scenario_;
  DetectionStats baseline_;
};

std::vector<double> neighbourhood(double centre, double step) {
  std::vector<double> out;
  const double fine = step / 10.0;
  for (int k = -10; k <= 10; ++k) {
    const double v = centre + k * fine;
    if (v >= 0.0 && v <= 1.0) out.push_back(v);
  }
  return out;
}

}  // namespace

std::vector<double> unit_grid(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw ValidationError("grid_step", "must lie in (0, 1]");
  std::vector<double> out;
  for (std::size_t k = 0;; ++k) {
    const double v = static_cast<double>(k) * step;
    if (v >= 1.0 - 1e-12) break;
    out.push_back(v);
  }
  out.push_back(1.0);
  return out;
}

AttackParams complete_params(const ProtocolConfig& cfg, AttackScenario scenario, double x, double z) {
  AttackParams p;
  p.x = x;
  p.y = solve_y(cfg, x);
  if (scenario == AttackScenario::CombinedNoDisc) p.z = z;
  if (scenario == AttackScenario::CombinedD0D2) p.z0 = solve_z0(cfg, x);
  return p;
}

OptimizationResult optimize(const ProtocolConfig& cfg, AttackScenario scenario, const OptimizerOptions& options) {
  if (!is_combined(scenario)) throw ValidationError("scenario", "optimize needs a combined attack scenario");
  if (required_discrimination(scenario) != cfg.discrimination())
    throw ValidationError("scenario", "does not match the config's discrimination setting");
  const auto xs = unit_grid(options.grid_step);
  const std::vector<double> z_axis =
      scenario == AttackScenario::CombinedNoDisc ? xs : std::vector<double>{0.0};

  const Evaluator eval(cfg, scenario);
  const unsigned workers = resolve_workers(options.workers);

  OptimizationResult result;
  result.scenario = scenario;
  result.grid_step = options.grid_step;

  const Candidate coarse = eval.scan(xs, z_axis, workers, result.evaluations);
  result.params = complete_params(cfg, scenario, coarse.x, coarse.z);
  result.report = eval.report(result.params);
  result.refined_params = result.params;
  result.refined_report = result.report;

  if (options.refine) {
    const auto fine_x = neighbourhood(coarse.x, options.grid_step);
    const auto fine_z = scenario == AttackScenario::CombinedNoDisc ? neighbourhood(coarse.z, options.grid_step)
                                                                   : std::vector<double>{0.0};
    const Candidate fine = eval.scan(fine_x, fine_z, workers, result.evaluations);
    if (better(fine, coarse)) {
      result.refined_params = complete_params(cfg, scenario, fine.x, fine.z);
      result.refined_report = eval.report(result.refined_params);
    }
  }
  return result;
}

std::vector<TableColumn> table_columns(ReferenceTable table) {
  std::vector<TableColumn> out;
  if (table == ReferenceTable::TableI) {
    for (double r : {0.5, 0.4, 0.1}) {
      RawConfig c{.mean_photon_number = 0.1,
                  .reflectivity = r,
                  .channel_transmission = 0.1,
                  .eve_channel_transmission = 1.2 * 0.1,
                  .eta_d0 = 0.1,
                  .eta_d1 = 0.1,
                  .eta_d2 = 0.1,
                  .eta_eve = 0.1};
      std::string label = "R=" + std::to_string(r).substr(0, 3);
      out.push_back({std::move(label), c});
    }
  } else {
    struct Col {
      const char* label;
      double sigma, sigma_eve, eta_eve;
    };
    for (const Col& col : {Col{"sigma=0.6 sigma'=0.72 etaE=0.9", 0.6, 0.72, 0.9},
                           Col{"sigma=sigma'=0.1 etaE=0.1", 0.1, 0.1, 0.1},
                           Col{"sigma=sigma'=0.1 etaE=0.9", 0.1, 0.1, 0.9}}) {
      RawConfig c{.mean_photon_number = 0.1,
                  .reflectivity = 0.5,
                  .channel_transmission = col.sigma,
                  .eve_channel_transmission = col.sigma_eve,
                  .eta_d0 = 0.1,
                  .eta_d1 = 0.1,
                  .eta_d2 = 0.1,
                  .eta_eve = col.eta_eve};
      out.push_back({col.label, c});
    }
  }
  return out;
}

std::vector<TableCell> reproduce_tables(ReferenceTable table, const OptimizerOptions& options) {
  const auto columns = table_columns(table);
  std::vector<TableCell> cells;
  for (Discrimination disc : kTableOrder) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      RawConfig raw = columns[i].config;
      raw.discrimination = disc;
      const ProtocolConfig cfg = validate_config(raw);
      cells.push_back({disc, i, columns[i].label, optimize(cfg, combined_scenario_for(disc), options)});
    }
  }
  return cells;
}

}  // namespace cfqkd
