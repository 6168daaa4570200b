#include "cfqkd/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cfqkd/errors.hpp"

namespace cfqkd {
namespace {

// 1 - exp(-m) without cancellation for small m.
double click(double m) { return -std::expm1(-m); }

double d2_term(const ProtocolConfig& c, double sigma) {
  return click(c.eta_d2() * sigma * c.transmissivity() * c.mean_photon_number());
}
double d0_same_term(const ProtocolConfig& c) {
  const double s = c.channel_transmission();
  return click(c.eta_d0() * s * s * c.reflectivity() * c.reflectivity() * c.mean_photon_number());
}
double d1_term(const ProtocolConfig& c) {
  const double s = c.channel_transmission();
  return click(c.eta_d1() * s * s * c.reflectivity() * c.transmissivity() * c.mean_photon_number());
}
double d0_opp_term(const ProtocolConfig& c) {
  const double s = c.channel_transmission();
  return click(c.eta_d0() * s * s * c.mean_photon_number());
}

// Probability Eve's detector sees nothing in Alice's channel pulse.
double eve_vacuum(const ProtocolConfig& c) {
  return std::exp(-c.eta_eve() * c.transmissivity() * c.mean_photon_number());
}

// Rate Eve can add by forcing clicks on perfect-information rounds.
double forcing_capacity(const ProtocolConfig& c, double x) {
  return 0.5 * x * click(c.eta_eve() * c.transmissivity() * c.mean_photon_number());
}

double clamp_fraction(double gap, double cap) {
  if (cap == 0.0 || gap >= cap) return 1.0;
  return std::clamp(gap / cap, 0.0, 1.0);
}

void check_x(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("x", "must lie in [0, 1]");
}

}  // namespace

DetectionStats baseline_stats(const ProtocolConfig& cfg) {
  return DetectionStats{
      .p_d0 = 0.5 * d0_same_term(cfg),
      .p_d1 = 0.5 * d1_term(cfg),
      .p_d2 = 0.5 * d2_term(cfg, cfg.channel_transmission()),
      .p_d0_opp = 0.5 * d0_opp_term(cfg),
  };
}

DetectionStats single_photon_stats(const ProtocolConfig& cfg) {
  const double s = cfg.channel_transmission();
  const double r = cfg.reflectivity();
  const double t = cfg.transmissivity();
  return DetectionStats{
      .p_d0 = 0.5 * cfg.eta_d0() * r * r * s * s,
      .p_d1 = 0.5 * cfg.eta_d1() * r * t * s * s,
      .p_d2 = 0.5 * cfg.eta_d2() * t * s,
      .p_d0_opp = 0.5 * cfg.eta_d0() * s * s,
  };
}

DetectionStats attack_stats(const ProtocolConfig& cfg, AttackScenario scenario, const AttackParams& params) {
  if (!is_combined(scenario))
    throw ValidationError("scenario", std::string(to_string(scenario)) + " has no closed-form attack statistics");
  if (required_discrimination(scenario) != cfg.discrimination())
    throw ValidationError("scenario", std::string(to_string(scenario)) + " does not match discrimination '" +
                                          std::string(to_string(cfg.discrimination())) + "'");
  params.validate();

  const double x = params.x;
  const double q = eve_vacuum(cfg);
  const DetectionStats base = baseline_stats(cfg);

  DetectionStats out;
  out.p_d2 = 0.25 * (1.0 - x) * d2_term(cfg, cfg.eve_channel_transmission()) + forcing_capacity(cfg, x) * params.y;

  switch (scenario) {
    case AttackScenario::CombinedNoDisc: {
      // Faked state orthogonal to Bob's choice, same amplitude as Alice's.
      const double s2mu = cfg.channel_transmission() * cfg.channel_transmission() * cfg.mean_photon_number();
      const double r = cfg.reflectivity();
      const double t = cfg.transmissivity();
      const double faked = 0.5 * x * q * params.z;
      out.p_d0 = 0.5 * (1.0 - x) * d0_same_term(cfg) + faked * click(cfg.eta_d0() * s2mu * (r * r + t * t));
      out.p_d1 = 0.5 * (1.0 - x) * d1_term(cfg) + faked * click(cfg.eta_d1() * s2mu * 2.0 * r * t);
      out.p_d0_opp = 0.5 * (1.0 - x * q * (1.0 - params.z)) * d0_opp_term(cfg);
      break;
    }
    case AttackScenario::CombinedFullDisc:
      out.p_d0 = base.p_d0;
      out.p_d1 = base.p_d1;
      out.p_d0_opp = 0.5 * (1.0 - x * q) * d0_opp_term(cfg);
      break;
    case AttackScenario::CombinedD1D2:
      out.p_d0 = 0.5 * (1.0 - x * q) * d0_same_term(cfg);
      out.p_d1 = base.p_d1;
      out.p_d0_opp = 0.5 * (1.0 - x * q) * d0_opp_term(cfg);
      break;
    case AttackScenario::CombinedD0D2:
      out.p_d0 = base.p_d0;
      out.p_d1 = 0.5 * (1.0 - x * q) * d1_term(cfg);
      out.p_d0_opp = 0.5 * (1.0 - x) * d0_opp_term(cfg) + forcing_capacity(cfg, x) * params.z0;
      break;
    default:
      break;
  }
  return out;
}

double solve_y(const ProtocolConfig& cfg, double x) {
  check_x(x);
  const double gap = baseline_stats(cfg).p_d2 - 0.25 * (1.0 - x) * d2_term(cfg, cfg.eve_channel_transmission());
  return clamp_fraction(gap, forcing_capacity(cfg, x));
}

double solve_z0(const ProtocolConfig& cfg, double x) {
  check_x(x);
  const double gap = baseline_stats(cfg).p_d0_opp - 0.5 * (1.0 - x) * d0_opp_term(cfg);
  return clamp_fraction(gap, forcing_capacity(cfg, x));
}

RatioReport ratio_report(const DetectionStats& attack, const DetectionStats& baseline) {
  const auto a = attack.values();
  const auto b = baseline.values();
  std::array<double, 4> r{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (b[i] == 0.0)
      throw DegenerateBaseline("baseline " + std::string(kStatNames[i]) + " is zero; ratio undefined");
    r[i] = a[i] / b[i];
  }
  RatioReport out{r[0], r[1], r[2], r[3], 0.0};
  for (double v : r) out.max_deviation = std::max(out.max_deviation, std::abs(v - 1.0));
  return out;
}

double loss_fluctuation_equivalent(const ProtocolConfig& cfg, double deviation) {
  if (!(deviation > 0.0 && deviation < 1.0)) throw ValidationError("deviation", "must lie in (0, 1)");
  const DetectionStats base = baseline_stats(cfg);
  auto smallest_change = [&](double delta_db) {
    const ProtocolConfig perturbed =
        cfg.with_channel_transmission(cfg.channel_transmission() * std::pow(10.0, -delta_db / 10.0));
    const auto ratios = ratio_report(baseline_stats(perturbed), base).ratios();
    double m = std::abs(ratios[0] - 1.0);
    for (double r : ratios) m = std::min(m, std::abs(r - 1.0));
    return m;
  };

  // Every statistic drops monotonically with added loss, so the minimum
  // deviation is increasing in delta.
  constexpr double kMaxDb = 3.0;
  double lo = 0.0;
  double hi = kMaxDb;
  if (smallest_change(hi) < deviation)
    throw ValidationError("deviation", "not reachable within " + std::to_string(kMaxDb) + " dB");
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (smallest_change(mid) < deviation ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace cfqkd
