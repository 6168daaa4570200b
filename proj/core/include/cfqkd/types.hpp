#pragma once

#include <array>
#include <string_view>

namespace cfqkd {

enum class Polarization { H, V };

constexpr Polarization orthogonal(Polarization p) noexcept {
  return p == Polarization::H ? Polarization::V : Polarization::H;
}

constexpr int index_of(Polarization p) noexcept { return p == Polarization::H ? 0 : 1; }

constexpr char to_char(Polarization p) noexcept { return p == Polarization::H ? 'H' : 'V'; }

/// Which of Alice's detectors resolve polarization. Bob's D2 is always
/// polarization selective through his switch.
enum class Discrimination { None, All, D1D2, D0D2 };

enum class AttackScenario {
  Baseline,
  BlindReduceLosses,
  CombinedNoDisc,
  CombinedFullDisc,
  CombinedD1D2,
  CombinedD0D2,
};

constexpr bool is_combined(AttackScenario s) noexcept {
  return s != AttackScenario::Baseline && s != AttackScenario::BlindReduceLosses;
}

/// The discrimination setting a combined attack is designed against.
constexpr Discrimination required_discrimination(AttackScenario s) noexcept {
  switch (s) {
    case AttackScenario::CombinedFullDisc:
      return Discrimination::All;
    case AttackScenario::CombinedD1D2:
      return Discrimination::D1D2;
    case AttackScenario::CombinedD0D2:
      return Discrimination::D0D2;
    default:
      return Discrimination::None;
  }
}

constexpr AttackScenario combined_scenario_for(Discrimination d) noexcept {
  switch (d) {
    case Discrimination::All:
      return AttackScenario::CombinedFullDisc;
    case Discrimination::D1D2:
      return AttackScenario::CombinedD1D2;
    case Discrimination::D0D2:
      return AttackScenario::CombinedD0D2;
    default:
      return AttackScenario::CombinedNoDisc;
  }
}

std::string_view to_string(Discrimination d) noexcept;
std::string_view to_string(AttackScenario s) noexcept;
Discrimination parse_discrimination(std::string_view text);
AttackScenario parse_scenario(std::string_view text);

/// Eve's strategy knobs. Fields a scenario does not use are carried as 0.
struct AttackParams {
  double x = 0.0;   // probability of measuring Alice's channel pulse
  double y = 0.0;   // forced D2 click probability with perfect information
  double z = 0.0;   // faked-state probability after a zero-photon measurement
  double z0 = 0.0;  // forced D0 click probability (D0D2 variant)

  /// Throws ValidationError if any field leaves [0, 1].
  void validate() const;
};

/// Per-pulse click probabilities. p_d0 and p_d1 count same-polarization
/// rounds, p_d0_opp counts different-polarization rounds; every value is
/// normalised by the total number of pulses, so the 1/2 choice probability
/// is built in.
struct DetectionStats {
  double p_d0 = 0.0;
  double p_d1 = 0.0;
  double p_d2 = 0.0;
  double p_d0_opp = 0.0;

  std::array<double, 4> values() const noexcept { return {p_d0, p_d1, p_d2, p_d0_opp}; }
};

inline constexpr std::array<std::string_view, 4> kStatNames = {"p_d0", "p_d1", "p_d2", "p_d0_opp"};

struct RatioReport {
  double r_d0 = 1.0;
  double r_d1 = 1.0;
  double r_d2 = 1.0;
  double r_d0_opp = 1.0;
  double max_deviation = 0.0;

  std::array<double, 4> ratios() const noexcept { return {r_d0, r_d1, r_d2, r_d0_opp}; }
};

}  // namespace cfqkd
