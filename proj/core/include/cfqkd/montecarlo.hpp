#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "cfqkd/config.hpp"
#include "cfqkd/types.hpp"

// Pulse-level simulation of the protocol and of Eve's attacks.
//
// Light is tracked as coherent amplitudes per polarization: beam splitters
// act linearly on amplitudes (reflection sqrt(R), transmission i sqrt(T)),
// Bob's mirror adds a sign flip and losses scale amplitudes by the square
// root of the transmission. A detector fed with mean photon number m clicks
// with probability 1 - exp(-eta m). In single-photon mode the same
// intensities (with mu = 1) are outcome probabilities of one photon and at
// most one detector fires per pulse.

namespace cfqkd {

enum class Source { SinglePhoton, Coherent };

std::string_view to_string(Source s) noexcept;
Source parse_source(std::string_view text);

enum class DetectorMode { Normal, Blinded, ForcedClick };

struct EveAction {
  enum class Kind { None, BlindReduce, Measure };
  Kind kind = Kind::None;
  // BlindReduce: Eve's blinding polarization. Measure: polarization of the
  // photons Eve detected (meaningful when photons > 0).
  Polarization eve_pol = Polarization::H;
  std::uint32_t photons = 0;               // photon count of Eve's measurement (Measure or side measurement)

  std::string to_string() const;
};

struct PulseRecord {
  Polarization alice_pol = Polarization::H;
  Polarization bob_pol = Polarization::H;
  EveAction eve_action;
  bool d0_click = false;
  bool d1_click = false;
  bool d2_click = false;
  // ForcedClick if any polarization channel of the detector was triggered,
  // Blinded if every channel was blinded, Normal otherwise.
  DetectorMode d0_mode = DetectorMode::Normal;
  DetectorMode d1_mode = DetectorMode::Normal;
  DetectorMode d2_mode = DetectorMode::Normal;
  bool eve_knows_bob = false;
  bool eve_knows_alice = false;

  bool d0_blinded() const noexcept { return d0_mode != DetectorMode::Normal; }
  bool d1_blinded() const noexcept { return d1_mode != DetectorMode::Normal; }
  bool d2_blinded() const noexcept { return d2_mode != DetectorMode::Normal; }
  bool same_polarization() const noexcept { return alice_pol == bob_pol; }
};

/// CSV header of the pulse-record export.
std::string pulse_record_header();
std::string to_csv_line(const PulseRecord& r);

struct ClickCounts {
  std::uint64_t d0_same = 0;
  std::uint64_t d0_opp = 0;
  std::uint64_t d1 = 0;
  std::uint64_t d2 = 0;
  std::uint64_t d1_opp = 0;  // subset of d1 on different-polarization pulses
};

struct SimulationSummary {
  std::uint64_t pulses = 0;
  ClickCounts counts;
  DetectionStats empirical;  // counts / pulses
  std::uint64_t sifted_key_length = 0;  // pulses with a D1 click
  std::uint64_t bit_errors = 0;         // sifted bits where Bob disagrees with Alice
  std::uint64_t eve_correct = 0;        // sifted bits Eve reconstructs
  std::uint64_t blinded_clicks = 0;     // clicks on fully blinded detectors (always 0)
  double qber = 0.0;                    // 0 for an empty sifted key
  double eve_key_recovery = 0.0;        // 0 for an empty sifted key
};

/// Simulates individual pulses. Validates the scenario/source/config
/// combination on construction (ValidationError on mismatch).
class PulseSimulator {
 public:
  PulseSimulator(const ProtocolConfig& cfg, AttackScenario scenario, const AttackParams& params, Source source);

  /// Pulse `index` of the run keyed by `seed`; pure function of both.
  PulseRecord pulse(std::uint64_t seed, std::uint64_t index) const;

  const ProtocolConfig& config() const noexcept { return cfg_; }
  AttackScenario scenario() const noexcept { return scenario_; }
  const AttackParams& params() const noexcept { return params_; }
  Source source() const noexcept { return source_; }

 private:
  ProtocolConfig cfg_;
  AttackScenario scenario_;
  AttackParams params_;
  Source source_;
};

/// Runs `pulses` pulses split into contiguous batches over `workers`
/// threads (0: hardware concurrency). Identical inputs give identical
/// summaries for any worker count.
SimulationSummary simulate(const ProtocolConfig& cfg, AttackScenario scenario, const AttackParams& params,
                           Source source, std::uint64_t pulses, std::uint64_t seed, unsigned workers = 0);

/// Writes the header and one CSV line per pulse.
void write_pulse_records(std::ostream& out, const PulseSimulator& sim, std::uint64_t seed, std::uint64_t pulses);

struct StatComparison {
  enum class Status { Compared, ExactMatch, ExactMismatch };
  Status status = Status::Compared;
  double z = 0.0;  // (p_hat - p) / sqrt(p (1 - p) / n); 0 unless Compared
};

/// Per-statistic z-scores against expected probabilities, in the order
/// p_d0, p_d1, p_d2, p_d0_opp. Expected values of exactly 0 or 1 are
/// checked for an exact count instead.
std::array<StatComparison, 4> compare_to_analytic(const SimulationSummary& summary, const DetectionStats& expected);

}  // namespace cfqkd
