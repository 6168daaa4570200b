#include "cfqkd/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>
#include <sstream>
#include <thread>
#include <vector>

#include "cfqkd/counter_stream.hpp"
#include "cfqkd/errors.hpp"

namespace cfqkd {
namespace {

using Amp = std::complex<double>;
constexpr Amp kI{0.0, 1.0};

// One of Alice's detectors seen as two polarization channels. Detectors
// without polarization discrimination are always blinded as a whole.
struct AliceDetector {
  std::array<DetectorMode, 2> mode{DetectorMode::Normal, DetectorMode::Normal};

  void blind_all() { mode = {DetectorMode::Blinded, DetectorMode::Blinded}; }
  void blind(Polarization p) { mode[index_of(p)] = DetectorMode::Blinded; }

  DetectorMode aggregate() const {
    if (mode[0] == DetectorMode::ForcedClick || mode[1] == DetectorMode::ForcedClick) return DetectorMode::ForcedClick;
    if (mode[0] == DetectorMode::Blinded && mode[1] == DetectorMode::Blinded) return DetectorMode::Blinded;
    return DetectorMode::Normal;
  }
  bool forced() const { return aggregate() == DetectorMode::ForcedClick; }

  // Mean photon number reaching the channels that are still in Geiger mode.
  double visible(const std::array<double, 2>& intensity) const {
    double m = 0.0;
    for (int p = 0; p < 2; ++p) {
      if (mode[p] == DetectorMode::Normal) m += intensity[p];
    }
    return m;
  }
};

// Optical state of one pulse just before detection.
struct PulseOptics {
  // Amplitudes entering Alice's beam splitter on the way back, per
  // polarization: `retained` from her delay line, `returned` from the channel.
  std::array<Amp, 2> retained{};
  std::array<Amp, 2> returned{};
  double d2_mean = 0.0;  // light of Bob's polarization reaching D2
  AliceDetector d0;
  AliceDetector d1;
  DetectorMode d2_mode = DetectorMode::Normal;
};

double click_probability(double eta, double mean) { return -std::expm1(-eta * mean); }

}  // namespace

std::string_view to_string(Source s) noexcept {
  return s == Source::SinglePhoton ? "single-photon" : "coherent";
}

Source parse_source(std::string_view text) {
  if (text == "single-photon") return Source::SinglePhoton;
  if (text == "coherent") return Source::Coherent;
  throw ValidationError("source", "expected single-photon|coherent, got '" + std::string(text) + "'");
}

std::string EveAction::to_string() const {
  switch (kind) {
    case Kind::None:
      return "none";
    case Kind::BlindReduce:
      return std::string("blind_reduce:") + to_char(eve_pol);
    case Kind::Measure:
      return "measure:" + std::to_string(photons);
  }
  return "none";
}

std::string pulse_record_header() {
  return "alice_pol,bob_pol,eve_action,d0_click,d1_click,d2_click,d0_blinded,d1_blinded,d2_blinded,"
         "eve_knows_bob,eve_knows_alice";
}

std::string to_csv_line(const PulseRecord& r) {
  std::string s;
  s += to_char(r.alice_pol);
  s += ',';
  s += to_char(r.bob_pol);
  s += ',';
  s += r.eve_action.to_string();
  for (bool b : {r.d0_click, r.d1_click, r.d2_click, r.d0_blinded(), r.d1_blinded(), r.d2_blinded(),
                 r.eve_knows_bob, r.eve_knows_alice}) {
    s += ',';
    s += b ? '1' : '0';
  }
  return s;
}

PulseSimulator::PulseSimulator(const ProtocolConfig& cfg, AttackScenario scenario, const AttackParams& params,
                               Source source)
    : cfg_(cfg), scenario_(scenario), params_(params), source_(source) {
  params_.validate();
  if (is_combined(scenario)) {
    if (source == Source::SinglePhoton)
      throw ValidationError("source", "combined attacks need a coherent source");
    if (required_discrimination(scenario) != cfg.discrimination())
      throw ValidationError("scenario", std::string(to_string(scenario)) + " does not match discrimination '" +
                                            std::string(to_string(cfg.discrimination())) + "'");
  }
  if (scenario == AttackScenario::BlindReduceLosses && 2.0 * cfg.channel_transmission() > 1.0)
    throw ValidationError("channel_transmission", "blind-reduce needs a channel Eve can make twice as transparent");
}

PulseRecord PulseSimulator::pulse(std::uint64_t seed, std::uint64_t index) const {
  CounterStream rng(seed, index);
  PulseRecord rec;
  rec.alice_pol = rng.bernoulli(0.5) ? Polarization::V : Polarization::H;
  rec.bob_pol = rng.bernoulli(0.5) ? Polarization::V : Polarization::H;

  const Polarization A = rec.alice_pol;
  const Polarization B = rec.bob_pol;
  const bool same = A == B;
  const double mu = source_ == Source::SinglePhoton ? 1.0 : cfg_.mean_photon_number();
  const double alpha = std::sqrt(mu);
  const double R = cfg_.reflectivity();
  const double T = cfg_.transmissivity();
  const double sigma = cfg_.channel_transmission();

  PulseOptics opt;
  // Alice's delay line is matched to the roundtrip loss sigma^2.
  opt.retained[index_of(A)] = std::sqrt(R) * sigma * alpha;
  // Light returning from the channel with the expected roundtrip loss and
  // the sign flip of Bob's mirror; also what Eve's faked states imitate.
  const Amp expected_return = -kI * std::sqrt(T) * sigma * alpha;

  // Eve's blind-and-reduce-losses step over a channel of one-way
  // transmission `link`: Bob is blinded in Eve's random polarization, Eve
  // learns Bob's choice from whether her light returns, the stored pulse
  // Bob should have measured is blocked, and every returned pulse is
  // attenuated back to a sigma^2 roundtrip.
  auto blind_and_reduce = [&](double link, bool side_measure) {
    const Polarization E = rng.bernoulli(0.5) ? Polarization::V : Polarization::H;
    rec.eve_action = {EveAction::Kind::BlindReduce, E, 0};
    rec.eve_knows_bob = true;
    if (E == B) opt.d2_mode = DetectorMode::Blinded;
    if (same) {
      if (E != B) {
        opt.d2_mean = T * link * mu;
      } else if (side_measure) {
        // Mimic Bob on the stored pulse; only informative.
        rec.eve_action.photons = rng.poisson(cfg_.eta_eve() * T * mu);
        rec.eve_knows_alice = rec.eve_action.photons > 0;
      }
    } else {
      opt.returned[index_of(A)] = expected_return;
    }
  };

  switch (scenario_) {
    case AttackScenario::Baseline:
      if (same) {
        opt.d2_mean = T * sigma * mu;
      } else {
        opt.returned[index_of(A)] = expected_return;
      }
      break;

    case AttackScenario::BlindReduceLosses:
      blind_and_reduce(2.0 * sigma, false);
      break;

    default: {
      const bool measure = rng.bernoulli(params_.x);
      if (!measure) {
        blind_and_reduce(cfg_.eve_channel_transmission(), true);
        break;
      }
      // Eve intercepts Alice's whole channel pulse.
      const std::uint32_t photons = rng.poisson(cfg_.eta_eve() * T * mu);
      rec.eve_action = {EveAction::Kind::Measure, A, photons};
      rec.eve_knows_bob = true;
      const Discrimination disc = cfg_.discrimination();

      if (photons > 0) {
        // Perfect information: bright light in Alice's polarization.
        rec.eve_knows_alice = true;
        if (same) {
          opt.d2_mode = rng.bernoulli(params_.y) ? DetectorMode::ForcedClick : DetectorMode::Blinded;
          if (disc == Discrimination::None) {
            opt.d0.blind_all();
            opt.d1.blind_all();
          }
        } else if (disc == Discrimination::D0D2) {
          opt.d1.blind_all();
          opt.d0.blind_all();
          if (rng.bernoulli(params_.z0)) opt.d0.mode[index_of(A)] = DetectorMode::ForcedClick;
        } else {
          opt.returned[index_of(A)] = expected_return;
        }
        break;
      }

      // Vacuum: blind Bob diagonally and learn his choice from the return.
      opt.d2_mode = DetectorMode::Blinded;
      const Polarization other = orthogonal(B);
      switch (disc) {
        case Discrimination::None:
          if (rng.bernoulli(params_.z)) {
            opt.returned[index_of(other)] = expected_return;
          } else {
            opt.d0.blind_all();
            opt.d1.blind_all();
          }
          break;
        case Discrimination::All:
          opt.d0.blind(other);
          opt.d1.blind(other);
          break;
        case Discrimination::D1D2:
          opt.d0.blind_all();
          opt.d1.blind(other);
          break;
        case Discrimination::D0D2:
          opt.d0.blind(other);
          opt.d1.blind_all();
          break;
      }
      break;
    }
  }

  // Second pass through Alice's beam splitter.
  std::array<double, 2> at_d0{};
  std::array<double, 2> at_d1{};
  for (int p = 0; p < 2; ++p) {
    at_d0[p] = std::norm(std::sqrt(R) * opt.retained[p] + kI * std::sqrt(T) * opt.returned[p]);
    at_d1[p] = std::norm(kI * std::sqrt(T) * opt.retained[p] + std::sqrt(R) * opt.returned[p]);
  }
  const double d2_visible = opt.d2_mode == DetectorMode::Normal ? opt.d2_mean : 0.0;

  const double u0 = rng.uniform();
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  if (source_ == Source::SinglePhoton) {
    // One photon: outcomes are exclusive.
    const double p2 = cfg_.eta_d2() * d2_visible;
    const double p0 = cfg_.eta_d0() * opt.d0.visible(at_d0);
    const double p1 = cfg_.eta_d1() * opt.d1.visible(at_d1);
    rec.d2_click = u0 < p2;
    rec.d0_click = !rec.d2_click && u0 < p2 + p0;
    rec.d1_click = !rec.d2_click && !rec.d0_click && u0 < p2 + p0 + p1;
  } else {
    rec.d0_click = opt.d0.forced() || u0 < click_probability(cfg_.eta_d0(), opt.d0.visible(at_d0));
    rec.d1_click = opt.d1.forced() || u1 < click_probability(cfg_.eta_d1(), opt.d1.visible(at_d1));
    rec.d2_click = opt.d2_mode == DetectorMode::ForcedClick || u2 < click_probability(cfg_.eta_d2(), d2_visible);
  }
  rec.d0_mode = opt.d0.aggregate();
  rec.d1_mode = opt.d1.aggregate();
  rec.d2_mode = opt.d2_mode;
  return rec;
}

namespace {

struct Tally {
  ClickCounts counts;
  std::uint64_t sifted = 0;
  std::uint64_t errors = 0;
  std::uint64_t eve_correct = 0;
  std::uint64_t blinded_clicks = 0;

  void add(const Tally& o) {
    counts.d0_same += o.counts.d0_same;
    counts.d0_opp += o.counts.d0_opp;
    counts.d1 += o.counts.d1;
    counts.d2 += o.counts.d2;
    counts.d1_opp += o.counts.d1_opp;
    sifted += o.sifted;
    errors += o.errors;
    eve_correct += o.eve_correct;
    blinded_clicks += o.blinded_clicks;
  }
};

void tally_pulse(Tally& t, const PulseRecord& r, std::uint64_t seed, std::uint64_t index) {
  if (r.d0_click) ++(r.same_polarization() ? t.counts.d0_same : t.counts.d0_opp);
  if (r.d1_click) {
    ++t.counts.d1;
    if (!r.same_polarization()) ++t.counts.d1_opp;
  }
  if (r.d2_click) ++t.counts.d2;
  t.blinded_clicks += (r.d0_click && r.d0_mode == DetectorMode::Blinded) +
                      (r.d1_click && r.d1_mode == DetectorMode::Blinded) +
                      (r.d2_click && r.d2_mode == DetectorMode::Blinded);
  if (!r.d1_click) return;

  // Key bit: H -> 0, V -> 1 for Alice's polarization. Bob's switch
  // polarization equals Alice's on every D1 round.
  ++t.sifted;
  const int alice_bit = index_of(r.alice_pol);
  const int bob_bit = index_of(r.bob_pol);
  int eve_bit = 0;
  if (r.eve_knows_alice) {
    eve_bit = index_of(r.eve_action.eve_pol);
  } else if (r.eve_knows_bob) {
    eve_bit = bob_bit;
  } else {
    // No knowledge: a coin from a stream disjoint from the pulse's own.
    eve_bit = static_cast<int>(CounterStream(~seed, index).next() & 1u);
  }
  if (bob_bit != alice_bit) ++t.errors;
  if (eve_bit == alice_bit) ++t.eve_correct;
}

unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

SimulationSummary simulate(const ProtocolConfig& cfg, AttackScenario scenario, const AttackParams& params,
                           Source source, std::uint64_t pulses, std::uint64_t seed, unsigned workers) {
  if (pulses == 0) throw ValidationError("pulses", "must be >= 1");
  const PulseSimulator sim(cfg, scenario, params, source);

  const std::uint64_t n_workers = std::min<std::uint64_t>(resolve_workers(workers), pulses);
  std::vector<Tally> partial(n_workers);
  auto run = [&](std::uint64_t w) {
    const std::uint64_t begin = pulses * w / n_workers;
    const std::uint64_t end = pulses * (w + 1) / n_workers;
    Tally& t = partial[w];
    for (std::uint64_t i = begin; i < end; ++i) tally_pulse(t, sim.pulse(seed, i), seed, i);
  };
  if (n_workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> threads;
    for (std::uint64_t w = 0; w < n_workers; ++w) threads.emplace_back(run, w);
    for (auto& th : threads) th.join();
  }
  Tally total;
  for (const auto& t : partial) total.add(t);

  SimulationSummary s;
  s.pulses = pulses;
  s.counts = total.counts;
  const double n = static_cast<double>(pulses);
  s.empirical = DetectionStats{total.counts.d0_same / n, total.counts.d1 / n, total.counts.d2 / n,
                               total.counts.d0_opp / n};
  s.sifted_key_length = total.sifted;
  s.bit_errors = total.errors;
  s.eve_correct = total.eve_correct;
  s.blinded_clicks = total.blinded_clicks;
  if (total.sifted > 0) {
    s.qber = static_cast<double>(total.errors) / static_cast<double>(total.sifted);
    s.eve_key_recovery = static_cast<double>(total.eve_correct) / static_cast<double>(total.sifted);
  }
  return s;
}

void write_pulse_records(std::ostream& out, const PulseSimulator& sim, std::uint64_t seed, std::uint64_t pulses) {
  out << pulse_record_header() << '\n';
  for (std::uint64_t i = 0; i < pulses; ++i) out << to_csv_line(sim.pulse(seed, i)) << '\n';
}

std::array<StatComparison, 4> compare_to_analytic(const SimulationSummary& summary, const DetectionStats& expected) {
  if (summary.pulses == 0) throw ValidationError("pulses", "summary is empty");
  const auto c = summary.counts;
  const std::array<std::uint64_t, 4> counts = {c.d0_same, c.d1, c.d2, c.d0_opp};
  const auto p = expected.values();
  const double n = static_cast<double>(summary.pulses);

  std::array<StatComparison, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (!(p[i] >= 0.0 && p[i] <= 1.0))
      throw ValidationError(std::string(kStatNames[i]), "expected probability outside [0, 1]");
    if (p[i] == 0.0 || p[i] == 1.0) {
      const std::uint64_t exact = p[i] == 0.0 ? 0 : summary.pulses;
      out[i].status =
          counts[i] == exact ? StatComparison::Status::ExactMatch : StatComparison::Status::ExactMismatch;
      continue;
    }
    const double phat = static_cast<double>(counts[i]) / n;
    out[i].z = (phat - p[i]) / std::sqrt(p[i] * (1.0 - p[i]) / n);
  }
  return out;
}

}  // namespace cfqkd
