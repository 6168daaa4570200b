// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cfqkd/analytic.hpp"
#include "cfqkd/montecarlo.hpp"
#include "cfqkd/optimizer.hpp"
#include "oracles.hpp"

using namespace cfqkd;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Expected {
  std::array<double, 4> ratios;
  double x, y, z, z0;
};

// Reference cells, ordered by sub-table (none, all, d1d2, d0d2), then column.
const std::array<Expected, 12> kTableOne = {{
    {{1.01383, 1.01383, 0.99383, 0.98613}, 0.042, 1.0, 0.668, 0},
    {{1.02152, 0.99747, 0.98426, 0.97848}, 0.041, 1.0, 0.472, 0},
    {{1.03706, 0.96286, 0.96497, 0.96228}, 0.039, 1.0, 0.024, 0},
    {{1.0, 1.0, 0.96570, 0.96119}, 0.039, 1.0, 0, 0},
    {{1.0, 1.0, 0.96551, 0.96123}, 0.039, 1.0, 0, 0},
    {{1.0, 1.0, 0.96497, 0.96135}, 0.039, 1.0, 0, 0},
    {{0.96119, 1.0, 0.96570, 0.96119}, 0.039, 1.0, 0, 0},
    {{0.96123, 1.0, 0.96551, 0.96123}, 0.039, 1.0, 0, 0},
    {{0.96135, 1.0, 0.96497, 0.96135}, 0.039, 1.0, 0, 0},
    {{1.0, 0.96119, 0.96570, 1.0}, 0.039, 1.0, 0, 0.02005},
    {{1.0, 0.96123, 0.96551, 1.0}, 0.039, 1.0, 0, 0.01672},
    {{1.0, 0.96135, 0.96497, 1.0}, 0.039, 1.0, 0, 0.01116},
}};

const std::array<Expected, 12> kTableTwo = {{
    {{1.00850, 1.00850, 0.99433, 0.99149}, 0.028, 1.0, 0.682, 0},
    {{1.01680, 1.01680, 0.98335, 0.98315}, 0.051, 1.0, 0.668, 0},
    {{1.00182, 1.00182, 1.0, 0.99818}, 0.006, 0.95236, 0.682, 0},
    {{1.0, 1.0, 0.98024, 0.97419}, 0.027, 1.0, 0, 0},
    {{1.0, 1.0, 0.95492, 0.95224}, 0.048, 1.0, 0, 0},
    {{1.0, 1.0, 1.0, 0.99426}, 0.006, 0.95236, 0, 0},
    {{0.97419, 1.0, 0.98024, 0.97419}, 0.027, 1.0, 0, 0},
    {{0.95224, 1.0, 0.95492, 0.95224}, 0.048, 1.0, 0, 0},
    {{0.99426, 1.0, 1.0, 0.99426}, 0.006, 0.95236, 0, 0},
    {{1.0, 0.97419, 0.98024, 1.0}, 0.027, 1.0, 0, 0.08167},
    {{1.0, 0.95224, 0.95492, 1.0}, 0.048, 1.0, 0, 0.02005},
    {{1.0, 0.99426, 1.0, 1.0}, 0.006, 0.95236, 0, 0.00227},
}};

struct Verdict {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Verdict check_table(ReferenceTable table, const std::array<Expected, 12>& expected, double max_seconds) {
  Verdict v;
  const auto t0 = Clock::now();
  const auto cells = reproduce_tables(table);
  const double elapsed = seconds_since(t0);
  if (cells.size() != expected.size()) {
    v.fail("wrong number of cells");
    return v;
  }
  double worst_ratio = 0, worst_xz = 0, worst_yz0 = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& r = cells[i].result;
    const auto& e = expected[i];
    const auto ratios = r.report.ratios();
    for (int k = 0; k < 4; ++k) worst_ratio = std::max(worst_ratio, std::abs(ratios[k] - e.ratios[k]));
    worst_xz = std::max(worst_xz, std::abs(r.params.x - e.x));
    worst_yz0 = std::max(worst_yz0, std::abs(r.params.y - e.y));
    if (cells[i].discrimination == Discrimination::None) worst_xz = std::max(worst_xz, std::abs(r.params.z - e.z));
    if (cells[i].discrimination == Discrimination::D0D2)
      worst_yz0 = std::max(worst_yz0, std::abs(r.params.z0 - e.z0));
  }
  if (worst_ratio > 0.002) v.fail(fmt("ratio off by %.5f", worst_ratio));
  if (worst_xz > 0.002) v.fail(fmt("x/z off by %.5f", worst_xz));
  if (worst_yz0 > 0.001) v.fail(fmt("y/z0 off by %.5f", worst_yz0));
  if (elapsed >= max_seconds) v.fail(fmt("took %.1f s", elapsed));
  if (v.pass)
    v.detail = fmt("max |ratio err| %.2e, max |x,z err| %.2e, %.2f s", worst_ratio, worst_xz, elapsed) +
               fmt(", max |y,z0 err| %.2e", worst_yz0);
  return v;
}

RawConfig reference(Discrimination d = Discrimination::None) {
  return RawConfig{0.1, 0.5, 0.1, 0.12, 0.1, 0.1, 0.1, 0.1, d};
}

Verdict check_loss_equivalence() {
  Verdict v;
  const ProtocolConfig c = validate_config(reference());
  const double small = loss_fluctuation_equivalent(c, 0.015);
  const double large = loss_fluctuation_equivalent(c, 0.04);
  if (std::abs(small - 0.069) > 0.005) v.fail(fmt("0.015 -> %.4f dB", small));
  if (std::abs(large - 0.18) > 0.01) v.fail(fmt("0.04 -> %.4f dB", large));
  if (v.pass) v.detail = fmt("0.015 -> %.4f dB, 0.04 -> %.4f dB", small, large);
  return v;
}

Verdict check_identities() {
  Verdict v;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int full_ok = 0, opp_ok = 0;
  for (int i = 0; i < 1000; ++i) {
    const ProtocolConfig c = validate_config(oracle::random_config(rng, Discrimination::All));
    const auto b = baseline_stats(c);
    const auto a = attack_stats(c, AttackScenario::CombinedFullDisc, {u(rng), u(rng), 0, 0});
    full_ok += a.p_d0 == b.p_d0 && a.p_d1 == b.p_d1;

    const ProtocolConfig n = validate_config(oracle::random_config(rng));
    const auto an = attack_stats(n, AttackScenario::CombinedNoDisc, {u(rng), u(rng), 1.0, 0});
    opp_ok += an.p_d0_opp == baseline_stats(n).p_d0_opp;
  }
  RawConfig raw = reference();
  raw.eve_channel_transmission = raw.channel_transmission;
  const ProtocolConfig c = validate_config(raw);
  const double half = attack_stats(c, AttackScenario::CombinedNoDisc, {0, 1, 0, 0}).p_d2 / baseline_stats(c).p_d2;
  if (full_ok != 1000) v.fail(fmt("full discrimination identity held for %.0f of 1000", full_ok));
  if (opp_ok != 1000) v.fail(fmt("z = 1 identity held for %.0f of 1000", opp_ok));
  if (half != 0.5) v.fail(fmt("x = 0 D2 ratio %.17g", half));
  if (v.pass) v.detail = "1000/1000 full discrimination, 1000/1000 z = 1, D2 ratio exactly 0.5";
  return v;
}

Verdict check_monte_carlo() {
  Verdict v;
  struct Run {
    AttackScenario scenario;
    Discrimination disc;
  };
  const std::array<Run, 5> runs = {{{AttackScenario::Baseline, Discrimination::None},
                                    {AttackScenario::CombinedNoDisc, Discrimination::None},
                                    {AttackScenario::CombinedFullDisc, Discrimination::All},
                                    {AttackScenario::CombinedD1D2, Discrimination::D1D2},
                                    {AttackScenario::CombinedD0D2, Discrimination::D0D2}}};
  double slowest = 0;
  int worst_seeds = 20;
  for (const auto& run : runs) {
    const ProtocolConfig c = validate_config(reference(run.disc));
    AttackParams p;
    DetectionStats expected = baseline_stats(c);
    if (is_combined(run.scenario)) {
      p = optimize(c, run.scenario).params;
      expected = attack_stats(c, run.scenario, p);
    }
    int good = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto t0 = Clock::now();
      const auto s = simulate(c, run.scenario, p, Source::Coherent, 1000000, seed);
      slowest = std::max(slowest, seconds_since(t0));
      bool ok = true;
      for (const auto& cmp : compare_to_analytic(s, expected)) {
        if (cmp.status == StatComparison::Status::ExactMismatch) ok = false;
        if (cmp.status == StatComparison::Status::Compared && std::abs(cmp.z) > 3.0) ok = false;
      }
      good += ok;
    }
    worst_seeds = std::min(worst_seeds, good);
    if (good < 18) v.fail(std::string(to_string(run.scenario)) + fmt(": %.0f of 20 seeds within 3 SE", good));
  }
  if (slowest >= 30.0) v.fail(fmt("slowest run %.1f s", slowest));
  if (v.pass) v.detail = fmt("worst scenario %.0f/20 seeds within 3 SE, slowest run %.2f s", worst_seeds, slowest);
  return v;
}

Verdict check_single_photon() {
  Verdict v;
  const ProtocolConfig c = validate_config(RawConfig{1.0, 0.5, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, Discrimination::None});
  const auto s = simulate(c, AttackScenario::Baseline, {}, Source::SinglePhoton, 1000000, 6);
  const DetectionStats expected{0.125, 0.125, 0.25, 0.5};
  const auto cmp = compare_to_analytic(s, expected);
  double worst = 0;
  for (const auto& z : cmp) {
    if (z.status != StatComparison::Status::Compared) v.fail("unexpected exact status");
    worst = std::max(worst, std::abs(z.z));
  }
  if (worst > 3.0) v.fail(fmt("worst |z| %.2f", worst));
  if (s.counts.d1_opp != 0) v.fail(fmt("%.0f D1 clicks on different-polarization pulses", double(s.counts.d1_opp)));
  if (v.pass)
    v.detail = fmt("p_d2 %.5f, p_d0 %.5f, p_d1 %.5f", s.empirical.p_d2, s.empirical.p_d0, s.empirical.p_d1) +
               fmt(", worst |z| %.2f, D1 on different polarization 0", worst);
  return v;
}

Verdict check_omniscience() {
  Verdict v;
  const std::array<std::pair<AttackScenario, Discrimination>, 5> runs = {
      {{AttackScenario::BlindReduceLosses, Discrimination::None},
       {AttackScenario::CombinedNoDisc, Discrimination::None},
       {AttackScenario::CombinedFullDisc, Discrimination::All},
       {AttackScenario::CombinedD1D2, Discrimination::D1D2},
       {AttackScenario::CombinedD0D2, Discrimination::D0D2}}};
  std::uint64_t sifted = 0;
  for (const auto& [scenario, disc] : runs) {
    const ProtocolConfig c = validate_config(reference(disc));
    AttackParams p;
    if (is_combined(scenario)) p = complete_params(c, scenario, 0.042, 0.668);
    const auto s = simulate(c, scenario, p, Source::Coherent, 5000000, 77);
    sifted += s.sifted_key_length;
    if (s.sifted_key_length == 0) v.fail(std::string(to_string(scenario)) + ": empty sifted key");
    if (s.eve_key_recovery != 1.0) v.fail(std::string(to_string(scenario)) + fmt(": recovery %.6f", s.eve_key_recovery));
    if (s.qber != 0.0) v.fail(std::string(to_string(scenario)) + fmt(": qber %.6f", s.qber));
  }
  if (v.pass) v.detail = fmt("%.0f sifted bits over 5 attack scenarios, recovery 1, qber 0", double(sifted));
  return v;
}

Verdict check_blind_reduce() {
  Verdict v;
  const ProtocolConfig c = validate_config(reference());
  const auto s = simulate(c, AttackScenario::BlindReduceLosses, {}, Source::Coherent, 10000000, 8);
  const auto base = baseline_stats(c).values();
  const auto emp = s.empirical.values();
  const double n = static_cast<double>(s.pulses);
  double worst = 0;
  for (int i = 0; i < 4; ++i) {
    const double se = std::sqrt(base[i] * (1 - base[i]) / n);
    const double allowed = std::max(1e-3 * base[i], 3 * se);
    const double off = std::abs(emp[i] - base[i]);
    worst = std::max(worst, off / allowed);
    if (off > allowed) v.fail(std::string(kStatNames[i]) + fmt(" off by %.3g (allowed %.3g)", off, allowed));
  }
  if (v.pass) v.detail = fmt("worst deviation %.2f of allowance at 1e7 pulses", worst);
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"1 table I reproduction", [] { return check_table(ReferenceTable::TableI, kTableOne, 60.0); }},
      {"2 table II reproduction", [] { return check_table(ReferenceTable::TableII, kTableTwo, 60.0); }},
      {"3 loss-fluctuation equivalence", check_loss_equivalence},
      {"4 identity suite", check_identities},
      {"5 Monte Carlo vs closed forms", check_monte_carlo},
      {"6 single-photon honest protocol", check_single_photon},
      {"7 Eve omniscience", check_omniscience},
      {"8 blind-reduce masking", check_blind_reduce},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    std::printf("%s  criterion %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
    std::fflush(stdout);
    failures += !v.pass;
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
