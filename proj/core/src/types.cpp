#include "cfqkd/types.hpp"

#include <string>

#include "cfqkd/errors.hpp"

namespace cfqkd {

std::string_view to_string(Discrimination d) noexcept {
  switch (d) {
    case Discrimination::None:
      return "none";
    case Discrimination::All:
      return "all";
    case Discrimination::D1D2:
      return "d1d2";
    case Discrimination::D0D2:
      return "d0d2";
  }
  return "none";
}

std::string_view to_string(AttackScenario s) noexcept {
  switch (s) {
    case AttackScenario::Baseline:
      return "baseline";
    case AttackScenario::BlindReduceLosses:
      return "blind-reduce";
    case AttackScenario::CombinedNoDisc:
      return "combined-nodisc";
    case AttackScenario::CombinedFullDisc:
      return "combined-fulldisc";
    case AttackScenario::CombinedD1D2:
      return "combined-d1d2";
    case AttackScenario::CombinedD0D2:
      return "combined-d0d2";
  }
  return "baseline";
}

Discrimination parse_discrimination(std::string_view text) {
  for (auto d : {Discrimination::None, Discrimination::All, Discrimination::D1D2, Discrimination::D0D2}) {
    if (text == to_string(d)) return d;
  }
  throw ValidationError("discrimination", "expected none|all|d1d2|d0d2, got '" + std::string(text) + "'");
}

AttackScenario parse_scenario(std::string_view text) {
  for (auto s : {AttackScenario::Baseline, AttackScenario::BlindReduceLosses, AttackScenario::CombinedNoDisc,
                 AttackScenario::CombinedFullDisc, AttackScenario::CombinedD1D2, AttackScenario::CombinedD0D2}) {
    if (text == to_string(s)) return s;
  }
  throw ValidationError("scenario", "unknown scenario '" + std::string(text) + "'");
}

void AttackParams::validate() const {
  auto check = [](const char* name, double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(name, "must lie in [0, 1]");
  };
  check("x", x);
  check("y", y);
  check("z", z);
  check("z0", z0);
}

}  // namespace cfqkd
