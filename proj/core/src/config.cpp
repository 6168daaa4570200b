#include "cfqkd/config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include "cfqkd/errors.hpp"

namespace cfqkd {
namespace {

void check_unit(const char* field, double v) {
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) throw ValidationError(field, "must lie in [0, 1]");
}

void check_open_unit(const char* field, double v) {
  if (!std::isfinite(v) || v <= 0.0 || v > 1.0) throw ValidationError(field, "must lie in (0, 1]");
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ValidationError(key, "not a number: '" + text + "'");
  }
  if (used != text.size()) throw ValidationError(key, "not a number: '" + text + "'");
  return v;
}

const std::set<std::string> kRequired = {
    "mean_photon_number", "reflectivity", "channel_transmission", "eve_channel_transmission",
    "eta_d0",             "eta_d1",       "eta_d2",               "eta_eve",
};

}  // namespace

RawConfig ProtocolConfig::raw() const noexcept {
  return RawConfig{mu_, r_, sigma_, sigma_eve_, eta0_, eta1_, eta2_, eta_eve_, disc_};
}

ProtocolConfig ProtocolConfig::with_channel_transmission(double sigma) const {
  RawConfig r = raw();
  r.eve_channel_transmission = sigma_eve_ * (sigma / sigma_);
  r.channel_transmission = sigma;
  return validate_config(r);
}

ProtocolConfig validate_config(const RawConfig& raw) {
  if (!std::isfinite(raw.mean_photon_number) || raw.mean_photon_number < 0.0)
    throw ValidationError("mean_photon_number", "must be finite and >= 0");
  check_unit("reflectivity", raw.reflectivity);
  check_open_unit("channel_transmission", raw.channel_transmission);
  check_open_unit("eve_channel_transmission", raw.eve_channel_transmission);
  if (raw.eve_channel_transmission < raw.channel_transmission)
    throw ValidationError("eve_channel_transmission", "must be >= channel_transmission");
  check_unit("eta_d0", raw.eta_d0);
  check_unit("eta_d1", raw.eta_d1);
  check_unit("eta_d2", raw.eta_d2);
  check_unit("eta_eve", raw.eta_eve);

  ProtocolConfig cfg;
  cfg.mu_ = raw.mean_photon_number;
  cfg.r_ = raw.reflectivity;
  cfg.t_ = 1.0 - raw.reflectivity;
  cfg.sigma_ = raw.channel_transmission;
  cfg.sigma_eve_ = raw.eve_channel_transmission;
  cfg.eta0_ = raw.eta_d0;
  cfg.eta1_ = raw.eta_d1;
  cfg.eta2_ = raw.eta_d2;
  cfg.eta_eve_ = raw.eta_eve;
  cfg.disc_ = raw.discrimination;
  return cfg;
}

void apply_setting(RawConfig& raw, const std::string& key, const std::string& value) {
  if (key == "discrimination") {
    raw.discrimination = parse_discrimination(value);
    return;
  }
  if (key == "transmissivity") {
    const double t = parse_number(key, value);
    if (!(std::abs(t - (1.0 - raw.reflectivity)) <= 1e-12))
      throw ValidationError(key, "is derived as 1 - reflectivity and must match it");
    return;
  }
  double* target = nullptr;
  if (key == "mean_photon_number") target = &raw.mean_photon_number;
  else if (key == "reflectivity") target = &raw.reflectivity;
  else if (key == "channel_transmission") target = &raw.channel_transmission;
  else if (key == "eve_channel_transmission") target = &raw.eve_channel_transmission;
  else if (key == "eta_d0") target = &raw.eta_d0;
  else if (key == "eta_d1") target = &raw.eta_d1;
  else if (key == "eta_d2") target = &raw.eta_d2;
  else if (key == "eta_eve") target = &raw.eta_eve;
  if (target == nullptr) throw ValidationError(key, "unknown config key");
  *target = parse_number(key, value);
}

RawConfig parse_config(std::istream& in) {
  RawConfig raw;
  std::set<std::string> seen;
  std::string pending_transmissivity;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("line " + std::to_string(lineno), "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ValidationError(key, "given more than once");
    // T is checked once R is known, whatever the line order.
    if (key == "transmissivity") {
      pending_transmissivity = value;
      continue;
    }
    apply_setting(raw, key, value);
  }
  for (const auto& key : kRequired) {
    if (!seen.count(key)) throw ValidationError(key, "missing from config");
  }
  if (!pending_transmissivity.empty()) apply_setting(raw, "transmissivity", pending_transmissivity);
  return raw;
}

RawConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot open '" + path + "'");
  return parse_config(in);
}

void write_config(std::ostream& out, const RawConfig& raw) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << "mean_photon_number = " << raw.mean_photon_number << '\n'
      << "reflectivity = " << raw.reflectivity << '\n'
      << "channel_transmission = " << raw.channel_transmission << '\n'
      << "eve_channel_transmission = " << raw.eve_channel_transmission << '\n'
      << "eta_d0 = " << raw.eta_d0 << '\n'
      << "eta_d1 = " << raw.eta_d1 << '\n'
      << "eta_d2 = " << raw.eta_d2 << '\n'
      << "eta_eve = " << raw.eta_eve << '\n'
      << "discrimination = " << to_string(raw.discrimination) << '\n';
  out.precision(old);
}

}  // namespace cfqkd
