#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "cfqkd/types.hpp"

namespace cfqkd {

/// Unvalidated configuration values as read from a file or command line.
struct RawConfig {
  double mean_photon_number = 0.1;
  double reflectivity = 0.5;
  double channel_transmission = 0.1;
  double eve_channel_transmission = 0.12;
  double eta_d0 = 0.1;
  double eta_d1 = 0.1;
  double eta_d2 = 0.1;
  double eta_eve = 0.1;
  Discrimination discrimination = Discrimination::None;
};

/// Physical parameters of one Alice/Bob/channel instance. Only obtainable
/// through validate_config, so every instance satisfies the range checks.
class ProtocolConfig {
 public:
  double mean_photon_number() const noexcept { return mu_; }
  double reflectivity() const noexcept { return r_; }
  double transmissivity() const noexcept { return t_; }
  double channel_transmission() const noexcept { return sigma_; }
  double eve_channel_transmission() const noexcept { return sigma_eve_; }
  double eta_d0() const noexcept { return eta0_; }
  double eta_d1() const noexcept { return eta1_; }
  double eta_d2() const noexcept { return eta2_; }
  double eta_eve() const noexcept { return eta_eve_; }
  Discrimination discrimination() const noexcept { return disc_; }

  RawConfig raw() const noexcept;

  /// Same configuration with a different one-way channel transmission.
  /// Eve's channel is scaled by the same factor.
  ProtocolConfig with_channel_transmission(double sigma) const;

 private:
  friend ProtocolConfig validate_config(const RawConfig& raw);
  ProtocolConfig() = default;

  double mu_ = 0.0;
  double r_ = 0.0;
  double t_ = 1.0;
  double sigma_ = 1.0;
  double sigma_eve_ = 1.0;
  double eta0_ = 0.0;
  double eta1_ = 0.0;
  double eta2_ = 0.0;
  double eta_eve_ = 0.0;
  Discrimination disc_ = Discrimination::None;
};

/// Range-checks every field and derives T = 1 - R. Throws ValidationError
/// naming the first offending field.
ProtocolConfig validate_config(const RawConfig& raw);

/// Applies `key = value` assignments to a raw config. Keys are the
/// ProtocolConfig field names; unknown keys and unparsable values throw
/// ValidationError.
void apply_setting(RawConfig& raw, const std::string& key, const std::string& value);

/// Parses the flat `key = value` config format (`#` starts a comment).
/// Every numeric key except `transmissivity` is required; `discrimination`
/// defaults to none.
RawConfig parse_config(std::istream& in);
RawConfig load_config_file(const std::string& path);

void write_config(std::ostream& out, const RawConfig& raw);

}  // namespace cfqkd
