#pragma once

#include "cfqkd/config.hpp"
#include "cfqkd/types.hpp"

// Closed-form detector statistics for the counterfactual protocol, with
// and without the combined blinding/measurement/faked-state attack.
//
// All four statistics are per emitted pulse. Binary detectors click with
// probability 1 - exp(-eta * m) for incident mean photon number m, and the
// 1/2 probability of Alice and Bob picking the same (or different)
// polarization is folded into every value.

namespace cfqkd {

DetectionStats baseline_stats(const ProtocolConfig& cfg);

/// Honest-protocol statistics for an ideal single-photon source: each
/// outcome probability is the detector's share of the photon times its
/// efficiency (T sigma eta2 / 2, R^2 sigma^2 eta0 / 2, R T sigma^2 eta1 / 2,
/// sigma^2 eta0 / 2). The mean photon number is ignored.
DetectionStats single_photon_stats(const ProtocolConfig& cfg);

/// Statistics under one of the combined attacks. Throws ValidationError
/// for Baseline/BlindReduceLosses (no closed form here) or when the
/// scenario does not match cfg.discrimination().
DetectionStats attack_stats(const ProtocolConfig& cfg, AttackScenario scenario, const AttackParams& params);

/// Forced-click probability y that brings D2 back to its expected rate
/// for a given measurement probability x; 1 when the rate deficit exceeds
/// what forcing can supply, and 1 when forcing has no effect (x = 0).
double solve_y(const ProtocolConfig& cfg, double x);

/// Same idea for the selective D0 trigger of the D0/D2 discrimination
/// variant, matching the different-polarization D0 rate.
double solve_z0(const ProtocolConfig& cfg, double x);

/// Attack/baseline ratios. Throws DegenerateBaseline if any baseline
/// probability is zero.
RatioReport ratio_report(const DetectionStats& attack, const DetectionStats& baseline);

/// Extra one-way channel loss (dB) whose effect on the honest statistics
/// matches `deviation`: the smallest delta such that
/// min_i |P_i(sigma * 10^(-delta/10)) / P_i(sigma) - 1| == deviation.
/// Solved by bisection on [0, 3] dB; throws ValidationError when the
/// deviation is not reachable inside that window.
double loss_fluctuation_equivalent(const ProtocolConfig& cfg, double deviation);

}  // namespace cfqkd
