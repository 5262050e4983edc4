#pragma once

#include <string>

#include "jmqkd/optim.hpp"

namespace jmqkd::keyrate {

using optim::binary_entropy;

/// Measurement count that may be unbounded ("inf" on the command line).
struct Count {
    long value = 1;
    bool inf = false;

    static Count of(long v);
    static Count infinite() { return Count{0, true}; }
    bool operator==(const Count&) const = default;
    std::string str() const { return inf ? "inf" : std::to_string(value); }
};

/// Mixing probability of the convex-combination attack, together with the
/// simulated device parameters solving p(1 - eta* v*) = 1 - eta v and
/// p(1 - eta*) = 1 - eta.
struct AttackParams {
    double p_raw = 0.0;      // closed-form value before clamping
    double p = 0.0;          // clamped to [0, 1]
    double eta_star = 0.0;   // simulated efficiency
    double v_star = 1.0;     // simulated visibility
    std::string family;      // which threshold formula saturates eta*
};

/// Attack against K-of-N arbitrary measurements in dimension d; infinite
/// counts use the closed-form limits.
AttackParams p_prime(Count k_key, Count n_meas, int dim, double eta, double v);

/// Attack against a few binary qubit measurements (finite N >= 2).
AttackParams p_dprime(long n_meas, double eta, double v);

/// Attack against the set of all binary qubit measurements.
AttackParams p_tprime(double eta, double v);

/// Optimal dispatch over the three families for binary qubit devices with
/// K of N settings used for the key. Rejects K > N.
AttackParams best_attack_p(Count k_key, Count n_meas, double eta, double v);

struct KeyRateBound {
    double value = 0.0;     // upper bound on the asymptotic one-way rate
    double weight = 0.0;    // (1 - p), or t in the two-sided decomposition
    double h_key = 0.0;     // key-variable entropy of the ideal device
    double h_cond = 0.0;    // conditional entropy from the observed data
    bool zero_key = false;  // value <= 0
};

/// One-way distillation bound (1 - p) H_key - H_cond.
KeyRateBound keyrate_ub_oneway(double p, double h_key, double h_cond);

/// Prepare-and-measure protocols keyed on a single binary measurement
/// (BB84- and CHSH-type): closed-form bound, with or without binning the
/// no-click outcome.
KeyRateBound bb84_bound(double eta, double v, bool binning);

/// Zero crossing of the BB84-type bound in eta at fixed visibility.
double bb84_threshold_eta(double v, bool binning);

/// Receiver-device-independent protocol bound for N preparations at state
/// angle theta. An infinite count evaluates the N-scaled limit.
KeyRateBound rdi_bound(double eta, double v, double theta, Count n_meas);

/// Visibility below which the replacement attack reproduces the device with
/// certainty (raw p reaches 1), closing the key for every theta.
double rdi_visibility_threshold(double eta);

enum class MeasurementClass { kArbitraryDim, kBinaryQubit };

struct DiqkdScenario {
    Count n_a = Count::of(2);
    Count n_b = Count::of(2);
    Count k_b = Count::of(1);
    bool binning = false;
    MeasurementClass cls = MeasurementClass::kBinaryQubit;
    int dim = 2;
};

/// Four-branch convex split of the two-sided attack.
struct DiqkdSplit {
    AttackParams alice;   // full-JM replacement of Alice's device
    AttackParams bob;     // K-JM replacement of Bob's device
    double p_a = 0.0;     // eta*v*alice.p
    double p_b = 0.0;
    double q = 0.0;       // both devices fully dephased
    double t = 0.0;       // ideal-behavior weight
};

DiqkdSplit diqkd_attack_split(const DiqkdScenario& sc, double eta, double v);

/// Entangled-pair bound at state angle theta. No-binning scenarios use a
/// theta-independent conditional entropy; binning makes it theta-dependent.
KeyRateBound diqkd_bound(const DiqkdScenario& sc, double eta, double v, double theta);

/// Bound maximized over the state angle (grid plus golden refinement plus
/// simplex polish, never probing theta = 0 exactly).
struct ThetaMax {
    double value = 0.0;
    double theta = 0.0;
};
ThetaMax diqkd_bound_max_theta(const DiqkdScenario& sc, double eta, double v);

enum class ThresholdAxis { kEtaAtV1, kVAtEta1 };

/// Zero crossing of the (optionally theta-maximized) bound along one axis.
double diqkd_threshold(const DiqkdScenario& sc, ThresholdAxis axis, bool theta_opt);

}  // namespace jmqkd::keyrate
