#include "jmqkd/keyrate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace jmqkd::keyrate {

namespace {

constexpr double kPi = std::numbers::pi;

void check_eta_v(double eta, double v) {
    if (eta < 0.0 || eta > 1.0 || v < 0.0 || v > 1.0)
        throw std::invalid_argument("eta and v must lie in [0, 1]");
}

// (c+1)/c, or its unbounded-count limit 1.
double ratio_up(const Count& c) {
    return c.inf ? 1.0 : (static_cast<double>(c.value) + 1.0) / static_cast<double>(c.value);
}

// c/(c-1), or its unbounded-count limit 1.
double ratio_down(const Count& c) {
    if (c.inf)
        return 1.0;
    if (c.value < 2)
        throw std::invalid_argument("count ratio n/(n-1) needs n >= 2");
    return static_cast<double>(c.value) / (static_cast<double>(c.value) - 1.0);
}

// Recovers (eta*, v*) from the attack system given the raw mixing weight.
void fill_stars(AttackParams& a, double eta, double v) {
    a.p = std::clamp(a.p_raw, 0.0, 1.0);
    if (a.p_raw < 1e-300) {
        a.eta_star = 0.0;
        a.v_star = 1.0;
        return;
    }
    a.eta_star = 1.0 - (1.0 - eta) / a.p_raw;
    if (a.eta_star <= 0.0) {
        a.eta_star = std::max(a.eta_star, 0.0);
        a.v_star = 1.0;
        return;
    }
    a.v_star = (1.0 - (1.0 - eta * v) / a.p_raw) / a.eta_star;
}

}  // namespace

Count Count::of(long v) {
    if (v < 1)
        throw std::invalid_argument("count must be >= 1");
    return Count{v, false};
}

AttackParams p_prime(Count k_key, Count n_meas, int dim, double eta, double v) {
    check_eta_v(eta, v);
    if (dim < 2)
        throw std::invalid_argument("need dim >= 2");
    if (!n_meas.inf && (k_key.inf || k_key.value > n_meas.value))
        throw std::invalid_argument("key settings cannot exceed total settings");
    AttackParams a;
    a.family = "arbitrary-dim";
    double factor = std::max(ratio_up(k_key), ratio_down(n_meas));
    a.p_raw = (eta * (1.0 - v) + dim * (1.0 - eta * v)) / dim * factor;
    fill_stars(a, eta, v);
    return a;
}

AttackParams p_dprime(long n_meas, double eta, double v) {
    check_eta_v(eta, v);
    if (n_meas < 2)
        throw std::invalid_argument("binary-qubit attack needs n >= 2");
    AttackParams a;
    a.family = "binary-qubit-few";
    double n = static_cast<double>(n_meas);
    a.p_raw = (n * (1.0 - eta * v) + eta * std::sqrt(n) * (1.0 - v)) / (n - 1.0);
    fill_stars(a, eta, v);
    return a;
}

AttackParams p_tprime(double eta, double v) {
    check_eta_v(eta, v);
    AttackParams a;
    a.family = "all-qubit-pvms";
    a.p_raw = 1.0 - eta * v + std::sqrt(eta * (1.0 - v) * (2.0 - eta * (1.0 + v)));
    fill_stars(a, eta, v);
    return a;
}

AttackParams best_attack_p(Count k_key, Count n_meas, double eta, double v) {
    check_eta_v(eta, v);
    if (!n_meas.inf && (k_key.inf || k_key.value > n_meas.value))
        throw std::invalid_argument("key settings cannot exceed total settings");

    if (!n_meas.inf && n_meas.value == 2)
        return p_dprime(2, eta, v);
    if (!n_meas.inf && n_meas.value == 3) {
        if (k_key.value == 1)
            return p_prime(k_key, n_meas, 2, eta, v);
        return p_dprime(3, eta, v);
    }
    // n >= 4 or unbounded
    if (!k_key.inf && k_key.value <= 2)
        return p_prime(k_key, n_meas, 2, eta, v);
    if (k_key.inf)
        return p_tprime(eta, v);
    AttackParams few = p_prime(k_key, n_meas, 2, eta, v);
    AttackParams all = p_tprime(eta, v);
    return all.p_raw > few.p_raw ? all : few;
}

KeyRateBound keyrate_ub_oneway(double p, double h_key, double h_cond) {
    KeyRateBound b;
    b.weight = 1.0 - std::clamp(p, 0.0, 1.0);
    b.h_key = h_key;
    b.h_cond = h_cond;
    b.value = b.weight * h_key - h_cond;
    b.zero_key = b.value <= 0.0;
    return b;
}

KeyRateBound bb84_bound(double eta, double v, bool binning) {
    check_eta_v(eta, v);
    AttackParams a = p_prime(Count::of(1), Count::infinite(), 2, eta, v);
    double h_cond;
    if (binning) {
        h_cond = 0.5 * (binary_entropy(0.5 * eta * (1.0 + v)) +
                        binary_entropy(0.5 * eta * (1.0 - v)));
    } else {
        h_cond = eta * binary_entropy(0.5 * (1.0 + v)) + binary_entropy(eta);
    }
    return keyrate_ub_oneway(a.p, 1.0, h_cond);
}

double bb84_threshold_eta(double v, bool binning) {
    auto f = [&](double eta) { return bb84_bound(eta, v, binning).value; };
    auto bracket = optim::RootBracket::make(f, 1e-6, 1.0, 1e-7);
    return optim::bisect(f, bracket);
}

KeyRateBound rdi_bound(double eta, double v, double theta, Count n_meas) {
    check_eta_v(eta, v);
    if (theta < 0.0 || theta > 0.5 * kPi)
        throw std::invalid_argument("theta must lie in [0, pi/2]");
    if (!n_meas.inf && n_meas.value < 2)
        throw std::invalid_argument("need at least two preparations");

    AttackParams a = p_tprime(eta, v);  // all settings feed the key
    double s2 = std::sin(theta) * std::sin(theta);
    double c2 = 1.0 - s2;
    double h_arg = v < 1.0 ? (1.0 - v) / (2.0 * (1.0 - v * c2)) : 0.0;
    double h_err = binary_entropy(h_arg);

    KeyRateBound b;
    b.h_key = 1.0;
    b.weight = 1.0 - a.p;
    if (n_meas.inf) {
        // Both sides scaled by N.
        double succ_scaled = eta * v * 0.5 * s2 + eta * (1.0 - v);
        b.h_cond = succ_scaled * h_err;
        b.value = b.weight * 0.5 * s2 - b.h_cond;
    } else {
        double n = static_cast<double>(n_meas.value);
        double succ = eta * v * s2 / (2.0 * (n - 1.0)) + eta * (1.0 - v) / n;
        b.h_cond = succ * h_err;
        b.value = b.weight * s2 / (2.0 * (n - 1.0)) - b.h_cond;
    }
    b.zero_key = b.value <= 0.0;
    return b;
}

double rdi_visibility_threshold(double eta) {
    if (eta <= 0.0 || eta > 1.0)
        throw std::invalid_argument("eta must lie in (0, 1]");
    auto f = [&](double v) { return p_tprime(eta, v).p_raw - 1.0; };
    auto bracket = optim::RootBracket::make(f, 0.0, 1.0, 1e-9);
    return optim::bisect(f, bracket);
}

namespace {

AttackParams side_attack(MeasurementClass cls, Count k, Count n, int dim, double eta, double v) {
    if (cls == MeasurementClass::kArbitraryDim)
        return p_prime(k, n, dim, eta, v);
    return best_attack_p(k, n, eta, v);
}

// Conditional entropy of Bob's outcome given Alice's, no-click kept as a
// distinct symbol; theta-independent for aligned key measurements.
double h_cond_nobin(double eta, double v) {
    return eta * (1.0 - eta) + binary_entropy(eta) +
           eta * eta * binary_entropy(0.5 * (1.0 + v * v));
}

// Same with Bob binning his no-click into the likelier outcome. Degenerate
// alignments (p -> 0 with vanishing error) contribute nothing.
double h_cond_bin(double eta, double v, double theta) {
    double c = v * std::cos(2.0 * theta);
    double p_rare = 0.5 * (1.0 - c);
    double p_common = 0.5 * (1.0 + c);
    double err = 1.0 - v * v;
    double term_noclick = (1.0 - eta) * binary_entropy(eta * p_rare);
    double term_rare =
        p_rare > 0.0 ? eta * p_rare * binary_entropy(eta * (1.0 - err / (4.0 * p_rare))) : 0.0;
    double term_common =
        p_common > 0.0 ? eta * p_common * binary_entropy(eta * err / (4.0 * p_common)) : 0.0;
    return term_noclick + term_rare + term_common;
}

}  // namespace

DiqkdSplit diqkd_attack_split(const DiqkdScenario& sc, double eta, double v) {
    check_eta_v(eta, v);
    DiqkdSplit s;
    // Alice's side is replaced by a fully joint-measurable device; with
    // N_A settings this is the K = N_A - 1 column of the dispatch table.
    Count alice_k = sc.n_a.inf ? Count::infinite() : Count::of(std::max(sc.n_a.value - 1, 1L));
    if (!sc.n_a.inf && sc.n_a.value == 1) {
        // A single setting is trivially replaceable.
        s.alice = AttackParams{1.0, 1.0, eta, v, "single-setting"};
    } else {
        s.alice = side_attack(sc.cls, alice_k, sc.n_a, sc.dim, eta, v);
    }
    s.bob = side_attack(sc.cls, sc.k_b, sc.n_b, sc.dim, eta, v);
    s.p_a = eta * v * s.alice.p;
    s.p_b = eta * v * s.bob.p;
    s.q = (1.0 - eta * v) * (1.0 - eta * v);
    s.t = 2.0 * eta * v - eta * eta * v * v - s.p_a - s.p_b;
    return s;
}

KeyRateBound diqkd_bound(const DiqkdScenario& sc, double eta, double v, double theta) {
    if (theta < 0.0 || theta > 0.5 * kPi)
        throw std::invalid_argument("theta must lie in [0, pi/2]");
    DiqkdSplit s = diqkd_attack_split(sc, eta, v);
    double c2 = std::cos(theta) * std::cos(theta);
    KeyRateBound b;
    b.h_key = binary_entropy(c2);
    b.weight = s.t;
    b.h_cond = sc.binning ? h_cond_bin(eta, v, theta) : h_cond_nobin(eta, v);
    b.value = s.t * b.h_key - b.h_cond;
    b.zero_key = b.value <= 0.0;
    return b;
}

ThetaMax diqkd_bound_max_theta(const DiqkdScenario& sc, double eta, double v) {
    // Dense grid skipping the degenerate product state at theta = 0, then a
    // golden-section refinement around the best grid point and a simplex
    // polish from fixed interior seeds. All probes stay above the first grid
    // node so the degenerate boundary cannot masquerade as an optimum.
    constexpr int kGrid = 2000;
    const double theta_min = 0.5 * kPi / kGrid;
    auto value_at = [&](double theta) {
        double th = std::clamp(theta, theta_min, 0.5 * kPi);
        return diqkd_bound(sc, eta, v, th).value;
    };

    ThetaMax best{value_at(theta_min), theta_min};
    for (int i = 2; i <= kGrid; ++i) {
        double th = 0.5 * kPi * i / kGrid;
        double val = value_at(th);
        if (val > best.value)
            best = ThetaMax{val, th};
    }

    double lo = std::max(theta_min, best.theta - 0.5 * kPi / kGrid);
    double hi = std::min(0.5 * kPi, best.theta + 0.5 * kPi / kGrid);
    constexpr double kGolden = 0.6180339887498949;
    double x1 = hi - kGolden * (hi - lo);
    double x2 = lo + kGolden * (hi - lo);
    double f1 = value_at(x1);
    double f2 = value_at(x2);
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = value_at(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = value_at(x1);
        }
    }
    double mid = 0.5 * (lo + hi);
    if (value_at(mid) > best.value)
        best = ThetaMax{value_at(mid), mid};

    for (double seed : {kPi / 8.0, kPi / 4.0, 3.0 * kPi / 8.0}) {
        auto r = optim::nelder_mead([&](const std::vector<double>& x) { return -value_at(x[0]); },
                                    {seed}, 1e-8, 0.05);
        double th = std::clamp(r.x[0], theta_min, 0.5 * kPi);
        if (-r.value > best.value)
            best = ThetaMax{value_at(th), th};
    }
    return best;
}

double diqkd_threshold(const DiqkdScenario& sc, ThresholdAxis axis, bool theta_opt) {
    auto bound_at = [&](double eta, double v) {
        if (theta_opt && sc.binning)
            return diqkd_bound_max_theta(sc, eta, v).value;
        return diqkd_bound(sc, eta, v, 0.25 * kPi).value;
    };
    auto f = [&](double x) {
        return axis == ThresholdAxis::kEtaAtV1 ? bound_at(x, 1.0) : bound_at(1.0, x);
    };
    auto bracket = optim::RootBracket::make(f, 0.25, 1.0, 1e-7);
    return optim::bisect(f, bracket);
}

}  // namespace jmqkd::keyrate
