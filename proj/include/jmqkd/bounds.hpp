#pragma once

#include <string>
#include <vector>

#include "jmqkd/hermitian.hpp"
#include "jmqkd/vec3.hpp"

namespace jmqkd::bounds {

/// Threshold on eta (or visibility) produced by a closed-form sufficient
/// condition. `value` is clamped to [0, 1]; `raw` keeps the unclamped number
/// (formulas exceed 1 in regimes where the condition is vacuous).
struct BoundResult {
    double value = 0.0;
    double raw = 0.0;
    bool valid = true;          // preconditions of the formula held
    std::string formula;
};

BoundResult clamp_bound(double raw, bool valid, std::string formula);

/// Loss concatenated with an arbitrary channel: jointly measurable whenever
/// eta <= 1/N, independent of noise and measurement details.
BoundResult ub_loss(int n_meas);

/// Extendibility of a replacement channel (threshold q_star) concatenated
/// with a convex noise channel that is extendable at v_star, evaluated at
/// visibility v: eta <= (1 - v_star) / ((1 - v) + (v - v_star)/q_star).
BoundResult ub_concat(double q_star, double v_star, double v);

/// Loss + white noise in dimension d: eta <= d / (N (v(d+1) - 1)).
BoundResult ub_whitenoise(int n_meas, int dim, double v);

/// Dimension-free floor of the white-noise bound: eta <= 1/(N v).
BoundResult ub_whitenoise_dimfree(int n_meas, double v);

/// Binary qubit measurements: eta <= 1 / (sqrt(N) ((sqrt(N)+1) v - 1)).
BoundResult ub_binary_qubit(int n_meas, double v);

/// All qubit projective measurements at once: eta <= 2 (1 - v).
BoundResult ub_all_qubit_pvms(double v);

/// All POVMs in dimension d: eta <= (1 - v)^(d-1).
BoundResult ub_all_povms(double v, int dim);

/// Largest visibility at which two unbiased qubit measurements are jointly
/// measurable: 2 / (|m1 + m2| + |m1 - m2|). Exact for pairs.
double jm_vis_pair(const Vec3& m1, const Vec3& m2);

/// Exact three-measurement threshold: 4 / sum_k |t_k - t_ft| with
/// t_0 = m1+m2+m3, t_k = 2 m_k - t_0 and t_ft the Fermat-Toricelli point of
/// the four induced vectors.
double jm_vis_triple(const Vec3& m1, const Vec3& m2, const Vec3& m3);

/// Sufficient N-measurement threshold: 2^N / sum_a |sum_k (-1)^{a_k} m_k|
/// over all sign patterns a. Reduces to jm_vis_pair at N = 2; capped at
/// N = 20 by the 2^N enumeration.
double jm_vis_set(const std::vector<Vec3>& ms);

struct SmearedJmCheck {
    bool jm = false;           // sign-pattern sum condition
    bool relaxation = false;   // sum_k |m_k|^2 <= 1
    double lhs = 0.0;          // sum over sign patterns, to compare with 2^N
};

/// Sufficient joint-measurability check for smeared Bloch vectors |m| <= 1,
/// together with its quadratic relaxation.
SmearedJmCheck check_jm_bloch(const std::vector<Vec3>& ms);

/// Explicit parent POVM for a set of smeared qubit measurements, with the
/// randomness-mixing response tables and the achieved simulation residual.
struct ParentPovmCertificate {
    Povm parent;                                   // 2^{N+1} elements
    std::vector<std::vector<double>> response_p_plus;  // [setting][element]
    double residual = 0.0;
    double mix = 1.0;                              // weight of the informative branch
};

ParentPovmCertificate build_parent_povm(const std::vector<Vec3>& ms);

/// Partial joint measurability from halving: a subset that is JM at eta
/// makes the full unit K-simulable at eta/(1+eta).
double kjm_halving(double eta);

/// K-of-N binary qubit measurements: eta <= 1 / (v (K + sqrt(K))).
BoundResult kjm_binary_qubit(int k_key, double v);

/// K-of-N under white noise in dimension d: eta <= d / ((K+1)(v(d+1)-1)).
BoundResult kjm_whitenoise(int k_key, int dim, double v);

/// K-of-N for the thermal-noise channel: eta <= 1 / ((K+1)(1 - eps/2)).
BoundResult kjm_thermal(int k_key, double eps);

}  // namespace jmqkd::bounds
