#pragma once

#include <cstddef>
#include <vector>

#include "jmqkd/hermitian.hpp"
#include "jmqkd/vec3.hpp"

namespace jmqkd {

/// Binary qubit measurement E_+/- = ((1 +- gamma) I +- m.sigma) / 2.
/// Positivity of both effects requires |m| <= 1 - |gamma|.
struct BlochMeasurement {
    Vec3 direction{0.0, 0.0, 1.0};  // unit vector once norm > 0
    double bias = 0.0;              // gamma
    double norm = 1.0;              // |m|

    /// Builds from the raw Bloch vector m (direction * norm) and bias.
    static BlochMeasurement make(const Vec3& m, double gamma);
    Vec3 bloch_vector() const { return direction * norm; }
};

/// Lossy, white-noise measurement unit: ideal settings plus detection
/// efficiency eta and visibility vis acting on a d-dimensional input.
struct NoClickCmu {
    std::vector<Povm> measurements;
    double eta = 1.0;
    double vis = 1.0;
    int dim = 2;

    static NoClickCmu make(std::vector<Povm> measurements, double eta, double vis);
    static NoClickCmu from_bloch(const std::vector<BlochMeasurement>& ms, double eta, double vis);
};

/// Two-outcome POVM for a binary qubit measurement.
Povm bloch_to_povm(const BlochMeasurement& m);

/// Per setting, the (L+1)-outcome effective POVM: eta*v*M_b + eta*(1-v)*q_b*I
/// for conclusive outcomes and (1-eta)*I for the no-click outcome, where
/// q_b = Tr[M_b]/d.
std::vector<Povm> effective_noclick_povms(const NoClickCmu& cmu);

struct UnbiasResult {
    std::vector<Vec3> directions;      // normalized, dummies removed
    std::size_t dropped_dummies = 0;   // zero-norm inputs, always simulable
};

/// Normalizes away bias and smearing: keeps unit directions, drops dummy
/// (zero-vector) measurements and reports how many were dropped.
UnbiasResult unbias_reduce(const std::vector<BlochMeasurement>& ms);

}  // namespace jmqkd
