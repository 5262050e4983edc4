#pragma once

#include <cstdint>
#include <vector>

#include "jmqkd/vec3.hpp"

namespace jmqkd::jm {

/// Qubit no-click joint-measurability instance: N settings with unit Bloch
/// directions (optionally biased/smeared), visibility v, three outcomes per
/// setting (two clicks plus no-click). N <= 6 keeps the 3^N assignment
/// enumeration small.
struct JmProblem {
    std::vector<Vec3> directions;   // unit vectors
    double vis = 1.0;
    std::vector<double> biases;     // per-setting gamma, defaults to 0
    std::vector<double> norms;      // per-setting |m|, defaults to 1

    static JmProblem pvm(std::vector<Vec3> directions, double vis);
    static JmProblem biased(std::vector<Vec3> directions, double vis, std::vector<double> biases,
                            std::vector<double> norms);
    int n_settings() const { return static_cast<int>(directions.size()); }
};

/// Parent POVM over the 3^N deterministic assignment labels, in Bloch form.
/// Block lambda is PSD iff t >= |r|.
struct FeasibilityCertificate {
    std::vector<double> t;      // traces, one per assignment label
    std::vector<Vec3> r;        // Bloch vectors
    double eta = 0.0;
    double residual = 0.0;      // worst constraint/cone violation at acceptance
};

enum class FeasStatus { kFeasible, kInfeasible, kIndeterminate };

struct FeasOptions {
    double tol = 1e-9;          // cone violation accepted as feasible
    int max_iterations = 200000;
    int certificate_interval = 250;
};

struct FeasResult {
    FeasStatus status = FeasStatus::kIndeterminate;
    FeasibilityCertificate certificate;  // populated when feasible
    int iterations = 0;
    double best_violation = 0.0;
};

/// Decides whether a parent POVM with the required marginals exists at the
/// given efficiency. Douglas-Rachford splitting between the
/// marginal-constraint affine subspace and the product of second-order
/// cones; infeasibility is certified by a separating functional built from
/// the limiting iterate drift.
FeasResult jm_feasible(const JmProblem& p, double eta, const FeasOptions& opts = {});

struct ThresholdResult {
    double eta = 0.0;           // largest certified-feasible efficiency
    double lo = 0.0;            // certified feasible
    double hi = 1.0;            // first not-certified-feasible probe
    bool had_indeterminate = false;
};

/// Bisection over eta in [0, 1] at absolute tolerance tol; ties at the
/// threshold resolve as feasible.
ThresholdResult jm_threshold_eta(const JmProblem& p, double tol = 1e-5);

/// Recomputes every marginal constraint and PSD slack of a certificate
/// against the problem targets; returns the worst violation (matrix
/// entrywise for marginals, eigenvalue slack for positivity).
double verify_certificate(const FeasibilityCertificate& cert, const JmProblem& p);

}  // namespace jmqkd::jm
