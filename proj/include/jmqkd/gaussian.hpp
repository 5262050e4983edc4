#pragma once

#include <vector>

#include "jmqkd/bounds.hpp"

namespace jmqkd::gauss {

struct Mat2 {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;  // [[a, b], [c, d]]

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 scaled_identity(double s) { return {s, 0.0, 0.0, s}; }

    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
    Mat2 transpose() const { return {a, c, b, d}; }
    double det() const { return a * d - b * c; }
    double max_abs_diff(const Mat2& o) const;
    bool symmetric(double tol = 1e-12) const;
    /// Largest eigenvalue of a symmetric 2x2 matrix.
    double max_eigenvalue() const;
    double min_eigenvalue() const;
};

struct Vec2 {
    double x = 0.0, y = 0.0;
};

/// Single-mode Gaussian channel in the scaling/noise representation:
/// first moments map to X mu + delta, covariances to X V X^T + Y.
struct GaussianChannelXY {
    Mat2 X;
    Mat2 Y;
    Vec2 delta;

    static GaussianChannelXY make(const Mat2& X, const Mat2& Y, const Vec2& delta = {});
    /// Complete positivity: Y + i(Omega - X Omega X^T) >= 0, i.e.
    /// Y psd and det Y >= (1 - det X)^2. Non-physical channels stay
    /// representable for intermediate algebra; this only reports the flag.
    bool physical(double tol = 1e-10) const;
};

/// Transmittance/excess-noise parameters of the thermal-noise channel.
/// The mean photon number of the environment is eta*eps / (2(1-eta)),
/// which diverges at eta = 1 with eps > 0; nu() rejects that corner while
/// the channel map itself stays well defined.
struct ThermalParams {
    double eta = 1.0;
    double eps = 0.0;

    static ThermalParams make(double eta, double eps);
    bool nu_defined() const { return eta < 1.0 || eps == 0.0; }
    double nu() const;
};

GaussianChannelXY thermal_xy(const ThermalParams& p);
/// Phase-insensitive amplifier of gain G >= 1.
GaussianChannelXY amp_xy(double gain);
/// Keep-one-arm marginal of a symmetric N-mode beam splitter.
GaussianChannelXY bs_trace_xy(int n_modes);

/// Channel obtained by applying `first`, then `second`.
GaussianChannelXY compose(const GaussianChannelXY& first, const GaussianChannelXY& second);

/// Exact single-mode criterion: sqrt(det Y) >= 1 - 1/N + |det X - 1/N|.
bool n_extendable_gaussian(const GaussianChannelXY& ch, int n);

/// Thermal-noise channel extendibility threshold eta <= 1/(N(1-eps/2)),
/// independent of the measurements. `modes` is accepted to make the
/// product-channel statement explicit; the threshold does not depend on it.
bounds::BoundResult ub_thermal(int n_meas, double eps, int modes = 1);

/// Gaussian-measurement threshold eta <= 1/(2-eps), independent of N.
bounds::BoundResult ub_gaussian_meas(double eps);

struct HomodyneSimParams {
    double gain = 0.0;      // applied to the heterodyne outcomes
    double sigma2 = 0.0;    // variance of the added Gaussian dither
};

/// Classical post-processing parameters G = sqrt(2 eta),
/// sigma^2 = (1 - 2 eta + eps*eta)/2; valid while sigma^2 >= 0.
HomodyneSimParams homodyne_sim_params(double eta, double eps);

/// Moments <X^n> of a scalar Gaussian variable, n = 0..n_max.
std::vector<double> gaussian_moments(double mean, double variance, int n_max);

/// Quadrature moments of the thermal-noise channel output for the given
/// input moments (one row per angle, each of length >= n_max+1).
std::vector<double> thermal_output_moments(double eta, double eps,
                                           const std::vector<double>& input_moments, int n_max);

/// Same moments produced by the heterodyne-plus-dither simulation.
std::vector<double> heterodyne_sim_moments(double eta, double eps,
                                           const std::vector<double>& input_moments, int n_max);

/// Max |target - simulated| moment deviation over all angles and n <= n_max.
double homodyne_moment_check(double eta, double eps,
                             const std::vector<std::vector<double>>& input_moments_per_angle,
                             int n_max);

/// Necessary condition for a Gaussian channel to appear in a convex
/// decomposition of the thermal channel: X = sqrt(eta) I and
/// Y <= (1 - eta + eta*eps) I.
bool gauss_decomp_necessary(const GaussianChannelXY& candidate, double eta, double eps);

/// True when no convex-combination attack with an N-extendable Gaussian
/// component can reproduce thermal(eta, eps).
bool no_gauss_cc_attack(double eta, double eps, int n);

}  // namespace jmqkd::gauss
