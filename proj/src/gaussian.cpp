#include "jmqkd/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jmqkd::gauss {

double Mat2::max_abs_diff(const Mat2& o) const {
    return std::max({std::abs(a - o.a), std::abs(b - o.b), std::abs(c - o.c), std::abs(d - o.d)});
}

bool Mat2::symmetric(double tol) const { return std::abs(b - c) <= tol; }

double Mat2::max_eigenvalue() const {
    double mean = 0.5 * (a + d);
    double rad = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
    return mean + rad;
}

double Mat2::min_eigenvalue() const {
    double mean = 0.5 * (a + d);
    double rad = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
    return mean - rad;
}

GaussianChannelXY GaussianChannelXY::make(const Mat2& X, const Mat2& Y, const Vec2& delta) {
    if (!Y.symmetric())
        throw std::invalid_argument("noise matrix must be symmetric");
    return GaussianChannelXY{X, Y, delta};
}

bool GaussianChannelXY::physical(double tol) const {
    // For one mode, X Omega X^T = det(X) Omega, so the CP matrix is
    // Y + i (1 - det X) Omega; positivity reduces to the two checks below.
    double offset = 1.0 - X.det();
    return Y.min_eigenvalue() >= -tol && Y.det() + tol >= offset * offset;
}

ThermalParams ThermalParams::make(double eta, double eps) {
    if (eta < 0.0 || eta > 1.0 || eps < 0.0)
        throw std::invalid_argument("need eta in [0, 1] and eps >= 0");
    return ThermalParams{eta, eps};
}

double ThermalParams::nu() const {
    // The scaling/noise map stays well defined at eta = 1, but the
    // beam-splitter picture needs a thermal environment whose photon
    // number diverges there; reject that query instead of returning inf.
    if (!nu_defined())
        throw std::invalid_argument("environment photon number diverges at eta = 1 with eps > 0");
    if (eta == 1.0)
        return 0.0;
    return eta * eps / (2.0 * (1.0 - eta));
}

GaussianChannelXY thermal_xy(const ThermalParams& p) {
    return GaussianChannelXY::make(Mat2::scaled_identity(std::sqrt(p.eta)),
                                   Mat2::scaled_identity(1.0 - p.eta + p.eps * p.eta));
}

GaussianChannelXY amp_xy(double gain) {
    if (gain < 1.0)
        throw std::invalid_argument("amplifier gain must be >= 1");
    return GaussianChannelXY::make(Mat2::scaled_identity(std::sqrt(gain)),
                                   Mat2::scaled_identity(gain - 1.0));
}

GaussianChannelXY bs_trace_xy(int n_modes) {
    if (n_modes < 1)
        throw std::invalid_argument("beam splitter needs >= 1 modes");
    double n = n_modes;
    return GaussianChannelXY::make(Mat2::scaled_identity(std::sqrt(1.0 / n)),
                                   Mat2::scaled_identity((n - 1.0) / n));
}

GaussianChannelXY compose(const GaussianChannelXY& first, const GaussianChannelXY& second) {
    Mat2 x = second.X * first.X;
    Mat2 y = second.X.transpose() * first.Y * second.X + second.Y;
    Vec2 delta{second.X.a * first.delta.x + second.X.b * first.delta.y + second.delta.x,
               second.X.c * first.delta.x + second.X.d * first.delta.y + second.delta.y};
    return GaussianChannelXY::make(x, y, delta);
}

bool n_extendable_gaussian(const GaussianChannelXY& ch, int n) {
    if (n < 1)
        throw std::invalid_argument("need n >= 1");
    double det_y = ch.Y.det();
    if (det_y < 0.0)
        return false;
    double inv_n = 1.0 / n;
    return std::sqrt(det_y) + 1e-12 >= 1.0 - inv_n + std::abs(ch.X.det() - inv_n);
}

bounds::BoundResult ub_thermal(int n_meas, double eps, int modes) {
    if (n_meas < 1 || eps < 0.0 || modes < 1)
        throw std::invalid_argument("need n >= 1, eps >= 0, modes >= 1");
    // Per-mode extendibility carries over to the product channel, so the
    // threshold is mode-count independent.
    return bounds::clamp_bound(1.0 / (n_meas * (1.0 - 0.5 * eps)), true, "thermal-extendibility");
}

bounds::BoundResult ub_gaussian_meas(double eps) {
    if (eps < 0.0)
        throw std::invalid_argument("need eps >= 0");
    return bounds::clamp_bound(1.0 / (2.0 - eps), true, "gaussian-measurements");
}

HomodyneSimParams homodyne_sim_params(double eta, double eps) {
    if (eta < 0.0 || eta > 1.0 || eps < 0.0)
        throw std::invalid_argument("need eta in [0, 1] and eps >= 0");
    double sigma2 = 0.5 * (1.0 - 2.0 * eta + eps * eta);
    if (sigma2 < -1e-15)
        throw std::invalid_argument("dither variance (1 - 2 eta + eps eta)/2 is negative");
    return HomodyneSimParams{std::sqrt(2.0 * eta), std::max(sigma2, 0.0)};
}

namespace {

constexpr int kMaxMomentOrder = 10;

double odd_double_factorial(int k) {  // (2k - 1)!!
    double r = 1.0;
    for (int j = 3; j <= 2 * k - 1; j += 2)
        r *= j;
    return r;
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int j = 1; j <= k; ++j)
        r = r * (n - k + j) / j;
    return r;
}

void check_moment_args(const std::vector<double>& input_moments, int n_max) {
    if (n_max < 0 || n_max > kMaxMomentOrder)
        throw std::invalid_argument("moment order capped at 10");
    if (input_moments.size() < static_cast<std::size_t>(n_max) + 1)
        throw std::invalid_argument("need input moments up to the requested order");
}

// Common binomial convolution: sum_k C(n, 2k) s^(n-2k) <X^(n-2k)> (2k-1)!! g^k,
// with s the coherent scaling and g the variance of the added Gaussian part.
std::vector<double> convolve_moments(double s, double g, const std::vector<double>& in,
                                     int n_max) {
    std::vector<double> out(n_max + 1, 0.0);
    for (int n = 0; n <= n_max; ++n) {
        double acc = 0.0;
        for (int k = 0; 2 * k <= n; ++k) {
            acc += binomial(n, 2 * k) * std::pow(s, n - 2 * k) * in[n - 2 * k] *
                   odd_double_factorial(k) * std::pow(g, k);
        }
        out[n] = acc;
    }
    return out;
}

}  // namespace

std::vector<double> gaussian_moments(double mean, double variance, int n_max) {
    if (n_max < 0 || n_max > kMaxMomentOrder)
        throw std::invalid_argument("moment order capped at 10");
    if (variance < 0.0)
        throw std::invalid_argument("variance must be nonnegative");
    std::vector<double> out(n_max + 1, 0.0);
    for (int n = 0; n <= n_max; ++n) {
        double acc = 0.0;
        for (int k = 0; 2 * k <= n; ++k)
            acc += binomial(n, 2 * k) * std::pow(mean, n - 2 * k) * odd_double_factorial(k) *
                   std::pow(variance, k);
        out[n] = acc;
    }
    return out;
}

std::vector<double> thermal_output_moments(double eta, double eps,
                                           const std::vector<double>& input_moments, int n_max) {
    check_moment_args(input_moments, n_max);
    return convolve_moments(std::sqrt(eta), 0.5 * (1.0 - eta + eps * eta), input_moments, n_max);
}

std::vector<double> heterodyne_sim_moments(double eta, double eps,
                                           const std::vector<double>& input_moments, int n_max) {
    check_moment_args(input_moments, n_max);
    HomodyneSimParams p = homodyne_sim_params(eta, eps);
    double s = p.gain / std::sqrt(2.0);
    double g = 0.25 * p.gain * p.gain + p.sigma2;
    return convolve_moments(s, g, input_moments, n_max);
}

double homodyne_moment_check(double eta, double eps,
                             const std::vector<std::vector<double>>& input_moments_per_angle,
                             int n_max) {
    double dev = 0.0;
    for (const auto& row : input_moments_per_angle) {
        auto target = thermal_output_moments(eta, eps, row, n_max);
        auto sim = heterodyne_sim_moments(eta, eps, row, n_max);
        for (int n = 0; n <= n_max; ++n)
            dev = std::max(dev, std::abs(target[n] - sim[n]));
    }
    return dev;
}

bool gauss_decomp_necessary(const GaussianChannelXY& candidate, double eta, double eps) {
    if (eta < 0.0 || eta > 1.0 || eps < 0.0)
        throw std::invalid_argument("need eta in [0, 1] and eps >= 0");
    constexpr double tol = 1e-10;
    Mat2 target_x = Mat2::scaled_identity(std::sqrt(eta));
    if (candidate.X.max_abs_diff(target_x) > tol)
        return false;
    Mat2 slack = candidate.Y * -1.0 + Mat2::scaled_identity(1.0 - eta + eta * eps);
    return slack.min_eigenvalue() >= -tol;
}

bool no_gauss_cc_attack(double eta, double eps, int n) {
    GaussianChannelXY th = thermal_xy(ThermalParams::make(eta, eps));
    bool extendable = n_extendable_gaussian(th, n);
    // Replicated contradiction: any admissible Gaussian component has
    // det X = eta and sqrt(det Y) <= 1 - eta + eta*eps, so its extendibility
    // needs exactly the thermal channel's own criterion.
    double inv_n = 1.0 / n;
    bool component_possible =
        (1.0 - eta + eta * eps) + 1e-12 >= 1.0 - inv_n + std::abs(eta - inv_n);
    return !extendable && !component_possible;
}

}  // namespace jmqkd::gauss
