#include "jmqkd/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "jmqkd/optim.hpp"

namespace jmqkd::bounds {

BoundResult clamp_bound(double raw, bool valid, std::string formula) {
    BoundResult r;
    r.raw = raw;
    r.value = std::clamp(raw, 0.0, 1.0);
    r.valid = valid;
    r.formula = std::move(formula);
    return r;
}

BoundResult ub_loss(int n_meas) {
    if (n_meas < 1)
        throw std::invalid_argument("need at least one measurement");
    return clamp_bound(1.0 / n_meas, true, "loss-only");
}

BoundResult ub_concat(double q_star, double v_star, double v) {
    if (!(q_star > 0.0 && q_star <= 1.0))
        throw std::invalid_argument("q_star must lie in (0, 1]");
    if (!(0.0 <= v_star && v_star <= v && v <= 1.0))
        throw std::invalid_argument("requires 0 <= v_star <= v <= 1");
    if (v_star == 1.0 && v == 1.0)
        return clamp_bound(q_star, true, "replacement-noise-concat");
    double denom = (1.0 - v) + (v - v_star) / q_star;
    return clamp_bound((1.0 - v_star) / denom, true, "replacement-noise-concat");
}

BoundResult ub_whitenoise(int n_meas, int dim, double v) {
    if (n_meas < 1 || dim < 2)
        throw std::invalid_argument("need n >= 1 and dim >= 2");
    double denom = v * (dim + 1) - 1.0;
    if (denom <= 0.0) {
        // Noise alone already breaks incompatibility; eta is unconstrained.
        return clamp_bound(std::numeric_limits<double>::infinity(), false, "white-noise");
    }
    return clamp_bound(dim / (n_meas * denom), true, "white-noise");
}

BoundResult ub_whitenoise_dimfree(int n_meas, double v) {
    if (n_meas < 1)
        throw std::invalid_argument("need at least one measurement");
    if (v <= 0.0)
        return clamp_bound(std::numeric_limits<double>::infinity(), false, "white-noise-dimfree");
    return clamp_bound(1.0 / (n_meas * v), true, "white-noise-dimfree");
}

BoundResult ub_binary_qubit(int n_meas, double v) {
    if (n_meas < 2)
        throw std::invalid_argument("binary-qubit bound needs n >= 2");
    double rn = std::sqrt(static_cast<double>(n_meas));
    double denom = rn * ((rn + 1.0) * v - 1.0);
    if (denom <= 0.0)
        return clamp_bound(std::numeric_limits<double>::infinity(), false, "binary-qubit");
    return clamp_bound(1.0 / denom, true, "binary-qubit");
}

BoundResult ub_all_qubit_pvms(double v) {
    if (v < 0.0 || v > 1.0)
        throw std::invalid_argument("visibility must lie in [0, 1]");
    return clamp_bound(2.0 * (1.0 - v), true, "all-qubit-pvms");
}

BoundResult ub_all_povms(double v, int dim) {
    if (v < 0.0 || v > 1.0 || dim < 2)
        throw std::invalid_argument("need v in [0, 1] and dim >= 2");
    return clamp_bound(std::pow(1.0 - v, dim - 1), true, "all-povms");
}

double jm_vis_pair(const Vec3& m1, const Vec3& m2) {
    return 2.0 / ((m1 + m2).norm() + (m1 - m2).norm());
}

double jm_vis_triple(const Vec3& m1, const Vec3& m2, const Vec3& m3) {
    Vec3 t0 = m1 + m2 + m3;
    std::vector<Vec3> ts = {t0, 2.0 * m1 - t0, 2.0 * m2 - t0, 2.0 * m3 - t0};
    Vec3 ft = optim::weiszfeld(ts);
    return 4.0 / optim::distance_sum(ts, ft);
}

namespace {

constexpr int kMaxEnumeration = 20;

double sign_pattern_sum(const std::vector<Vec3>& ms) {
    const int n = static_cast<int>(ms.size());
    if (n < 1)
        throw std::invalid_argument("need at least one vector");
    if (n > kMaxEnumeration)
        throw std::invalid_argument("sign-pattern enumeration capped at 20 vectors");
    double total = 0.0;
    const std::size_t count = std::size_t{1} << n;
    for (std::size_t a = 0; a < count; ++a) {
        Vec3 w{};
        for (int k = 0; k < n; ++k)
            w += (a >> k) & 1 ? -ms[k] : ms[k];
        total += w.norm();
    }
    return total;
}

}  // namespace

double jm_vis_set(const std::vector<Vec3>& ms) {
    double total = sign_pattern_sum(ms);
    return std::ldexp(1.0, static_cast<int>(ms.size())) / total;
}

SmearedJmCheck check_jm_bloch(const std::vector<Vec3>& ms) {
    SmearedJmCheck c;
    for (const auto& m : ms)
        if (m.norm() > 1.0 + 1e-12)
            throw std::invalid_argument("smeared vectors must satisfy |m| <= 1");
    c.lhs = sign_pattern_sum(ms);
    c.jm = c.lhs <= std::ldexp(1.0, static_cast<int>(ms.size())) + 1e-12;
    double q = 0.0;
    for (const auto& m : ms)
        q += m.norm2();
    c.relaxation = q <= 1.0 + 1e-12;
    return c;
}

ParentPovmCertificate build_parent_povm(const std::vector<Vec3>& ms) {
    const int n = static_cast<int>(ms.size());
    if (n < 1 || n > 12)
        throw std::invalid_argument("parent construction supports 1..12 measurements");
    for (const auto& m : ms)
        if (m.norm() > 1.0 + 1e-12)
            throw std::invalid_argument("smeared vectors must satisfy |m| <= 1");

    const std::size_t patterns = std::size_t{1} << n;
    std::vector<Vec3> w(patterns);
    double total = 0.0;
    for (std::size_t a = 0; a < patterns; ++a) {
        Vec3 acc{};
        for (int k = 0; k < n; ++k)
            acc += (a >> k) & 1 ? -ms[k] : ms[k];
        w[a] = acc;
        total += acc.norm();
    }

    const double two_n = std::ldexp(1.0, n);
    // Informative-branch weight; ratio >= 1 means the proof's randomness
    // mixing reaches the target exactly, otherwise best effort.
    double mix = total > 0.0 ? std::min(1.0, total / two_n) : 0.0;

    std::vector<HermitianOp> elems;
    std::vector<std::string> labels;
    elems.reserve(2 * patterns);
    for (std::size_t a = 0; a < patterns; ++a) {
        double p_a = total > 0.0 ? w[a].norm() / total : 1.0 / static_cast<double>(patterns);
        Vec3 dir = w[a].norm() > 0.0 ? w[a].normalized() : Vec3{};
        for (int sign = 0; sign < 2; ++sign) {
            double s = sign == 0 ? 1.0 : -1.0;
            elems.push_back(HermitianOp::from_bloch(p_a, s * p_a * dir));
            std::string label = sign == 0 ? "+" : "-";
            label += "|";
            for (int k = 0; k < n; ++k)
                label += (a >> k) & 1 ? '1' : '0';
            labels.push_back(label);
        }
    }

    std::vector<std::vector<double>> response(n, std::vector<double>(elems.size(), 0.0));
    for (int y = 0; y < n; ++y) {
        for (std::size_t a = 0; a < patterns; ++a) {
            bool flipped = (a >> y) & 1;
            // element order: (+, a) then (-, a)
            double det_plus = flipped ? 0.0 : 1.0;
            response[y][2 * a] = mix * det_plus + 0.5 * (1.0 - mix);
            response[y][2 * a + 1] = mix * (1.0 - det_plus) + 0.5 * (1.0 - mix);
        }
    }

    double residual = 0.0;
    for (int y = 0; y < n; ++y) {
        HermitianOp sim = HermitianOp::zero(2);
        for (std::size_t e = 0; e < elems.size(); ++e)
            sim += elems[e] * response[y][e];
        HermitianOp target = HermitianOp::from_bloch(1.0, ms[y]);
        residual = std::max(residual, sim.max_abs_diff(target));
    }

    return ParentPovmCertificate{Povm(std::move(elems), std::move(labels)), std::move(response),
                                 residual, mix};
}

double kjm_halving(double eta) {
    if (eta < 0.0 || eta > 1.0)
        throw std::invalid_argument("eta must lie in [0, 1]");
    return eta / (1.0 + eta);
}

BoundResult kjm_binary_qubit(int k_key, double v) {
    if (k_key < 1)
        throw std::invalid_argument("need k >= 1");
    if (v <= 0.0)
        return clamp_bound(std::numeric_limits<double>::infinity(), false, "kjm-binary-qubit");
    double rk = std::sqrt(static_cast<double>(k_key));
    return clamp_bound(1.0 / (v * (k_key + rk)), true, "kjm-binary-qubit");
}

BoundResult kjm_whitenoise(int k_key, int dim, double v) {
    if (k_key < 1 || dim < 2)
        throw std::invalid_argument("need k >= 1 and dim >= 2");
    double denom = v * (dim + 1) - 1.0;
    if (denom <= 0.0)
        return clamp_bound(std::numeric_limits<double>::infinity(), false, "kjm-white-noise");
    return clamp_bound(dim / ((k_key + 1) * denom), true, "kjm-white-noise");
}

BoundResult kjm_thermal(int k_key, double eps) {
    if (k_key < 1 || eps < 0.0)
        throw std::invalid_argument("need k >= 1 and eps >= 0");
    return clamp_bound(1.0 / ((k_key + 1) * (1.0 - 0.5 * eps)), true, "kjm-thermal");
}

}  // namespace jmqkd::bounds
