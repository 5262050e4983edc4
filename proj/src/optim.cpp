#include "jmqkd/optim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jmqkd::optim {

RootBracket RootBracket::make(const std::function<double(double)>& f, double lo, double hi,
                              double tol) {
    if (!(lo < hi) || !(tol > 0.0))
        throw std::invalid_argument("bracket requires lo < hi and tol > 0");
    if (f(lo) * f(hi) > 0.0)
        throw std::invalid_argument("bracket endpoints do not straddle a sign change");
    return RootBracket{lo, hi, tol};
}

double bisect(const std::function<double(double)>& f, const RootBracket& bracket) {
    double lo = bracket.lo;
    double hi = bracket.hi;
    double flo = f(lo);
    int steps = static_cast<int>(std::ceil(std::log2((hi - lo) / bracket.tol)));
    for (int i = 0; i < steps; ++i) {
        double mid = 0.5 * (lo + hi);
        double fmid = f(mid);
        if (fmid == 0.0)
            return mid;
        if (flo * fmid <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    return 0.5 * (lo + hi);
}

double distance_sum(const std::vector<Vec3>& points, const Vec3& t) {
    double s = 0.0;
    for (const auto& p : points)
        s += (p - t).norm();
    return s;
}

namespace {

// Subgradient optimality for a candidate that coincides with data points:
// the pull of the remaining points must not exceed the local multiplicity.
bool vertex_is_optimal(const std::vector<Vec3>& points, const Vec3& v, double eps) {
    Vec3 pull{};
    int multiplicity = 0;
    for (const auto& p : points) {
        double d = (p - v).norm();
        if (d <= eps) {
            ++multiplicity;
        } else {
            pull += (p - v) * (1.0 / d);
        }
    }
    return pull.norm() <= static_cast<double>(multiplicity) + 1e-12;
}

}  // namespace

Vec3 weiszfeld(const std::vector<Vec3>& points, double tol) {
    if (points.size() < 2)
        throw std::invalid_argument("weiszfeld requires at least two points");
    constexpr double kEps = 1e-12;
    constexpr int kMaxIter = 100000;

    if (points.size() == 2) {
        // Any point of the segment is optimal; midpoint by convention.
        return (points[0] + points[1]) * 0.5;
    }

    // A data point can be the optimum (e.g. near-collinear sets); test each.
    for (const auto& p : points) {
        if (vertex_is_optimal(points, p, kEps))
            return p;
    }

    Vec3 x{};
    for (const auto& p : points)
        x += p;
    x = x * (1.0 / static_cast<double>(points.size()));

    double prev_obj = distance_sum(points, x);
    for (int it = 0; it < kMaxIter; ++it) {
        Vec3 num{};
        double den = 0.0;
        bool on_vertex = false;
        for (const auto& p : points) {
            double d = (p - x).norm();
            if (d <= kEps) {
                on_vertex = true;
                break;
            }
            num += p * (1.0 / d);
            den += 1.0 / d;
        }
        if (on_vertex) {
            if (vertex_is_optimal(points, x, kEps))
                return x;
            x.x += kEps;  // step off the singularity and continue
            continue;
        }
        Vec3 next = num * (1.0 / den);
        double step = (next - x).norm();
        double obj = distance_sum(points, next);
        if (obj > prev_obj + 1e-12)
            throw std::runtime_error("weiszfeld objective increased");
        x = next;
        prev_obj = obj;
        if (step <= tol * std::max(1.0, x.norm()))
            return x;
    }
    throw std::runtime_error("weiszfeld did not converge within the iteration cap");
}

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& seed, double tol, double initial_step) {
    if (seed.empty())
        throw std::invalid_argument("nelder_mead requires a nonempty seed");
    const std::size_t n = seed.size();
    constexpr int kMaxIter = 10000;

    std::vector<std::vector<double>> verts(n + 1, seed);
    for (std::size_t i = 0; i < n; ++i)
        verts[i + 1][i] += initial_step;
    std::vector<double> vals(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        vals[i] = f(verts[i]);

    auto order = [&] {
        for (std::size_t i = 1; i <= n; ++i) {
            auto v = verts[i];
            auto fv = vals[i];
            std::size_t j = i;
            while (j > 0 && vals[j - 1] > fv) {
                verts[j] = verts[j - 1];
                vals[j] = vals[j - 1];
                --j;
            }
            verts[j] = v;
            vals[j] = fv;
        }
    };
    auto diameter = [&] {
        double d = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                s += (verts[i][k] - verts[0][k]) * (verts[i][k] - verts[0][k]);
            d = std::max(d, std::sqrt(s));
        }
        return d;
    };

    order();
    int it = 0;
    for (; it < kMaxIter && diameter() >= tol; ++it) {
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                centroid[k] += verts[i][k] / static_cast<double>(n);

        auto blend = [&](double c) {
            std::vector<double> p(n);
            for (std::size_t k = 0; k < n; ++k)
                p[k] = centroid[k] + c * (verts[n][k] - centroid[k]);
            return p;
        };

        auto reflected = blend(-1.0);
        double fr = f(reflected);
        if (fr < vals[0]) {
            auto expanded = blend(-2.0);
            double fe = f(expanded);
            if (fe < fr) {
                verts[n] = expanded;
                vals[n] = fe;
            } else {
                verts[n] = reflected;
                vals[n] = fr;
            }
        } else if (fr < vals[n - 1]) {
            verts[n] = reflected;
            vals[n] = fr;
        } else {
            auto contracted = blend(fr < vals[n] ? -0.5 : 0.5);
            double fc = f(contracted);
            if (fc < std::min(fr, vals[n])) {
                verts[n] = contracted;
                vals[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t k = 0; k < n; ++k)
                        verts[i][k] = verts[0][k] + 0.5 * (verts[i][k] - verts[0][k]);
                    vals[i] = f(verts[i]);
                }
            }
        }
        order();
    }
    return NelderMeadResult{verts[0], vals[0], it};
}

double binary_entropy(double x) {
    if (x < -1e-12 || x > 1.0 + 1e-12)
        throw std::invalid_argument("binary_entropy argument outside [0, 1]");
    if (x <= 0.0 || x >= 1.0)
        return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

}  // namespace jmqkd::optim
