#pragma once

#include <functional>
#include <vector>

#include "jmqkd/vec3.hpp"

namespace jmqkd::optim {

/// Sign-change bracket for bisection; construction verifies f(lo)*f(hi) <= 0.
struct RootBracket {
    double lo;
    double hi;
    double tol;

    static RootBracket make(const std::function<double(double)>& f, double lo, double hi,
                            double tol);
};

/// Deterministic bisection: ceil(log2((hi-lo)/tol)) halvings, returns the
/// midpoint of the final interval.
double bisect(const std::function<double(double)>& f, const RootBracket& bracket);

/// Geometric median of a point set (minimizer of the summed Euclidean
/// distances). Vertex optima are detected through the subgradient criterion
/// before iterating; two-point inputs return the segment midpoint.
Vec3 weiszfeld(const std::vector<Vec3>& points, double tol = 1e-12);

double distance_sum(const std::vector<Vec3>& points, const Vec3& t);

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
};

/// Derivative-free simplex minimization with the standard coefficients
/// (reflect 1, expand 2, contract 1/2, shrink 1/2). Stops when the simplex
/// diameter falls below tol or after 10^4 iterations; never returns a value
/// worse than the seed.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& seed, double tol = 1e-8,
                             double initial_step = 0.1);

/// Binary entropy in bits with h(0) = h(1) = 0.
double binary_entropy(double x);

}  // namespace jmqkd::optim
