#include <cmath>

#include "doctest.h"
#include "jmqkd/keyrate.hpp"
#include "jmqkd/optim.hpp"
#include "test_helpers.hpp"

using namespace jmqkd;
using namespace jmqkd::optim;

namespace {

// Two-stage brute-force oracle for the geometric median: coarse pass over a
// bounding box, fine pass around the coarse winner.
Vec3 grid_median(const std::vector<Vec3>& pts, double fine_step) {
    auto scan = [&](Vec3 center, double half, double step) {
        Vec3 best = center;
        double best_val = distance_sum(pts, center);
        for (double x = center.x - half; x <= center.x + half; x += step)
            for (double y = center.y - half; y <= center.y + half; y += step)
                for (double z = center.z - half; z <= center.z + half; z += step) {
                    double val = distance_sum(pts, Vec3{x, y, z});
                    if (val < best_val) {
                        best_val = val;
                        best = Vec3{x, y, z};
                    }
                }
        return best;
    };
    Vec3 coarse = scan(Vec3{}, 1.5, 0.05);
    return scan(coarse, 0.06, fine_step);
}

}  // namespace

TEST_CASE("bisect finds simple roots at the requested tolerance") {
    auto lin = [](double x) { return x - 0.5; };
    auto b1 = RootBracket::make(lin, 0.0, 1.0, 1e-6);
    CHECK(bisect(lin, b1) == doctest::Approx(0.5).epsilon(1e-5));

    auto sq = [](double x) { return x * x - 2.0; };
    auto b2 = RootBracket::make(sq, 1.0, 2.0, 1e-6);
    CHECK(bisect(sq, b2) == doctest::Approx(1.414214).epsilon(1e-5));
}

TEST_CASE("bisect reproduces the single-key-measurement efficiency threshold") {
    auto f = [](double eta) { return keyrate::bb84_bound(eta, 1.0, false).value; };
    auto b = RootBracket::make(f, 0.5, 1.0, 1e-6);
    CHECK(std::abs(bisect(f, b) - 0.830) < 1e-3);
}

TEST_CASE("invalid brackets are rejected") {
    auto f = [](double x) { return x + 1.0; };
    CHECK_THROWS_AS(RootBracket::make(f, 0.0, 1.0, 1e-6), std::invalid_argument);
    CHECK_THROWS_AS(RootBracket::make(f, 1.0, 0.0, 1e-6), std::invalid_argument);
}

TEST_CASE("weiszfeld matches a brute-force grid on the axis triple") {
    std::vector<Vec3> pts = {kXAxis, kYAxis, kZAxis};
    Vec3 med = weiszfeld(pts);
    Vec3 oracle = grid_median(pts, 1e-3);
    CHECK(distance_sum(pts, med) <= distance_sum(pts, oracle) + 1e-4);
    CHECK((med - Vec3{1.0 / 3, 1.0 / 3, 1.0 / 3}).norm() < 1e-6);
}

TEST_CASE("weiszfeld matches the grid oracle on random sets") {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 5; ++trial) {
        auto pts = testing::random_unit_set(rng, 4);
        Vec3 med = weiszfeld(pts);
        Vec3 oracle = grid_median(pts, 1e-3);
        CHECK(distance_sum(pts, med) <= distance_sum(pts, oracle) + 1e-4);
    }
}

TEST_CASE("weiszfeld degenerate inputs") {
    CHECK((weiszfeld({kZAxis, -kZAxis}) - Vec3{}).norm() < 1e-15);  // segment midpoint
    Vec3 p{0.3, -0.2, 0.9};
    CHECK((weiszfeld({p, p, p}) - p).norm() < 1e-15);
    // vertex optimum: three coincident points pin the median
    CHECK((weiszfeld({p, p, p, kXAxis}) - p).norm() < 1e-15);
}

TEST_CASE("weiszfeld never increases the objective en route") {
    std::mt19937 rng(7);
    auto pts = testing::random_unit_set(rng, 5);
    Vec3 centroid{};
    for (const auto& q : pts)
        centroid += q * (1.0 / 5.0);
    CHECK(distance_sum(pts, weiszfeld(pts)) <= distance_sum(pts, centroid) + 1e-12);
}

TEST_CASE("nelder-mead minimizes smooth functions") {
    auto quad1 = [](const std::vector<double>& x) { return (x[0] - 0.3) * (x[0] - 0.3); };
    auto r1 = nelder_mead(quad1, {0.0}, 1e-10);
    CHECK(r1.x[0] == doctest::Approx(0.3).epsilon(1e-6));

    auto bowl = [](const std::vector<double>& x) { return x[0] * x[0] + x[1] * x[1]; };
    auto r2 = nelder_mead(bowl, {1.0, 1.0}, 1e-10);
    CHECK(std::abs(r2.x[0]) < 1e-6);
    CHECK(std::abs(r2.x[1]) < 1e-6);
    CHECK(r2.value <= bowl({1.0, 1.0}));
}

TEST_CASE("binary entropy reference points") {
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(0.883) == doctest::Approx(0.520668).epsilon(2e-5));
    CHECK_THROWS_AS(binary_entropy(1.2), std::invalid_argument);
}
