#include "jmqkd/qop.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace jmqkd {

BlochMeasurement BlochMeasurement::make(const Vec3& m, double gamma) {
    if (std::abs(gamma) > 1.0 + 1e-12)
        throw std::invalid_argument("bias must lie in [-1, 1]");
    double n = m.norm();
    if (n > 1.0 - std::abs(gamma) + 1e-12)
        throw std::invalid_argument("positivity requires |m| <= 1 - |bias|");
    BlochMeasurement b;
    b.bias = gamma;
    b.norm = n;
    b.direction = n > 0.0 ? m.normalized() : kZAxis;
    return b;
}

Povm bloch_to_povm(const BlochMeasurement& m) {
    Vec3 v = m.bloch_vector();
    HermitianOp plus = HermitianOp::from_bloch(1.0 + m.bias, v);
    HermitianOp minus = HermitianOp::from_bloch(1.0 - m.bias, -v);
    return Povm({plus, minus}, {"+", "-"});
}

NoClickCmu NoClickCmu::make(std::vector<Povm> measurements, double eta, double vis) {
    if (measurements.empty())
        throw std::invalid_argument("CMU needs at least one measurement");
    if (eta < 0.0 || eta > 1.0 || vis < 0.0 || vis > 1.0)
        throw std::invalid_argument("eta and vis must lie in [0, 1]");
    int d = measurements.front().dim();
    for (const auto& p : measurements)
        if (p.dim() != d)
            throw std::invalid_argument("measurements must share a dimension");
    return NoClickCmu{std::move(measurements), eta, vis, d};
}

NoClickCmu NoClickCmu::from_bloch(const std::vector<BlochMeasurement>& ms, double eta,
                                  double vis) {
    std::vector<Povm> povms;
    povms.reserve(ms.size());
    for (const auto& m : ms)
        povms.push_back(bloch_to_povm(m));
    return make(std::move(povms), eta, vis);
}

std::vector<Povm> effective_noclick_povms(const NoClickCmu& cmu) {
    const int d = cmu.dim;
    const HermitianOp id = HermitianOp::identity(d);
    std::vector<Povm> out;
    out.reserve(cmu.measurements.size());
    for (const auto& ideal : cmu.measurements) {
        std::vector<HermitianOp> elems;
        std::vector<std::string> labels;
        for (std::size_t b = 0; b < ideal.size(); ++b) {
            double q = ideal.element(b).trace() / d;
            elems.push_back(ideal.element(b) * (cmu.eta * cmu.vis) +
                            id * (cmu.eta * (1.0 - cmu.vis) * q));
            labels.push_back(ideal.label(b));
        }
        elems.push_back(id * (1.0 - cmu.eta));
        labels.emplace_back("no-click");
        out.emplace_back(std::move(elems), std::move(labels));
    }
    return out;
}

UnbiasResult unbias_reduce(const std::vector<BlochMeasurement>& ms) {
    UnbiasResult r;
    for (const auto& m : ms) {
        if (m.norm == 0.0) {
            ++r.dropped_dummies;
        } else {
            r.directions.push_back(m.direction);
        }
    }
    return r;
}

}  // namespace jmqkd
