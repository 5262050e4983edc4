#include "jmqkd/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jmqkd {

HermitianOp::HermitianOp(int dim, std::vector<Complex> entries)
    : dim_(dim), entries_(std::move(entries)) {
    if (dim < 1)
        throw std::invalid_argument("HermitianOp dimension must be >= 1");
    if (entries_.size() != static_cast<std::size_t>(dim) * dim)
        throw std::invalid_argument("HermitianOp entry count does not match dimension");
    for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j) {
            Complex a = at(i, j);
            Complex b = at(j, i);
            if (std::abs(a - std::conj(b)) > kHermTol)
                throw std::invalid_argument("matrix is not Hermitian");
        }
    }
}

HermitianOp HermitianOp::zero(int dim) {
    return HermitianOp(dim, std::vector<Complex>(static_cast<std::size_t>(dim) * dim, 0.0));
}

HermitianOp HermitianOp::identity(int dim) {
    HermitianOp m = zero(dim);
    for (int i = 0; i < dim; ++i)
        m.set(i, i, 1.0);
    return m;
}

HermitianOp HermitianOp::pauli(int axis) {
    switch (axis) {
        case 0:
            return HermitianOp(2, {0.0, 1.0, 1.0, 0.0});
        case 1:
            return HermitianOp(2, {0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0});
        case 2:
            return HermitianOp(2, {1.0, 0.0, 0.0, -1.0});
        default:
            throw std::invalid_argument("pauli axis must be 0, 1 or 2");
    }
}

HermitianOp HermitianOp::from_bloch(double t, const Vec3& r) {
    return HermitianOp(2, {Complex(0.5 * (t + r.z), 0.0), Complex(0.5 * r.x, -0.5 * r.y),
                           Complex(0.5 * r.x, 0.5 * r.y), Complex(0.5 * (t - r.z), 0.0)});
}

void HermitianOp::set(int i, int j, Complex v) {
    entries_[static_cast<std::size_t>(i) * dim_ + j] = v;
    entries_[static_cast<std::size_t>(j) * dim_ + i] = std::conj(v);
}

double HermitianOp::trace() const {
    double t = 0.0;
    for (int i = 0; i < dim_; ++i)
        t += at(i, i).real();
    return t;
}

namespace {

// Cyclic Jacobi on the real-symmetric embedding [[Re, -Im], [Im, Re]]; the
// embedding has the same spectrum (doubled multiplicities).
double min_eig_jacobi(const HermitianOp& m) {
    const int d = m.dim();
    const int n = 2 * d;
    std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
    auto idx = [n](int i, int j) { return static_cast<std::size_t>(i) * n + j; };
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            Complex v = m.at(i, j);
            a[idx(i, j)] = v.real();
            a[idx(i + d, j + d)] = v.real();
            a[idx(i, j + d)] = -v.imag();
            a[idx(i + d, j)] = v.imag();
        }
    }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q)
                off += a[idx(p, q)] * a[idx(p, q)];
        if (off < 1e-30)
            break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double apq = a[idx(p, q)];
                if (std::abs(apq) < 1e-300)
                    continue;
                double theta = (a[idx(q, q)] - a[idx(p, p)]) / (2.0 * apq);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a[idx(k, p)];
                    double akq = a[idx(k, q)];
                    a[idx(k, p)] = c * akp - s * akq;
                    a[idx(k, q)] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a[idx(p, k)];
                    double aqk = a[idx(q, k)];
                    a[idx(p, k)] = c * apk - s * aqk;
                    a[idx(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    double lo = a[idx(0, 0)];
    for (int i = 1; i < n; ++i)
        lo = std::min(lo, a[idx(i, i)]);
    return lo;
}

}  // namespace

double HermitianOp::min_eigenvalue() const {
    if (dim_ == 1)
        return at(0, 0).real();
    if (dim_ == 2) {
        double tr = trace();
        Complex od = at(0, 1);
        double dz = 0.5 * (at(0, 0).real() - at(1, 1).real());
        double radius = std::sqrt(dz * dz + std::norm(od));
        return 0.5 * tr - radius;
    }
    return min_eig_jacobi(*this);
}

HermitianOp& HermitianOp::operator+=(const HermitianOp& o) {
    if (o.dim_ != dim_)
        throw std::invalid_argument("dimension mismatch");
    for (std::size_t k = 0; k < entries_.size(); ++k)
        entries_[k] += o.entries_[k];
    return *this;
}

HermitianOp HermitianOp::operator+(const HermitianOp& o) const {
    HermitianOp r = *this;
    r += o;
    return r;
}

HermitianOp HermitianOp::operator-(const HermitianOp& o) const { return *this + o * -1.0; }

HermitianOp HermitianOp::operator*(double s) const {
    HermitianOp r = *this;
    for (auto& e : r.entries_)
        e *= s;
    return r;
}

double HermitianOp::max_abs_diff(const HermitianOp& o) const {
    if (o.dim_ != dim_)
        throw std::invalid_argument("dimension mismatch");
    double m = 0.0;
    for (std::size_t k = 0; k < entries_.size(); ++k)
        m = std::max(m, std::abs(entries_[k] - o.entries_[k]));
    return m;
}

Povm::Povm(std::vector<HermitianOp> elements, std::vector<std::string> labels)
    : elements_(std::move(elements)), labels_(std::move(labels)) {
    if (elements_.empty())
        throw std::invalid_argument("POVM needs at least one element");
    if (labels_.size() != elements_.size())
        throw std::invalid_argument("POVM label count mismatch");
    int d = elements_.front().dim();
    for (const auto& e : elements_) {
        if (e.dim() != d)
            throw std::invalid_argument("POVM elements must share a dimension");
        if (!e.is_psd())
            throw std::invalid_argument("POVM element is not positive semidefinite");
    }
    if (sum_deviation() > kPsdTol)
        throw std::invalid_argument("POVM elements do not sum to the identity");
}

double Povm::sum_deviation() const {
    HermitianOp sum = HermitianOp::zero(dim());
    for (const auto& e : elements_)
        sum += e;
    return sum.max_abs_diff(HermitianOp::identity(dim()));
}

}  // namespace jmqkd
