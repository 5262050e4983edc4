#pragma once

#include <complex>
#include <string>
#include <vector>

#include "jmqkd/vec3.hpp"

namespace jmqkd {

using Complex = std::complex<double>;

constexpr double kHermTol = 1e-12;
constexpr double kPsdTol = 1e-10;

/// Dense d x d complex Hermitian matrix. Carrier for POVM elements and
/// density operators; construction enforces Hermiticity to kHermTol.
class HermitianOp {
  public:
    HermitianOp() = default;
    HermitianOp(int dim, std::vector<Complex> entries);

    static HermitianOp zero(int dim);
    static HermitianOp identity(int dim);
    /// axis: 0 -> sigma_x, 1 -> sigma_y, 2 -> sigma_z
    static HermitianOp pauli(int axis);
    /// (t*I + r . sigma) / 2 in Bloch form; trace t, vector part r.
    static HermitianOp from_bloch(double t, const Vec3& r);

    int dim() const { return dim_; }
    Complex at(int i, int j) const { return entries_[static_cast<std::size_t>(i) * dim_ + j]; }
    void set(int i, int j, Complex v);

    double trace() const;
    double min_eigenvalue() const;
    bool is_psd(double tol = kPsdTol) const { return min_eigenvalue() >= -tol; }

    HermitianOp& operator+=(const HermitianOp& o);
    HermitianOp operator+(const HermitianOp& o) const;
    HermitianOp operator-(const HermitianOp& o) const;
    HermitianOp operator*(double s) const;

    /// Largest |entry difference| against another operator of the same dim.
    double max_abs_diff(const HermitianOp& o) const;

  private:
    int dim_ = 0;
    std::vector<Complex> entries_;
};

inline HermitianOp operator*(double s, const HermitianOp& m) { return m * s; }

/// Ordered list of Hermitian effects summing to the identity.
class Povm {
  public:
    Povm(std::vector<HermitianOp> elements, std::vector<std::string> labels);

    int dim() const { return elements_.empty() ? 0 : elements_.front().dim(); }
    std::size_t size() const { return elements_.size(); }
    const HermitianOp& element(std::size_t i) const { return elements_[i]; }
    const std::string& label(std::size_t i) const { return labels_[i]; }
    const std::vector<HermitianOp>& elements() const { return elements_; }

    /// Largest deviation of the element sum from the identity.
    double sum_deviation() const;

  private:
    std::vector<HermitianOp> elements_;
    std::vector<std::string> labels_;
};

}  // namespace jmqkd
