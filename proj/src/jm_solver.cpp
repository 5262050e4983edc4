#include "jmqkd/jm_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace jmqkd::jm {

namespace {

constexpr int kMaxSettings = 6;

int pow3(int n) {
    int r = 1;
    for (int i = 0; i < n; ++i)
        r *= 3;
    return r;
}

// Affine subspace {x : S x = f} shared by the four Bloch components of the
// parent blocks. Rows of S: the all-label sum plus one indicator row per
// (setting, click outcome); the no-click marginal is implied. S depends only
// on N, so its normal-equation factorization is computed once per problem.
class AffineProjector {
  public:
    explicit AffineProjector(int n_settings)
        : n_(n_settings), m_(pow3(n_settings)), rows_(1 + 2 * n_settings) {
        digits_.resize(static_cast<std::size_t>(m_) * n_);
        for (int lam = 0; lam < m_; ++lam) {
            int rest = lam;
            for (int y = 0; y < n_; ++y) {
                digits_[static_cast<std::size_t>(lam) * n_ + y] =
                    static_cast<std::uint8_t>(rest % 3);
                rest /= 3;
            }
        }
        // The Gram matrix of the constraint rows has a closed form in the
        // label counts; factor it once.
        std::vector<double> gram(static_cast<std::size_t>(rows_) * rows_, 0.0);
        auto g = [&](int i, int j) -> double& {
            return gram[static_cast<std::size_t>(i) * rows_ + j];
        };
        double m = m_;
        g(0, 0) = m;
        for (int y = 0; y < n_; ++y) {
            for (int b = 0; b < 2; ++b) {
                int row = 1 + 2 * y + b;
                g(0, row) = g(row, 0) = m / 3.0;
                g(row, row) = m / 3.0;
                for (int y2 = 0; y2 < n_; ++y2) {
                    if (y2 == y)
                        continue;
                    for (int b2 = 0; b2 < 2; ++b2)
                        g(row, 1 + 2 * y2 + b2) = m / 9.0;
                }
            }
        }
        chol_ = cholesky(gram, rows_);
        scratch_.resize(rows_);
    }

    int labels() const { return m_; }
    std::uint8_t digit(int lam, int y) const {
        return digits_[static_cast<std::size_t>(lam) * n_ + y];
    }

    // In-place projection of one component vector onto {u : S u = rhs}.
    void project(std::vector<double>& u, const std::vector<double>& rhs) const {
        auto& s = scratch_;
        std::fill(s.begin(), s.end(), 0.0);
        apply_s(u, s);
        for (int i = 0; i < rows_; ++i)
            s[i] -= rhs[i];
        solve_normal(s);
        scatter_sub(u, s);
    }

    // In-place projection onto the row space range(S^T).
    void rowspace_project(std::vector<double>& u) const {
        auto& s = scratch_;
        std::fill(s.begin(), s.end(), 0.0);
        apply_s(u, s);
        solve_normal(s);
        // u_row = S^T alpha; replace u by it.
        for (int lam = 0; lam < m_; ++lam) {
            double v = s[0];
            for (int y = 0; y < n_; ++y) {
                std::uint8_t d = digit(lam, y);
                if (d < 2)
                    v += s[1 + 2 * y + d];
            }
            u[lam] = v;
        }
    }

  private:
    void apply_s(const std::vector<double>& u, std::vector<double>& s) const {
        for (int lam = 0; lam < m_; ++lam) {
            double v = u[lam];
            s[0] += v;
            for (int y = 0; y < n_; ++y) {
                std::uint8_t d = digit(lam, y);
                if (d < 2)
                    s[1 + 2 * y + d] += v;
            }
        }
    }

    void scatter_sub(std::vector<double>& u, const std::vector<double>& alpha) const {
        for (int lam = 0; lam < m_; ++lam) {
            double corr = alpha[0];
            for (int y = 0; y < n_; ++y) {
                std::uint8_t d = digit(lam, y);
                if (d < 2)
                    corr += alpha[1 + 2 * y + d];
            }
            u[lam] -= corr;
        }
    }

    static std::vector<double> cholesky(const std::vector<double>& a, int n) {
        std::vector<double> l(static_cast<std::size_t>(n) * n, 0.0);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j <= i; ++j) {
                double s = a[static_cast<std::size_t>(i) * n + j];
                for (int k = 0; k < j; ++k)
                    s -= l[static_cast<std::size_t>(i) * n + k] *
                         l[static_cast<std::size_t>(j) * n + k];
                if (i == j) {
                    if (s <= 0.0)
                        throw std::runtime_error("constraint rows are linearly dependent");
                    l[static_cast<std::size_t>(i) * n + i] = std::sqrt(s);
                } else {
                    l[static_cast<std::size_t>(i) * n + j] =
                        s / l[static_cast<std::size_t>(j) * n + j];
                }
            }
        }
        return l;
    }

    void solve_normal(std::vector<double>& b) const {
        for (int i = 0; i < rows_; ++i) {
            double s = b[i];
            for (int k = 0; k < i; ++k)
                s -= chol_[static_cast<std::size_t>(i) * rows_ + k] * b[k];
            b[i] = s / chol_[static_cast<std::size_t>(i) * rows_ + i];
        }
        for (int i = rows_ - 1; i >= 0; --i) {
            double s = b[i];
            for (int k = i + 1; k < rows_; ++k)
                s -= chol_[static_cast<std::size_t>(k) * rows_ + i] * b[k];
            b[i] = s / chol_[static_cast<std::size_t>(i) * rows_ + i];
        }
    }

    int n_;
    int m_;
    int rows_;
    std::vector<std::uint8_t> digits_;
    std::vector<double> chol_;
    mutable std::vector<double> scratch_;
};

struct State {
    std::vector<double> t, rx, ry, rz;

    State() = default;
    explicit State(int m) : t(m, 0.0), rx(m, 0.0), ry(m, 0.0), rz(m, 0.0) {}
    std::size_t size() const { return t.size(); }

    void add(const State& o) {
        for (std::size_t i = 0; i < size(); ++i) {
            t[i] += o.t[i];
            rx[i] += o.rx[i];
            ry[i] += o.ry[i];
            rz[i] += o.rz[i];
        }
    }
    void sub(const State& o) {
        for (std::size_t i = 0; i < size(); ++i) {
            t[i] -= o.t[i];
            rx[i] -= o.rx[i];
            ry[i] -= o.ry[i];
            rz[i] -= o.rz[i];
        }
    }
};

struct Rhs {
    std::vector<double> t, rx, ry, rz;
};

Rhs build_rhs(const JmProblem& p, double eta, int rows) {
    Rhs rhs;
    rhs.t.assign(rows, 0.0);
    rhs.rx.assign(rows, 0.0);
    rhs.ry.assign(rows, 0.0);
    rhs.rz.assign(rows, 0.0);
    rhs.t[0] = 2.0;
    for (int y = 0; y < p.n_settings(); ++y) {
        double gamma = p.biases.empty() ? 0.0 : p.biases[y];
        double norm = p.norms.empty() ? 1.0 : p.norms[y];
        Vec3 m = p.directions[y] * norm;
        for (int b = 0; b < 2; ++b) {
            double sign = b == 0 ? 1.0 : -1.0;
            int row = 1 + 2 * y + b;
            rhs.t[row] = eta * (1.0 + sign * gamma);
            rhs.rx[row] = sign * eta * p.vis * m.x;
            rhs.ry[row] = sign * eta * p.vis * m.y;
            rhs.rz[row] = sign * eta * p.vis * m.z;
        }
    }
    return rhs;
}

void project_affine(State& x, const AffineProjector& proj, const Rhs& rhs) {
    proj.project(x.t, rhs.t);
    proj.project(x.rx, rhs.rx);
    proj.project(x.ry, rhs.ry);
    proj.project(x.rz, rhs.rz);
}

void rowspace_project(State& x, const AffineProjector& proj) {
    proj.rowspace_project(x.t);
    proj.rowspace_project(x.rx);
    proj.rowspace_project(x.ry);
    proj.rowspace_project(x.rz);
}

double cone_violation(const State& x) {
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double nr = std::sqrt(x.rx[i] * x.rx[i] + x.ry[i] * x.ry[i] + x.rz[i] * x.rz[i]);
        worst = std::max(worst, nr - x.t[i]);
    }
    return worst;
}

void project_cone(State& x) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        double nr = std::sqrt(x.rx[i] * x.rx[i] + x.ry[i] * x.ry[i] + x.rz[i] * x.rz[i]);
        double t = x.t[i];
        if (nr <= t)
            continue;
        if (t <= -nr) {
            x.t[i] = x.rx[i] = x.ry[i] = x.rz[i] = 0.0;
            continue;
        }
        double s = 0.5 * (t + nr);
        double scale = s / nr;
        x.t[i] = s;
        x.rx[i] *= scale;
        x.ry[i] *= scale;
        x.rz[i] *= scale;
    }
}

// Projection onto -C (each block reflected through the origin).
void project_neg_cone(State& x) {
    for (auto* c : {&x.t, &x.rx, &x.ry, &x.rz})
        for (auto& v : *c)
            v = -v;
    project_cone(x);
    for (auto* c : {&x.t, &x.rx, &x.ry, &x.rz})
        for (auto& v : *c)
            v = -v;
}

double dot(const State& a, const State& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a.t[i] * b.t[i] + a.rx[i] * b.rx[i] + a.ry[i] * b.ry[i] + a.rz[i] * b.rz[i];
    return s;
}

double norm(const State& a) { return std::sqrt(dot(a, a)); }

FeasibilityCertificate make_certificate(const State& a, double eta, double residual) {
    FeasibilityCertificate cert;
    cert.eta = eta;
    cert.residual = residual;
    cert.t = a.t;
    cert.r.resize(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        cert.r[i] = Vec3{a.rx[i], a.ry[i], a.rz[i]};
    return cert;
}

// Separating-functional test. The candidate direction is forced exactly into
// -C; infeasibility is certified when its constant offset over the affine
// set dominates what its leakage out of the constraint row space could
// recover anywhere on the (bounded) set of valid parents. No false
// infeasibles beyond floating-point noise.
bool certifies_infeasible(State w, const AffineProjector& proj, const State& affine_point) {
    if (norm(w) < 1e-14)
        return false;

    rowspace_project(w, proj);
    project_neg_cone(w);
    double scale = norm(w);
    if (scale < 1e-14)
        return false;

    double offset = dot(w, affine_point);
    State leak = w;
    rowspace_project(leak, proj);
    leak.sub(w);  // leak = P_row(w) - w, norm equals the row-space leakage

    // Any valid parent has every t in [0, 2] and |r| <= t.
    double feasible_radius =
        std::sqrt(8.0 * static_cast<double>(w.size())) + norm(affine_point);
    return offset > norm(leak) * feasible_radius + 1e-12 * scale;
}

void validate(const JmProblem& p) {
    if (p.directions.empty() || p.n_settings() > kMaxSettings)
        throw std::invalid_argument("solver supports 1..6 settings");
    if (p.vis < 0.0 || p.vis > 1.0)
        throw std::invalid_argument("visibility must lie in [0, 1]");
    for (const auto& d : p.directions)
        if (std::abs(d.norm() - 1.0) > 1e-9)
            throw std::invalid_argument("directions must be unit vectors");
    if (!p.biases.empty() && p.biases.size() != p.directions.size())
        throw std::invalid_argument("bias count mismatch");
    if (!p.norms.empty() && p.norms.size() != p.directions.size())
        throw std::invalid_argument("norm count mismatch");
    for (int y = 0; y < p.n_settings(); ++y) {
        double gamma = p.biases.empty() ? 0.0 : p.biases[y];
        double nrm = p.norms.empty() ? 1.0 : p.norms[y];
        if (std::abs(gamma) > 1.0 + 1e-12 || nrm < 0.0 ||
            nrm > 1.0 - std::abs(gamma) + 1e-12)
            throw std::invalid_argument("positivity requires |m| <= 1 - |bias|");
    }
}

}  // namespace

JmProblem JmProblem::pvm(std::vector<Vec3> directions, double vis) {
    JmProblem p;
    p.directions = std::move(directions);
    p.vis = vis;
    validate(p);
    return p;
}

JmProblem JmProblem::biased(std::vector<Vec3> directions, double vis, std::vector<double> biases,
                            std::vector<double> norms) {
    JmProblem p;
    p.directions = std::move(directions);
    p.vis = vis;
    p.biases = std::move(biases);
    p.norms = std::move(norms);
    validate(p);
    return p;
}

FeasResult jm_feasible(const JmProblem& p, double eta, const FeasOptions& opts) {
    validate(p);
    if (eta < 0.0 || eta > 1.0)
        throw std::invalid_argument("eta must lie in [0, 1]");

    AffineProjector proj(p.n_settings());
    Rhs rhs = build_rhs(p, eta, 1 + 2 * p.n_settings());
    const int m = proj.labels();

    // Douglas-Rachford splitting on (affine, cone). Plain corrected
    // alternating projections crawl here once the feasible set loses its
    // interior (at v = 1 every click marginal sits exactly on the cone
    // boundary); the reflected iteration resolves the same instances in a
    // few thousand steps. The shadow point P_A(z) carries the certificate.
    State z(m);
    // All-no-click start: exactly feasible at eta = 0, a good basin overall.
    z.t[m - 1] = 2.0;

    State affine_ref(m);
    project_affine(affine_ref, proj, rhs);

    State a, refl, c, disp;
    FeasResult res;
    double best_viol = std::numeric_limits<double>::infinity();

    for (int it = 1; it <= opts.max_iterations; ++it) {
        a = z;
        project_affine(a, proj, rhs);
        double viol = cone_violation(a);
        best_viol = std::min(best_viol, viol);
        if (viol <= opts.tol) {
            res.status = FeasStatus::kFeasible;
            res.certificate = make_certificate(a, eta, viol);
            res.iterations = it;
            res.best_violation = viol;
            return res;
        }

        refl = a;
        for (std::size_t i = 0; i < refl.size(); ++i) {
            refl.t[i] = 2.0 * a.t[i] - z.t[i];
            refl.rx[i] = 2.0 * a.rx[i] - z.rx[i];
            refl.ry[i] = 2.0 * a.ry[i] - z.ry[i];
            refl.rz[i] = 2.0 * a.rz[i] - z.rz[i];
        }
        c = refl;
        project_cone(c);

        if (it % opts.certificate_interval == 0) {
            // On inconsistent instances the iterate drift approaches the gap
            // vector; test it in both orientations.
            disp = a;
            disp.sub(c);
            bool proven = certifies_infeasible(disp, proj, affine_ref);
            if (!proven) {
                for (auto* comp : {&disp.t, &disp.rx, &disp.ry, &disp.rz})
                    for (auto& v : *comp)
                        v = -v;
                proven = certifies_infeasible(disp, proj, affine_ref);
            }
            if (proven) {
                res.status = FeasStatus::kInfeasible;
                res.iterations = it;
                res.best_violation = best_viol;
                return res;
            }
        }

        // z += c - a
        for (std::size_t i = 0; i < z.size(); ++i) {
            z.t[i] += c.t[i] - a.t[i];
            z.rx[i] += c.rx[i] - a.rx[i];
            z.ry[i] += c.ry[i] - a.ry[i];
            z.rz[i] += c.rz[i] - a.rz[i];
        }
    }

    res.status = FeasStatus::kIndeterminate;
    res.iterations = opts.max_iterations;
    res.best_violation = best_viol;
    return res;
}

ThresholdResult jm_threshold_eta(const JmProblem& p, double tol) {
    if (!(tol > 0.0))
        throw std::invalid_argument("tolerance must be positive");
    ThresholdResult out;

    FeasResult at_one = jm_feasible(p, 1.0);
    if (at_one.status == FeasStatus::kFeasible) {
        out.eta = out.lo = out.hi = 1.0;
        return out;
    }
    out.had_indeterminate = at_one.status == FeasStatus::kIndeterminate;

    double lo = 0.0;  // eta = 0 is always feasible (all mass on no-click)
    double hi = 1.0;
    int steps = static_cast<int>(std::ceil(std::log2(1.0 / tol)));
    for (int i = 0; i < steps; ++i) {
        double mid = 0.5 * (lo + hi);
        FeasResult r = jm_feasible(p, mid);
        if (r.status == FeasStatus::kFeasible) {
            lo = mid;
        } else {
            // Indeterminate probes shrink from above: the reported threshold
            // stays the largest certified-feasible efficiency.
            if (r.status == FeasStatus::kIndeterminate)
                out.had_indeterminate = true;
            hi = mid;
        }
    }
    out.eta = lo;
    out.lo = lo;
    out.hi = hi;
    return out;
}

double verify_certificate(const FeasibilityCertificate& cert, const JmProblem& p) {
    validate(p);
    const int n = p.n_settings();
    const int m = pow3(n);
    if (cert.t.size() != static_cast<std::size_t>(m) || cert.r.size() != cert.t.size())
        throw std::invalid_argument("certificate size does not match the problem");

    AffineProjector proj(n);
    double worst = 0.0;

    // Positivity slack per block; the cone slack equals minus twice the
    // smallest matrix eigenvalue, so one check covers both representations.
    for (int lam = 0; lam < m; ++lam)
        worst = std::max(worst, cert.r[lam].norm() - cert.t[lam]);

    auto accum_entry_dev = [&](double dt, const Vec3& dr) {
        // Entrywise deviation of (dt*I + dr.sigma)/2.
        double diag = 0.5 * std::max(std::abs(dt + dr.z), std::abs(dt - dr.z));
        double off = 0.5 * std::hypot(dr.x, dr.y);
        worst = std::max({worst, diag, off});
    };

    double sum_t = 0.0;
    Vec3 sum_r{};
    for (int lam = 0; lam < m; ++lam) {
        sum_t += cert.t[lam];
        sum_r += cert.r[lam];
    }
    accum_entry_dev(sum_t - 2.0, sum_r);

    for (int y = 0; y < n; ++y) {
        double gamma = p.biases.empty() ? 0.0 : p.biases[y];
        double nrm = p.norms.empty() ? 1.0 : p.norms[y];
        Vec3 mvec = p.directions[y] * nrm;
        for (int b = 0; b < 3; ++b) {
            double mt = 0.0;
            Vec3 mr{};
            for (int lam = 0; lam < m; ++lam) {
                if (proj.digit(lam, y) == b) {
                    mt += cert.t[lam];
                    mr += cert.r[lam];
                }
            }
            double target_t;
            Vec3 target_r{};
            if (b < 2) {
                double sign = b == 0 ? 1.0 : -1.0;
                target_t = cert.eta * (1.0 + sign * gamma);
                target_r = sign * cert.eta * p.vis * mvec;
            } else {
                target_t = 2.0 * (1.0 - cert.eta);
            }
            accum_entry_dev(mt - target_t, mr - target_r);
        }
    }
    return worst;
}

}  // namespace jmqkd::jm
