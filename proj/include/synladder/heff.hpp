// heff.hpp — Effective ground-manifold Hamiltonian: the exact form with nested
// operator inverses, its leading-order expansion, and drive-choice diagnostics

#pragma once

#include <Eigen/SparseLU>

#include <array>
#include <memory>
#include <optional>

#include "synladder/ladder.hpp"

namespace synladder::heff {

using fock::Basis;
using fock::Index;
using fock::SectorBasis;
using fock::SparseOperator;
using ladder::LevelScheme;

// Per-drive Rabi frequencies and detunings, in units of the collective
// interaction energy chiN.
struct DriveParams {
    double omega_a{0.0};
    double omega_b{0.0};
    double delta_a{0.0};
    double delta_b{0.0};

    struct Active {
        char name;
        double omega;
        double delta;
    };
    std::vector<Active> active() const {
        std::vector<Active> out;
        if (omega_a != 0.0) out.push_back({'A', omega_a, delta_a});
        if (omega_b != 0.0) out.push_back({'B', omega_b, delta_b});
        for (const auto& d : out)
            if (d.delta == 0.0) throw DomainError(std::string("drive ") + d.name + " has zero detuning");
        return out;
    }
};

struct HeffOptions {
    Index dense_cap{4000};
    double resonance_tol{1e-8};   // in units of chiN
    double condition_limit{1e12};
    bool force_solver{false};     // keep the solve-based form even below the cap
};

enum class HeffMode { Exact, Perturbative };

// Every particle-conserving basis here has all states at the same total N.
inline int total_particles(const Basis& basis) {
    int n = 0;
    for (int m = 0; m < basis.mode_count(); ++m) n += basis.occupation(0, m);
    return n;
}

namespace detail {

// Drive-resolved dressed-state matrix  M_nu = Delta_nu - chi D_L - chi^2 T+ G_R T-
// with G_R = (Delta_nu - chi D_R)^{-1} (diagonal). Real symmetric and sparse.
inline Eigen::SparseMatrix<double> drive_matrix(const ladder::LadderOperators& ops, double delta_abs, double chi,
                                                double resonance_tol_abs, const Basis& basis) {
    const Index n = ops.d_left.dim();
    Eigen::VectorXd d_r = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < ops.d_right.mat.outerSize(); ++k)
        for (fock::SpMat::InnerIterator it(ops.d_right.mat, k); it; ++it)
            if (it.row() == it.col()) d_r[it.row()] = it.value().real();

    Eigen::VectorXd g(n);
    for (Index k = 0; k < n; ++k) {
        const double den = delta_abs - chi * d_r[k];
        if (std::abs(den) < resonance_tol_abs)
            throw ResonanceError("dressed denominator Delta - chi*D_R is resonant (" + std::to_string(den) +
                                 ") at Fock state " + basis.describe_state(k));
        g[k] = 1.0 / den;
    }

    Eigen::SparseMatrix<double> tp = ops.t_plus.real_part();
    Eigen::SparseMatrix<double> tm = ops.t_minus.real_part();
    Eigen::SparseMatrix<double> core = tp * (g.asDiagonal() * tm);

    Eigen::SparseMatrix<double> dl = ops.d_left.real_part();
    Eigen::SparseMatrix<double> ident(n, n);
    ident.setIdentity();
    Eigen::SparseMatrix<double> m = delta_abs * ident - chi * dl - (chi * chi) * core;
    m.prune(0.0);
    m.makeCompressed();
    return m;
}

inline Eigen::SparseMatrix<double> maybe_restrict(const Eigen::SparseMatrix<double>& m,
                                                  const std::shared_ptr<const SectorBasis>& sector) {
    if (!sector) return m;
    const Index n = sector->dim();
    std::vector<Eigen::Triplet<double>> ts;
    for (Index sc = 0; sc < n; ++sc) {
        const Index col = sector->parent_index(sc);
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, static_cast<int>(col)); it; ++it) {
            const Index sr = sector->sub_index(it.row());
            if (sr < 0) {
                if (std::abs(it.value()) > 1e-12)
                    throw DomainError("drive matrix couples out of the invariant sector");
                continue;
            }
            ts.emplace_back(sr, sc, it.value());
        }
    }
    Eigen::SparseMatrix<double> out(n, n);
    out.setFromTriplets(ts.begin(), ts.end());
    out.makeCompressed();
    return out;
}

struct DriveSolver {
    double coef{0.0};
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
};

}  // namespace detail

// Effective ground-state Hamiltonian. The exact form is realized either as an
// explicit dense real-symmetric matrix (dim <= dense_cap) or as a solve-based
// linear map (one sparse factorization per drive, reused across applications).
class EffectiveHamiltonian {
public:
    HeffMode mode{HeffMode::Exact};
    std::shared_ptr<const Basis> basis;
    DriveParams drives;
    double chi_n{1.0};
    double chi{0.0};

    std::optional<Eigen::MatrixXd> dense;          // exact dense realization
    std::optional<SparseOperator> sparse;          // perturbative sparse realization
    std::shared_ptr<std::vector<std::unique_ptr<detail::DriveSolver>>> solvers;

    Index dim() const { return basis ? basis->dim() : 0; }

    bool has_dense() const { return dense.has_value(); }

    void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const {
        if (dense) {
            y.noalias() = (*dense) * x;
            return;
        }
        if (sparse) {
            y.noalias() = sparse->mat * x;
            return;
        }
        y = Eigen::VectorXcd::Zero(x.size());
        if (!solvers) return;
        for (const auto& s : *solvers) {
            // the factorized matrix is real, so real and imaginary parts solve independently
            Eigen::VectorXd re = s->lu.solve(x.real().eval());
            Eigen::VectorXd im = s->lu.solve(x.imag().eval());
            y.real() += s->coef * re;
            y.imag() += s->coef * im;
        }
    }
    Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const {
        Eigen::VectorXcd y;
        apply(x, y);
        return y;
    }

    double expectation(const Eigen::VectorXcd& psi) const { return psi.dot(apply(psi)).real(); }

    // Materialize as dense (column-by-column for the solver form; test scale only).
    Eigen::MatrixXd to_dense() const {
        if (dense) return *dense;
        if (sparse) return Eigen::MatrixXcd(sparse->mat).real();
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim(), dim());
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim()), col;
        for (Index j = 0; j < dim(); ++j) {
            e[j] = 1.0;
            apply(e, col);
            h.col(j) = col.real();
            e[j] = 0.0;
        }
        return h;
    }

    // sum_nu |Omega_nu|^2 / chi over active drives: the c-number contained in the
    // exact form relative to second-order perturbation theory.
    double cnumber() const {
        double c = 0.0;
        for (const auto& d : drives.active()) c += (d.omega * chi_n) * (d.omega * chi_n) / chi;
        return c;
    }
};

// Exact effective Hamiltonian:
//   H = sum_nu (|Omega_nu|^2 Delta_nu / chi) [Delta_nu - chi D_L - chi^2 T+ G_R^nu T-]^{-1}
inline EffectiveHamiltonian build_heff_exact(const LevelScheme& scheme, const std::shared_ptr<const Basis>& basis,
                                             const DriveParams& drives, double chi_n = 1.0,
                                             const HeffOptions& opts = {}) {
    EffectiveHamiltonian h;
    h.mode = HeffMode::Exact;
    h.basis = basis;
    h.drives = drives;
    h.chi_n = chi_n;
    const int n_total = total_particles(*basis);
    if (n_total <= 0) throw DomainError("basis carries no particles");
    h.chi = chi_n / n_total;

    auto sector = std::dynamic_pointer_cast<const SectorBasis>(basis);
    std::shared_ptr<const Basis> parent = sector ? sector->parent() : basis;
    const auto ops = ladder::build_ladder_operators(scheme, parent);

    const auto active = drives.active();
    const bool dense_form = !opts.force_solver && basis->dim() <= opts.dense_cap;
    if (dense_form) {
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(basis->dim(), basis->dim());
        for (const auto& d : active) {
            auto m = detail::maybe_restrict(
                detail::drive_matrix(ops, d.delta * chi_n, h.chi, opts.resonance_tol * chi_n, *parent), sector);
            Eigen::MatrixXd md(m);
            Eigen::PartialPivLU<Eigen::MatrixXd> lu(md);
            Eigen::MatrixXd inv = lu.inverse();
            const double cond = md.cwiseAbs().rowwise().sum().maxCoeff() * inv.cwiseAbs().rowwise().sum().maxCoeff();
            if (!std::isfinite(cond) || cond > opts.condition_limit)
                throw ResonanceError("drive matrix for drive " + std::string(1, d.name) +
                                     " is ill-conditioned (cond ~ " + std::to_string(cond) + ")");
            const double coef = (d.omega * chi_n) * (d.omega * chi_n) * (d.delta * chi_n) / h.chi;
            acc += coef * inv;
        }
        const double asym = (acc - acc.transpose()).cwiseAbs().maxCoeff();
        if (asym > 1e-10) throw NumericalError("effective Hamiltonian lost Hermiticity: " + std::to_string(asym));
        h.dense = 0.5 * (acc + acc.transpose().eval());
        return h;
    }

    h.solvers = std::make_shared<std::vector<std::unique_ptr<detail::DriveSolver>>>();
    for (const auto& d : active) {
        auto m = detail::maybe_restrict(
            detail::drive_matrix(ops, d.delta * chi_n, h.chi, opts.resonance_tol * chi_n, *parent), sector);
        auto s = std::make_unique<detail::DriveSolver>();
        s->coef = (d.omega * chi_n) * (d.omega * chi_n) * (d.delta * chi_n) / h.chi;
        s->lu.compute(m);
        if (s->lu.info() != Eigen::Success)
            throw ResonanceError("sparse factorization failed for drive " + std::string(1, d.name));
        // crude inverse-norm estimate from a few solves
        Eigen::VectorXd v = Eigen::VectorXd::Ones(m.rows()).normalized();
        double inv_norm = 0.0;
        for (int it = 0; it < 4; ++it) {
            v = s->lu.solve(v);
            inv_norm = v.norm();
            if (inv_norm == 0.0) break;
            v /= inv_norm;
        }
        Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(m.rows());
        for (int k = 0; k < m.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
                rowsum[it.row()] += std::abs(it.value());
        const double cond = rowsum.maxCoeff() * inv_norm;
        if (!std::isfinite(cond) || cond > opts.condition_limit)
            throw ResonanceError("drive matrix for drive " + std::string(1, d.name) +
                                 " is ill-conditioned (cond ~ " + std::to_string(cond) + ")");
        h.solvers->push_back(std::move(s));
    }
    return h;
}

// Leading-order expansion:
//   H ~= sum_nu |Omega_nu|^2/Delta_nu D_L + |Omega_nu|^2 chi/Delta_nu^2 (D_L D_L + T+ T-)
inline EffectiveHamiltonian build_heff_perturbative(const LevelScheme& scheme,
                                                    const std::shared_ptr<const Basis>& basis,
                                                    const DriveParams& drives, double chi_n = 1.0) {
    EffectiveHamiltonian h;
    h.mode = HeffMode::Perturbative;
    h.basis = basis;
    h.drives = drives;
    h.chi_n = chi_n;
    const int n_total = total_particles(*basis);
    if (n_total <= 0) throw DomainError("basis carries no particles");
    h.chi = chi_n / n_total;

    auto sector = std::dynamic_pointer_cast<const SectorBasis>(basis);
    std::shared_ptr<const Basis> parent = sector ? sector->parent() : basis;
    const auto ops = ladder::build_ladder_operators(scheme, parent);

    SparseOperator stark = fock::zero_operator(parent);
    SparseOperator coll = fock::add(fock::compose(ops.d_left, ops.d_left), fock::compose(ops.t_plus, ops.t_minus));
    SparseOperator acc = fock::zero_operator(parent);
    for (const auto& d : drives.active()) {
        const double om = d.omega * chi_n, de = d.delta * chi_n;
        acc = fock::add(acc, fock::scale(ops.d_left, om * om / de));
        acc = fock::add(acc, fock::scale(coll, om * om * h.chi / (de * de)));
    }
    (void)stark;
    acc.mark_hermitian(1e-10);
    if (sector) acc = fock::restrict_operator(acc, sector);
    h.sparse = std::move(acc);
    return h;
}

// ---------------------------------------------------------------------------
// Drive-suppression diagnostic: compares the differential shift between an
// initial and final state against the correlated-hopping matrix element
//   | <i|H|i> - <f|H|f> |  vs  | sum_nu |Omega_nu|^2 chi / Delta_nu^2 <f|T+T-|i> |
// Correlated hopping dominates when the ratio is << 1.
// ---------------------------------------------------------------------------

struct ShiftDiagnostic {
    double shift_gap{0.0};
    double hop_strength{0.0};
    double ratio{0.0};
};

inline ShiftDiagnostic shift_suppression_diagnostic(const LevelScheme& scheme,
                                                    const std::shared_ptr<const Basis>& basis,
                                                    const DriveParams& drives, double chi_n,
                                                    const Eigen::VectorXcd& psi_i, const Eigen::VectorXcd& psi_f,
                                                    const HeffOptions& opts = {}) {
    auto h = build_heff_exact(scheme, basis, drives, chi_n, opts);
    auto sector = std::dynamic_pointer_cast<const SectorBasis>(basis);
    std::shared_ptr<const Basis> parent = sector ? sector->parent() : basis;
    auto ops = ladder::build_ladder_operators(scheme, parent);
    SparseOperator hop_op = fock::compose(ops.t_plus, ops.t_minus);
    if (sector) hop_op = fock::restrict_operator(hop_op, sector);

    const std::complex<double> t_fi = psi_f.dot(hop_op.mat * psi_i);
    std::complex<double> hop{0.0, 0.0};
    for (const auto& d : drives.active()) {
        const double om = d.omega * chi_n, de = d.delta * chi_n;
        hop += om * om * h.chi / (de * de) * t_fi;
    }
    if (std::abs(t_fi) < 1e-14)
        throw DiagnosticError("correlated-hopping matrix element <f|T+T-|i> vanishes; ratio undefined");

    ShiftDiagnostic out;
    out.shift_gap = std::abs(h.expectation(psi_i) - h.expectation(psi_f));
    out.hop_strength = std::abs(hop);
    out.ratio = out.shift_gap / out.hop_strength;
    return out;
}

// Deterministic choice of the dominant correlated-hopping target: the largest
// Fock component of (1 - |i><i|) T+T- |i>.
inline Eigen::VectorXcd dominant_hop_target(const LevelScheme& scheme, const std::shared_ptr<const Basis>& basis,
                                            const Eigen::VectorXcd& psi_i) {
    auto sector = std::dynamic_pointer_cast<const SectorBasis>(basis);
    std::shared_ptr<const Basis> parent = sector ? sector->parent() : basis;
    auto ops = ladder::build_ladder_operators(scheme, parent);
    SparseOperator hop_op = fock::compose(ops.t_plus, ops.t_minus);
    if (sector) hop_op = fock::restrict_operator(hop_op, sector);
    Eigen::VectorXcd v = hop_op.mat * psi_i;
    v -= psi_i.dot(v) * psi_i;
    Index best = 0;
    double mx = 0.0;
    for (Index k = 0; k < v.size(); ++k)
        if (std::abs(v[k]) > mx) {
            mx = std::abs(v[k]);
            best = k;
        }
    if (mx == 0.0) throw DiagnosticError("T+T- |i> has no component away from |i>");
    Eigen::VectorXcd f = Eigen::VectorXcd::Zero(v.size());
    f[best] = 1.0;
    return f;
}

}  // namespace synladder::heff
