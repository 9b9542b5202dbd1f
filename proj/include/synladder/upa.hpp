// upa.hpp — Undepleted-pump approximations: the 4-level two-mode-squeezing
// closed forms with their phase boundaries, and the 6-level quadratic form
// with Bogoliubov-de Gennes diagnostics and vacuum covariance propagation

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <vector>

#include "synladder/heff.hpp"

namespace synladder::upa {

using heff::DriveParams;

// ---------------------------------------------------------------------------
// 4-level system (F = 3/2), quench from |g_-3/2>^(N/2) |g_3/2>^(N/2)
// ---------------------------------------------------------------------------

struct FourLevelK {
    double k1{0.0};
    double k2{0.0};
    double k3{0.0};  // k1 == k3 by construction
};

namespace detail {
inline void check_pump_pole(double delta_abs, double pole, const char* which) {
    if (std::abs(delta_abs - pole) < 1e-12)
        throw ResonanceError(std::string("drive detuning sits on the pump-shifted resonance ") + which);
}
}  // namespace detail

inline FourLevelK four_level_K(const DriveParams& drives, double chi_n = 1.0) {
    FourLevelK k;
    for (const auto& d : drives.active()) {
        const double om = d.omega * chi_n, de = d.delta * chi_n;
        const double den = de - chi_n / 5.0;
        detail::check_pump_pole(de, chi_n / 5.0, "chiN/5");
        const double cubic = (8.0 / 75.0) * om * om * de * chi_n / (den * den * den);
        k.k1 += cubic;
        k.k3 += cubic;
        k.k2 += (8.0 / 15.0) * om * om * de / (den * den) + cubic;
    }
    return k;
}

// Analytic population of each of the |g_+-1/2> modes under the quadratic
// approximation, in all three spectral regimes.
inline double four_level_population(const FourLevelK& k, double t) {
    const double s = k.k1 + k.k2;
    const double disc = s * s - 4.0 * k.k3 * k.k3;
    if (disc > 0.0) {
        const double w = std::sqrt(disc);
        const double sn = std::sin(0.5 * w * t);
        return 4.0 * k.k3 * k.k3 / disc * sn * sn;
    }
    if (disc < 0.0) {
        const double w = std::sqrt(-disc);
        const double sh = std::sinh(0.5 * w * t);
        return 4.0 * k.k3 * k.k3 / (-disc) * sh * sh;
    }
    return k.k3 * k.k3 * t * t;
}

// Roots in Delta_B of the two critical-point conditions
//   sum_nu w_nu Delta_nu/(Delta_nu - chiN/5)^2 = 0
//   sum_nu w_nu [Delta_nu/(Delta_nu - chiN/5)^2 + (4/5) Delta_nu chiN/(Delta_nu - chiN/5)^3] = 0
// found by scanning at 0.01 chiN resolution and bisecting to 1e-6 chiN.
inline std::vector<double> four_level_phase_boundary(double delta_a, double chi_n, double omega_a, double omega_b,
                                                     double lo, double hi) {
    const double pole = chi_n / 5.0;
    const double wa = omega_a * omega_a, wb = omega_b * omega_b;
    auto term1 = [&](double de) { return de / ((de - pole) * (de - pole)); };
    auto term2 = [&](double de) {
        const double den = de - pole;
        return de / (den * den) + 0.8 * de * chi_n / (den * den * den);
    };
    const double da = delta_a * chi_n;
    auto f1 = [&](double db) { return wa * term1(da) + wb * term1(db); };
    auto f2 = [&](double db) { return wa * term2(da) + wb * term2(db); };

    std::vector<double> roots;
    auto bisect = [&](auto&& f, double a, double b) {
        double fa = f(a), fb = f(b);
        if (fa == 0.0) {
            roots.push_back(a);
            return;
        }
        if (fa * fb > 0.0) return;
        while (b - a > 1e-6 * chi_n) {
            const double m = 0.5 * (a + b);
            const double fm = f(m);
            if (fa * fm <= 0.0) {
                b = m;
            } else {
                a = m;
                fa = fm;
            }
        }
        roots.push_back(0.5 * (a + b));
    };

    const double step = 0.01 * chi_n;
    for (double x = lo * chi_n; x < hi * chi_n - 0.5 * step; x += step) {
        const double a = x, b = std::min(x + step, hi * chi_n);
        if ((a - pole) * (b - pole) <= 0.0) continue;  // straddles the pump-shifted pole
        bisect(f1, a, b);
        bisect(f2, a, b);
    }
    std::sort(roots.begin(), roots.end());
    std::vector<double> uniq;
    for (double r : roots)
        if (uniq.empty() || r - uniq.back() > 1e-5 * chi_n) uniq.push_back(r / chi_n);
    return uniq;  // back in units of chiN
}

// ---------------------------------------------------------------------------
// Quadratic boson Hamiltonians  H = sum_ij L_ij adag_i a_j
//                                   + (1/2) M_ij adag_i adag_j + h.c.
// ---------------------------------------------------------------------------

struct QuadraticForm {
    Eigen::MatrixXd l;  // Hermitian (real symmetric here)
    Eigen::MatrixXd m;  // symmetric
    std::vector<HalfInt> labels;

    int n_modes() const { return static_cast<int>(l.rows()); }
    int mode_index(HalfInt label) const {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == label) return static_cast<int>(i);
        throw DomainError("quadratic form has no mode " + label.str());
    }
};

// 2-mode reduction of the 4-level squeezing Hamiltonian (cross-oracle for
// four_level_K's phase classification).
inline QuadraticForm four_level_quadratic(const FourLevelK& k) {
    QuadraticForm q;
    q.l = Eigen::MatrixXd::Zero(2, 2);
    q.l(0, 0) = k.k1;
    q.l(1, 1) = k.k2;
    q.m = Eigen::MatrixXd::Zero(2, 2);
    q.m(0, 1) = q.m(1, 0) = k.k3;
    q.labels = {HalfInt{-1}, HalfInt{1}};
    return q;
}

// 6-level (F = 5/2) quadratic form over the empty modes {-5/2, 1/2, 3/2} for
// the chiral-transport initial state with upper-leg weight p on |g_-3/2>.
inline QuadraticForm six_level_quadratic(const DriveParams& drives, double chi_n, double p_m32) {
    if (p_m32 < 0.0 || p_m32 > 1.0) throw DomainError("p_{-3/2} must lie in [0,1]");
    const double p = p_m32, q = 1.0 - p_m32;
    double c1 = 0.0, c2 = 0.0;
    for (const auto& d : drives.active()) {
        const double om = d.omega * chi_n, de = d.delta * chi_n;
        const double den_l = de - 13.0 * chi_n / 35.0;
        const double den_r = de - (9.0 + 8.0 * p) * chi_n / 35.0;
        detail::check_pump_pole(de, 13.0 * chi_n / 35.0, "13 chiN/35");
        detail::check_pump_pole(de, (9.0 + 8.0 * p) * chi_n / 35.0, "(9+8p) chiN/35");
        c1 += om * om * de / (den_l * den_l);
        c2 += om * om * de * chi_n / (den_l * den_l * den_r);
    }
    const double k1 = -(16.0 / 35.0) * c1 + (16.0 / 245.0) * c2;
    const double k2 = (8.0 / 35.0) * c1 + ((144.0 / 1225.0) * p + (16.0 / 245.0) * q) * c2;
    const double k3 = (144.0 / 1225.0) * c2;
    const double k5 = k3;
    const double k4 = (16.0 / 245.0) * c2;
    const double k6 = (48.0 * std::sqrt(5.0) / 1225.0) * c2;

    QuadraticForm out;
    out.labels = {HalfInt{-5}, HalfInt{1}, HalfInt{3}};
    out.l = Eigen::MatrixXd::Zero(3, 3);
    out.l(0, 0) = k1;
    out.l(1, 1) = k2;
    out.l(2, 2) = k3;
    out.l(0, 1) = out.l(1, 0) = k4 * std::sqrt(q);
    out.l(1, 2) = out.l(2, 1) = k5 * std::sqrt(p);
    out.m = Eigen::MatrixXd::Zero(3, 3);
    out.m(0, 1) = out.m(1, 0) = k6 * std::sqrt(p);
    out.m(1, 1) = 2.0 * k6 * std::sqrt(p * q);
    out.m(0, 2) = out.m(2, 0) = k6;
    out.m(1, 2) = out.m(2, 1) = k6 * std::sqrt(q);
    return out;
}

// ---------------------------------------------------------------------------
// Bogoliubov-de Gennes eigenproblem  [[L, M], [-M*, -L*]] (u,v)^T = eps (u,v)^T
// ---------------------------------------------------------------------------

enum class StabilityClass { AllReal, ComplexPresent };

struct BdGResult {
    Eigen::VectorXcd eps;
    Eigen::MatrixXcd t;  // columns (u_p, v_p)
    StabilityClass stability{StabilityClass::AllReal};
    double quartet_defect{0.0};  // worst mismatch under eps -> -eps and eps -> eps*
};

inline Eigen::MatrixXd bdg_generator(const QuadraticForm& q) {
    const int n = q.n_modes();
    Eigen::MatrixXd g(2 * n, 2 * n);
    g.topLeftCorner(n, n) = q.l;
    g.topRightCorner(n, n) = q.m;
    g.bottomLeftCorner(n, n) = -q.m;
    g.bottomRightCorner(n, n) = -q.l;
    return g;
}

struct BdGOptions {
    double pair_tol{1e-7};
    double imag_tol{1e-9};  // |Im eps| above this marks dynamical instability
    double condition_limit{1e10};
};

inline BdGResult bdg_solve(const QuadraticForm& q, const BdGOptions& opts = {}) {
    const Eigen::MatrixXd g = bdg_generator(q);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(g);
    if (solver.info() != Eigen::Success) throw DegeneracyError("BdG eigensolver failed");
    BdGResult out;
    out.eps = solver.eigenvalues();
    out.t = solver.eigenvectors();

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(out.t);
    const double cond = svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
    if (!std::isfinite(cond) || cond > opts.condition_limit)
        throw DegeneracyError("BdG eigenvector matrix is (near-)defective, cond ~ " + std::to_string(cond));

    // greedy nearest-pair matching of the {eps, -eps, eps*, -eps*} structure
    double defect = 0.0;
    for (Eigen::Index i = 0; i < out.eps.size(); ++i) {
        double best_neg = 1e300, best_conj = 1e300;
        for (Eigen::Index j = 0; j < out.eps.size(); ++j) {
            best_neg = std::min(best_neg, std::abs(out.eps[i] + out.eps[j]));
            best_conj = std::min(best_conj, std::abs(std::conj(out.eps[i]) - out.eps[j]));
        }
        defect = std::max(defect, std::max(best_neg, best_conj));
    }
    out.quartet_defect = defect;

    bool complex_present = false;
    for (Eigen::Index i = 0; i < out.eps.size(); ++i)
        if (std::abs(out.eps[i].imag()) > opts.imag_tol) complex_present = true;
    out.stability = complex_present ? StabilityClass::ComplexPresent : StabilityClass::AllReal;
    return out;
}

// ---------------------------------------------------------------------------
// Vacuum propagation: populations and pair correlators from
//   <vac| (A,A+)(A,A+)^T |vac>(t) = U_t [[0, I], [0, 0]] U_t^T
// ---------------------------------------------------------------------------

struct VacuumSeries {
    std::vector<double> t;
    Eigen::MatrixXd populations;       // samples x n, <adag_i a_i>(t)
    Eigen::MatrixXcd pair_last;        // <a_i a_j> block at the final sample
    double max_symplectic_defect{0.0};
    double min_population{0.0};
};

inline VacuumSeries bdg_propagate_vacuum(const QuadraticForm& q, const std::vector<double>& times,
                                         const BdGOptions& opts = {}) {
    const int n = q.n_modes();
    const BdGResult bdg = bdg_solve(q, opts);
    Eigen::PartialPivLU<Eigen::MatrixXcd> t_lu(bdg.t);
    const Eigen::MatrixXcd t_inv = t_lu.inverse();

    Eigen::MatrixXcd sigma0 = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    sigma0.topRightCorner(n, n) = Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd eta = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    eta.topLeftCorner(n, n) = Eigen::MatrixXcd::Identity(n, n);
    eta.bottomRightCorner(n, n) = -Eigen::MatrixXcd::Identity(n, n);

    VacuumSeries out;
    out.t = times;
    out.populations.resize(static_cast<Eigen::Index>(times.size()), n);
    for (std::size_t s = 0; s < times.size(); ++s) {
        Eigen::VectorXcd ph(2 * n);
        for (int k = 0; k < 2 * n; ++k)
            ph[k] = std::exp(std::complex<double>(0.0, -1.0) * bdg.eps[k] * times[s]);
        const Eigen::MatrixXcd u_t = bdg.t * ph.asDiagonal() * t_inv;
        const Eigen::MatrixXcd sigma = u_t * sigma0 * u_t.transpose();
        for (int i = 0; i < n; ++i) {
            const double pop = sigma(n + i, i).real();
            out.populations(static_cast<Eigen::Index>(s), i) = pop;
            out.min_population = std::min(out.min_population, pop);
        }
        const double defect = (u_t * eta * u_t.adjoint() - eta).cwiseAbs().maxCoeff();
        out.max_symplectic_defect = std::max(out.max_symplectic_defect, defect);
        if (s + 1 == times.size()) out.pair_last = sigma.topLeftCorner(n, n);
    }
    return out;
}

}  // namespace synladder::upa
