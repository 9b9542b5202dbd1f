// dynamics.hpp — State propagation under Hermitian Hamiltonians and the
// observable machinery: diagonal channels, infinite-time averages via the
// diagonal ensemble, two-point correlators, threshold-crossing extraction

#pragma once

#include <Eigen/Eigenvalues>

#include <functional>
#include <optional>

#include "synladder/heff.hpp"

namespace synladder::dynamics {

using fock::Basis;
using fock::Index;
using ladder::LevelScheme;

// Dimensionless time tau = Omega^2 t / (2 pi chiN); Omega and chiN fix the map
// back to absolute time (hbar = 1, energies in units of chiN).
struct TimeScale {
    double omega{0.05};  // drive Rabi frequency in units of chiN
    double chi_n{1.0};
    double t_of_tau(double tau) const { return tau * 2.0 * M_PI / (omega * omega * chi_n); }
    double tau_of_t(double t) const { return t * omega * omega * chi_n / (2.0 * M_PI); }
};

struct EvolveOptions {
    Index dense_cap{4000};
    double krylov_tol{1e-11};  // local error per step; well under the 1e-9 contract
    int krylov_dim{30};
    double deg_tol{1e-10};     // eigenvalue clustering width (units of chiN)
    bool track_energy{true};
};

// A Hamiltonian as a Hermitian linear map, optionally with a dense real
// materialization enabling spectral (exact) propagation.
struct HamiltonianHandle {
    Index dim{0};
    std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)> apply;
    std::optional<Eigen::MatrixXd> dense_real;
};

inline HamiltonianHandle handle_of(heff::EffectiveHamiltonian h) {
    HamiltonianHandle out;
    out.dim = h.dim();
    if (h.dense) out.dense_real = *h.dense;
    if (h.sparse && h.sparse->max_abs_imag() < 1e-13 && h.dim() <= 4000)
        out.dense_real = Eigen::MatrixXcd(h.sparse->mat).real();
    auto hp = std::make_shared<heff::EffectiveHamiltonian>(std::move(h));
    out.apply = [hp](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) { hp->apply(x, y); };
    return out;
}

inline HamiltonianHandle handle_of_dense(Eigen::MatrixXd h) {
    HamiltonianHandle out;
    out.dim = h.rows();
    auto hp = std::make_shared<Eigen::MatrixXd>(std::move(h));
    out.dense_real = *hp;
    out.apply = [hp](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) { y.noalias() = (*hp) * x; };
    return out;
}

inline HamiltonianHandle handle_of_sparse(fock::SparseOperator op, Index dense_cap = 4000) {
    HamiltonianHandle out;
    out.dim = op.dim();
    if (op.max_abs_imag() < 1e-13 && op.dim() <= dense_cap) out.dense_real = Eigen::MatrixXcd(op.mat).real();
    auto hp = std::make_shared<fock::SparseOperator>(std::move(op));
    out.apply = [hp](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) { y.noalias() = hp->mat * x; };
    return out;
}

// ---------------------------------------------------------------------------
// Spectral data: full eigendecomposition of a real-symmetric Hamiltonian
// ---------------------------------------------------------------------------

struct SpectralData {
    Eigen::VectorXd evals;
    Eigen::MatrixXd evecs;

    explicit SpectralData(const Eigen::MatrixXd& h) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
        if (solver.info() != Eigen::Success) throw NumericalError("dense eigendecomposition failed");
        evals = solver.eigenvalues();
        evecs = solver.eigenvectors();
    }

    Eigen::VectorXcd coefficients(const Eigen::VectorXcd& psi0) const { return evecs.transpose() * psi0; }

    Eigen::VectorXcd state_at(double t, const Eigen::VectorXcd& coef) const {
        Eigen::VectorXcd phases(evals.size());
        for (Index k = 0; k < evals.size(); ++k) phases[k] = std::polar(1.0, -evals[k] * t) * coef[k];
        return evecs * phases;
    }

    // Exact T -> infinity Cesaro average of a diagonal observable from the
    // diagonal ensemble, clustering degenerate eigenvalues within deg_tol.
    double diagonal_ensemble_average(const Eigen::VectorXcd& coef, const Eigen::VectorXd& weights,
                                     double deg_tol) const {
        const Index n = evals.size();
        double total = 0.0;
        Index start = 0;
        while (start < n) {
            Index stop = start + 1;
            while (stop < n && evals[stop] - evals[stop - 1] <= deg_tol) ++stop;
            Eigen::VectorXcd u = evecs.middleCols(start, stop - start) * coef.segment(start, stop - start);
            total += (weights.array() * u.cwiseAbs2().array()).sum();
            start = stop;
        }
        return total;
    }
};

// ---------------------------------------------------------------------------
// Adaptive Lanczos propagation
// ---------------------------------------------------------------------------

namespace detail {

using ApplyFn = std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>;

// Advance psi by dt (absolute time, either sign). The Krylov space is
// step-size independent, so adaptivity only reevaluates the small exponential.
inline void krylov_advance(const ApplyFn& apply, Eigen::VectorXcd& psi, double dt, double tol, int m_max) {
    const Index n = psi.size();
    const double dir = dt >= 0.0 ? 1.0 : -1.0;
    double remaining = std::abs(dt);
    int guard = 0;
    while (remaining > 0.0) {
        if (++guard > 1000000) throw NumericalError("Krylov stepper failed to consume the interval");
        const double beta0 = psi.norm();
        if (beta0 == 0.0) throw NumericalError("Krylov stepper got a zero state");
        const int m = static_cast<int>(std::min<Index>(m_max, n));
        Eigen::MatrixXcd v(n, m);
        Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m), beta = Eigen::VectorXd::Zero(m);
        v.col(0) = psi / beta0;
        Eigen::VectorXcd w(n);
        int built = m;
        bool breakdown = false;
        for (int j = 0; j < m; ++j) {
            apply(v.col(j), w);
            if (j > 0) w -= beta[j - 1] * v.col(j - 1);
            alpha[j] = w.dot(v.col(j)).real();  // careful: Eigen dot conjugates the left arg
            w -= alpha[j] * v.col(j);
            // one pass of reorthogonalization keeps the basis clean at long m
            w -= v.leftCols(j + 1) * (v.leftCols(j + 1).adjoint() * w);
            const double b = w.norm();
            if (j + 1 < m) {
                beta[j] = b;
                if (b < 1e-14) {
                    built = j + 1;
                    breakdown = true;
                    break;
                }
                v.col(j + 1) = w / b;
            } else {
                beta[j] = b;  // residual coupling used in the error estimate
            }
        }
        Eigen::MatrixXd tmat = Eigen::MatrixXd::Zero(built, built);
        for (int j = 0; j < built; ++j) {
            tmat(j, j) = alpha[j];
            if (j + 1 < built) tmat(j, j + 1) = tmat(j + 1, j) = beta[j];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tmat);
        const Eigen::VectorXd& theta = es.eigenvalues();
        const Eigen::MatrixXd& q = es.eigenvectors();

        double h = remaining;
        for (;;) {
            Eigen::VectorXcd small(built);
            for (int k = 0; k < built; ++k) small[k] = std::polar(1.0, -dir * theta[k] * h) * q(0, k);
            Eigen::VectorXcd y = q * small;  // exp(-i T h) e_1
            const double err = breakdown ? 0.0 : std::abs(beta[built - 1] * std::abs(y[built - 1]) * h);
            if (err <= tol || h < remaining * 1e-12) {
                if (h < remaining * 1e-12 && err > tol)
                    throw NumericalError("Krylov step size underflow (local error " + std::to_string(err) + ")");
                psi = beta0 * (v.leftCols(built) * y);
                remaining -= h;
                break;
            }
            h *= 0.5;
        }
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

struct DiagChannel {
    std::string name;
    Eigen::VectorXd weights;  // per basis state
};

struct ConservationStats {
    double max_norm_drift{0.0};
    double max_number_drift{0.0};
    double max_energy_drift{0.0};
    double max_leg_drift{0.0};  // filled by drivers that track leg channels
};

struct TimeSeries {
    std::vector<double> tau;
    std::vector<double> t;
    std::vector<std::string> channels;
    Eigen::MatrixXd values;  // samples x channels
    Eigen::VectorXd norms;
    Eigen::VectorXd energies;
    ConservationStats cons;

    Index channel_index(const std::string& name) const {
        for (std::size_t i = 0; i < channels.size(); ++i)
            if (channels[i] == name) return static_cast<Index>(i);
        throw DomainError("no channel named " + name);
    }
    Eigen::VectorXd channel(const std::string& name) const { return values.col(channel_index(name)); }
};

// |psi(t)> = exp(-iHt)|psi0> sampled on the tau grid: full spectral
// decomposition when a dense materialization exists under the cap, otherwise
// adaptive Krylov stepping.
inline TimeSeries evolve(const HamiltonianHandle& h, const Eigen::VectorXcd& psi0, const std::vector<double>& tau_grid,
                         const TimeScale& scale, const std::vector<DiagChannel>& channels,
                         const EvolveOptions& opts = {}) {
    if (std::abs(psi0.norm() - 1.0) > 1e-8) throw DomainError("evolve: initial state is not normalized");
    if (psi0.size() != h.dim) throw DomainError("evolve: state length does not match Hamiltonian");
    for (std::size_t k = 1; k < tau_grid.size(); ++k)
        if (tau_grid[k] < tau_grid[k - 1]) throw DomainError("evolve: tau grid must be nondecreasing");

    const Index n_samples = static_cast<Index>(tau_grid.size());
    TimeSeries out;
    out.tau = tau_grid;
    out.t.resize(tau_grid.size());
    for (std::size_t k = 0; k < tau_grid.size(); ++k) out.t[k] = scale.t_of_tau(tau_grid[k]);
    for (const auto& c : channels) out.channels.push_back(c.name);
    out.values.resize(n_samples, static_cast<Index>(channels.size()));
    out.norms.resize(n_samples);
    out.energies.resize(n_samples);

    const bool use_dense = h.dense_real && h.dim <= opts.dense_cap;
    std::optional<SpectralData> spec;
    Eigen::VectorXcd coef;
    if (use_dense) {
        spec.emplace(*h.dense_real);
        coef = spec->coefficients(psi0);
    }

    Eigen::VectorXcd psi = psi0, hpsi;
    double t_prev = 0.0;
    double e0 = 0.0;
    for (Index s = 0; s < n_samples; ++s) {
        const double t = out.t[static_cast<std::size_t>(s)];
        if (use_dense) {
            psi = spec->state_at(t, coef);
        } else if (t > t_prev) {
            detail::krylov_advance(h.apply, psi, t - t_prev, opts.krylov_tol, opts.krylov_dim);
        }
        t_prev = t;

        const Eigen::VectorXd dens = psi.cwiseAbs2();
        for (Index c = 0; c < static_cast<Index>(channels.size()); ++c)
            out.values(s, c) = channels[static_cast<std::size_t>(c)].weights.dot(dens);
        out.norms[s] = psi.norm();
        if (opts.track_energy) {
            h.apply(psi, hpsi);
            out.energies[s] = psi.dot(hpsi).real();
        } else {
            out.energies[s] = 0.0;
        }
        if (s == 0) e0 = out.energies[0];
        out.cons.max_norm_drift = std::max(out.cons.max_norm_drift, std::abs(out.norms[s] - out.norms[0]));
        out.cons.max_energy_drift = std::max(out.cons.max_energy_drift, std::abs(out.energies[s] - e0));
    }
    return out;
}

// Exact infinite-time average of a diagonal observable. Requires the dense
// spectral path; callers may fall back to finite-time averaging.
inline double long_time_average(const HamiltonianHandle& h, const Eigen::VectorXcd& psi0,
                                const Eigen::VectorXd& weights, const EvolveOptions& opts = {}) {
    if (!h.dense_real || h.dim > opts.dense_cap)
        throw CapabilityError("long_time_average needs the dense spectral path (dim " + std::to_string(h.dim) +
                              " above cap " + std::to_string(opts.dense_cap) + ")");
    SpectralData spec(*h.dense_real);
    return spec.diagonal_ensemble_average(spec.coefficients(psi0), weights, opts.deg_tol);
}

// Trapezoidal time average of a sampled channel (finite-T fallback).
inline double finite_time_average(const TimeSeries& series, const std::string& channel) {
    const Eigen::VectorXd y = series.channel(channel);
    if (y.size() < 2) return y.size() ? y[0] : 0.0;
    double acc = 0.0;
    for (Index k = 1; k < y.size(); ++k)
        acc += 0.5 * (y[k] + y[k - 1]) * (series.tau[static_cast<std::size_t>(k)] - series.tau[static_cast<std::size_t>(k - 1)]);
    const double span = series.tau.back() - series.tau.front();
    return span > 0 ? acc / span : y[0];
}

// ---------------------------------------------------------------------------
// Correlations over synthetic sites
// ---------------------------------------------------------------------------

struct CorrelationMatrix {
    std::vector<int> sites;          // ascending site coordinates present in the basis
    std::vector<bool> upper_leg;    // leg tag per entry (distinguishes 0 from 0*)
    Eigen::MatrixXd c;               // C(i,j) = <N_i N_j> - <N_i><N_j>
};

// Site-indexed connected density correlations of a normalized state. Mode
// number operators are diagonal, so everything reduces to |psi|^2 sums.
inline CorrelationMatrix correlation_matrix(const Eigen::VectorXcd& state, const LevelScheme& scheme,
                                            const Basis& basis) {
    const Eigen::VectorXd dens = state.cwiseAbs2();
    const int nm = basis.mode_count();
    std::vector<Eigen::VectorXd> w(static_cast<std::size_t>(nm));
    CorrelationMatrix out;
    for (int mi = 0; mi < nm; ++mi) {
        w[static_cast<std::size_t>(mi)] = fock::occupation_weights(basis, mi);
        out.sites.push_back(scheme.site_coordinate(basis.mode_label(mi)));
        out.upper_leg.push_back(scheme.on_upper_leg(basis.mode_label(mi)));
    }
    out.c.resize(nm, nm);
    Eigen::VectorXd mean(nm);
    for (int mi = 0; mi < nm; ++mi) mean[mi] = w[static_cast<std::size_t>(mi)].dot(dens);
    for (int i = 0; i < nm; ++i)
        for (int j = i; j < nm; ++j) {
            const double nn =
                (w[static_cast<std::size_t>(i)].array() * w[static_cast<std::size_t>(j)].array() * dens.array()).sum();
            out.c(i, j) = out.c(j, i) = nn - mean[i] * mean[j];
        }
    return out;
}

// ---------------------------------------------------------------------------
// Threshold crossings
// ---------------------------------------------------------------------------

// First tau where a (negative-going) correlator series reaches `threshold`
// (C <= threshold), linearly interpolated; absent if never crossed.
inline std::optional<double> light_cone_front(const std::vector<double>& tau, const Eigen::VectorXd& c,
                                              double threshold) {
    for (Index k = 0; k < c.size(); ++k) {
        if (c[k] <= threshold) {
            if (k == 0) return tau.front();
            const double c0 = c[k - 1], c1 = c[k];
            const double f = (threshold - c0) / (c1 - c0);
            return tau[static_cast<std::size_t>(k - 1)] +
                   f * (tau[static_cast<std::size_t>(k)] - tau[static_cast<std::size_t>(k - 1)]);
        }
    }
    return std::nullopt;
}

// First upward crossing of `level`; 0 when the series starts above it.
inline std::optional<double> delay_time(const std::vector<double>& tau, const Eigen::VectorXd& n, double level = 0.05) {
    if (n.size() == 0) return std::nullopt;
    if (n[0] >= level) return 0.0;
    for (Index k = 1; k < n.size(); ++k) {
        if (n[k] >= level) {
            const double f = (level - n[k - 1]) / (n[k] - n[k - 1]);
            return tau[static_cast<std::size_t>(k - 1)] +
                   f * (tau[static_cast<std::size_t>(k)] - tau[static_cast<std::size_t>(k - 1)]);
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Channel helpers
// ---------------------------------------------------------------------------

inline std::vector<DiagChannel> mode_population_channels(const Basis& basis) {
    std::vector<DiagChannel> chans;
    for (int mi = 0; mi < basis.mode_count(); ++mi)
        chans.push_back({"n(" + basis.mode_label(mi).str() + ")", fock::occupation_weights(basis, mi)});
    return chans;
}

inline DiagChannel total_number_channel(const Basis& basis) {
    return {"N_total", fock::total_number_weights(basis)};
}

inline DiagChannel leg_population_channel(const Basis& basis, const LevelScheme& scheme, bool upper) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(basis.dim());
    for (int mi = 0; mi < basis.mode_count(); ++mi)
        if (scheme.on_upper_leg(basis.mode_label(mi)) == upper) w += fock::occupation_weights(basis, mi);
    return {upper ? "N_upper" : "N_lower", w};
}

}  // namespace synladder::dynamics
