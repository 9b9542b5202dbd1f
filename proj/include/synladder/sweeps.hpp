// sweeps.hpp — Experiment drivers over parameter grids: pair-production phase
// diagrams, chiral transport, light-cone correlation spreading, delay-time
// scaling, and order-parameter curves for data collapse

#pragma once

#include <atomic>
#include <map>
#include <mutex>
#include <thread>

#include "synladder/dynamics.hpp"
#include "synladder/fss.hpp"
#include "synladder/upa.hpp"

namespace synladder::dynamics {

using fock::FockBasis;
using fock::ModeSet;
using fock::ProductBasis;
using fock::Sector;
using fock::SectorBasis;
using heff::DriveParams;

// ---------------------------------------------------------------------------
// Gridded results with masked failure cells
// ---------------------------------------------------------------------------

enum CellStatus : int { kOk = 0, kMaskedResonance = 1, kMaskedUndefined = 2 };

struct SweepResult {
    std::string ax1_name, ax2_name;
    Eigen::VectorXd ax1, ax2;
    Eigen::MatrixXd value;   // ax1.size() x ax2.size(); masked cells hold NaN
    Eigen::MatrixXi status;
    std::vector<std::string> messages;
};

namespace detail {

// Deterministic parallel map over grid cells: results land by index, messages
// are collected per cell and merged in grid order afterwards.
template <class Fn>
inline SweepResult run_grid(const std::string& ax1_name, const Eigen::VectorXd& ax1, const std::string& ax2_name,
                            const Eigen::VectorXd& ax2, int workers, Fn&& cell) {
    SweepResult out;
    out.ax1_name = ax1_name;
    out.ax2_name = ax2_name;
    out.ax1 = ax1;
    out.ax2 = ax2;
    const Eigen::Index n1 = ax1.size(), n2 = ax2.size();
    out.value = Eigen::MatrixXd::Constant(n1, n2, std::numeric_limits<double>::quiet_NaN());
    out.status = Eigen::MatrixXi::Zero(n1, n2);
    std::vector<std::string> cell_msg(static_cast<std::size_t>(n1 * n2));

    const int n_workers = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
    std::atomic<Eigen::Index> next{0};
    auto work = [&] {
        for (;;) {
            const Eigen::Index k = next.fetch_add(1);
            if (k >= n1 * n2) return;
            const Eigen::Index i = k / n2, j = k % n2;
            try {
                out.value(i, j) = cell(ax1[i], ax2[j]);
            } catch (const ResonanceError& e) {
                out.status(i, j) = kMaskedResonance;
                cell_msg[static_cast<std::size_t>(k)] = e.what();
            } catch (const DiagnosticError& e) {
                out.status(i, j) = kMaskedUndefined;
                cell_msg[static_cast<std::size_t>(k)] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w + 1 < n_workers; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();

    for (Eigen::Index k = 0; k < n1 * n2; ++k)
        if (!cell_msg[static_cast<std::size_t>(k)].empty())
            out.messages.push_back(std::to_string(k / n2) + "," + std::to_string(k % n2) + ": " +
                                   cell_msg[static_cast<std::size_t>(k)]);
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Shared construction helpers
// ---------------------------------------------------------------------------

struct QuenchSetup {
    std::shared_ptr<const fock::Basis> basis;  // possibly sector-reduced
    Eigen::VectorXcd psi0;
};

// Two-leg product basis with all upper atoms in mode `m_up` and lower in
// `m_low`; reduced to the conserved total-J_z sector when requested.
inline QuenchSetup make_leg_quench(const ladder::LevelScheme& s, int n, HalfInt m_up, HalfInt m_low,
                                   bool sector_reduction, Index dimension_cap = fock::kDefaultDimensionCap) {
    auto up = std::make_shared<FockBasis>(ModeSet{s.leg_modes(Sector::Upper)}, n / 2, dimension_cap);
    auto low = std::make_shared<FockBasis>(ModeSet{s.leg_modes(Sector::Lower)}, n - n / 2, dimension_cap);
    auto prod = std::make_shared<ProductBasis>(up, low);
    Eigen::VectorXcd psi =
        fock::product_state(*prod, fock::single_mode_state(*up, m_up), fock::single_mode_state(*low, m_low));
    if (sector_reduction) {
        if (auto jz = ladder::definite_jz_twice(psi, *prod)) {
            auto sec = std::make_shared<SectorBasis>(prod, ladder::jz_twice_weights(*prod), *jz);
            return {sec, fock::restrict_vector(psi, *sec)};
        }
    }
    return {prod, psi};
}

// Fractional population weight of the per-atom level pair |g_+-1/2>, averaged
// over the two modes.
inline Eigen::VectorXd pair_mode_weights(const fock::Basis& basis, int n_atoms) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(basis.dim());
    for (int mi = 0; mi < basis.mode_count(); ++mi)
        if (basis.mode_label(mi) == HalfInt{-1} || basis.mode_label(mi) == HalfInt{1})
            w += fock::occupation_weights(basis, mi);
    return w * (0.5 / n_atoms);
}

// ---------------------------------------------------------------------------
// Pair-production phase diagram (4-level ladder)
// ---------------------------------------------------------------------------

struct PairSweepConfig {
    int n_atoms{100};
    double chi_n{1.0};
    double omega{0.05};
    Eigen::VectorXd delta_a_grid;
    Eigen::VectorXd delta_b_grid;
    bool sector_reduction{true};
    Index dense_cap{4000};
    int workers{0};
    heff::HeffOptions heff_opts{};
};

// Long-time average fractional pair population per cell, with the analytic
// critical detunings available separately for overlay.
inline SweepResult pair_production_sweep(const PairSweepConfig& cfg) {
    ladder::LevelScheme s(HalfInt{3});
    return detail::run_grid("Delta_A", cfg.delta_a_grid, "Delta_B", cfg.delta_b_grid, cfg.workers,
                            [&](double da, double db) {
                                DriveParams d;
                                d.omega_a = d.omega_b = cfg.omega;
                                d.delta_a = da;
                                d.delta_b = db;
                                auto setup = make_leg_quench(s, cfg.n_atoms, s.f, -s.f, cfg.sector_reduction);
                                heff::HeffOptions ho = cfg.heff_opts;
                                ho.dense_cap = cfg.dense_cap;
                                auto h = handle_of(heff::build_heff_exact(s, setup.basis, d, cfg.chi_n, ho));
                                EvolveOptions eo;
                                eo.dense_cap = cfg.dense_cap;
                                return long_time_average(h, setup.psi0, pair_mode_weights(*setup.basis, cfg.n_atoms),
                                                         eo);
                            });
}

// ---------------------------------------------------------------------------
// Chiral transport (6-level ladder)
// ---------------------------------------------------------------------------

struct ChiralConfig {
    int n_atoms{12};
    double chi_n{1.0};
    double omega{0.05};
    double delta_a{-3.0};
    Eigen::VectorXd p_grid;        // initial |g_-3/2> weight on the upper leg
    Eigen::VectorXd delta_b_grid;
    bool sector_reduction{true};   // applies only to definite-J_z initial states
    Index dense_cap{4000};
    int workers{0};
    double finite_t_tau{2000.0};   // fallback horizon when the dense path is unavailable
    int finite_t_samples{2001};
    double sum_floor{1e-6};
};

struct ChiralSetup {
    QuenchSetup q;
    Eigen::VectorXd w_diff;  // N_{3/2} - N_{-5/2}
    Eigen::VectorXd w_sum;   // N_{3/2} + N_{-5/2}
};

inline ChiralSetup make_chiral_setup(const ladder::LevelScheme& s, int n, double p, bool sector_reduction,
                                     Index dimension_cap = fock::kDefaultDimensionCap) {
    auto up = std::make_shared<FockBasis>(ModeSet{s.leg_modes(Sector::Upper)}, n / 2, dimension_cap);
    auto low = std::make_shared<FockBasis>(ModeSet{s.leg_modes(Sector::Lower)}, n - n / 2, dimension_cap);
    auto prod = std::make_shared<ProductBasis>(up, low);
    Eigen::VectorXcd up_state = (p >= 1.0)   ? fock::single_mode_state(*up, HalfInt{-3})
                                : (p <= 0.0) ? fock::single_mode_state(*up, HalfInt{5})
                                             : fock::binomial_state(*up, HalfInt{-3}, HalfInt{5}, p);
    Eigen::VectorXcd psi = fock::product_state(*prod, up_state, fock::single_mode_state(*low, HalfInt{-1}));

    ChiralSetup out;
    out.q.basis = prod;
    out.q.psi0 = psi;
    if (sector_reduction) {
        if (auto jz = ladder::definite_jz_twice(psi, *prod)) {
            auto sec = std::make_shared<SectorBasis>(prod, ladder::jz_twice_weights(*prod), *jz);
            out.q.basis = sec;
            out.q.psi0 = fock::restrict_vector(psi, *sec);
        }
    }
    const auto& basis = *out.q.basis;
    out.w_diff = Eigen::VectorXd::Zero(basis.dim());
    out.w_sum = Eigen::VectorXd::Zero(basis.dim());
    for (int mi = 0; mi < basis.mode_count(); ++mi) {
        if (basis.mode_label(mi) == HalfInt{3}) {
            out.w_diff += fock::occupation_weights(basis, mi);
            out.w_sum += fock::occupation_weights(basis, mi);
        }
        if (basis.mode_label(mi) == HalfInt{-5}) {
            out.w_diff -= fock::occupation_weights(basis, mi);
            out.w_sum += fock::occupation_weights(basis, mi);
        }
    }
    return out;
}

// Normalized long-time chirality N_diff / N_sum per (p, Delta_B) cell; cells
// with vanishing N_sum are reported undefined, not numeric.
inline SweepResult chiral_transport_sweep(const ChiralConfig& cfg) {
    ladder::LevelScheme s(HalfInt{5});
    return detail::run_grid(
        "p_-3/2", cfg.p_grid, "Delta_B", cfg.delta_b_grid, cfg.workers, [&](double p, double db) {
            DriveParams d;
            d.omega_a = d.omega_b = cfg.omega;
            d.delta_a = cfg.delta_a;
            d.delta_b = db;
            auto setup = make_chiral_setup(s, cfg.n_atoms, p, cfg.sector_reduction);
            auto h = handle_of(heff::build_heff_exact(s, setup.q.basis, d, cfg.chi_n));
            EvolveOptions eo;
            eo.dense_cap = cfg.dense_cap;
            double avg_diff, avg_sum;
            try {
                avg_diff = long_time_average(h, setup.q.psi0, setup.w_diff, eo);
                avg_sum = long_time_average(h, setup.q.psi0, setup.w_sum, eo);
            } catch (const CapabilityError&) {
                // finite-time fallback above the dense cap
                std::vector<double> taus(static_cast<std::size_t>(cfg.finite_t_samples));
                for (int i = 0; i < cfg.finite_t_samples; ++i)
                    taus[static_cast<std::size_t>(i)] = cfg.finite_t_tau * i / (cfg.finite_t_samples - 1);
                eo.track_energy = false;
                auto series = evolve(h, setup.q.psi0, taus, TimeScale{cfg.omega, cfg.chi_n},
                                     {DiagChannel{"diff", setup.w_diff}, DiagChannel{"sum", setup.w_sum}}, eo);
                avg_diff = finite_time_average(series, "diff");
                avg_sum = finite_time_average(series, "sum");
            }
            if (avg_sum < cfg.sum_floor)
                throw DiagnosticError("N_sum average below floor; chirality undefined");
            return avg_diff / avg_sum;
        });
}

// Short-time N_diff trajectory for one cell, with the matching UPA curve.
struct ChiralSeries {
    TimeSeries ed;               // channels N_diff, N_sum
    std::vector<double> upa_diff;  // same tau grid
    std::vector<double> upa_sum;
};

inline ChiralSeries chiral_short_time(const ChiralConfig& cfg, double p, double delta_b,
                                      const std::vector<double>& tau_grid) {
    ladder::LevelScheme s(HalfInt{5});
    DriveParams d;
    d.omega_a = d.omega_b = cfg.omega;
    d.delta_a = cfg.delta_a;
    d.delta_b = delta_b;
    auto setup = make_chiral_setup(s, cfg.n_atoms, p, cfg.sector_reduction);
    auto h = handle_of(heff::build_heff_exact(s, setup.q.basis, d, cfg.chi_n));
    EvolveOptions eo;
    eo.dense_cap = cfg.dense_cap;
    ChiralSeries out;
    out.ed = evolve(h, setup.q.psi0, tau_grid, TimeScale{cfg.omega, cfg.chi_n},
                    {DiagChannel{"N_diff", setup.w_diff}, DiagChannel{"N_sum", setup.w_sum}}, eo);

    TimeScale scale{cfg.omega, cfg.chi_n};
    auto q = upa::six_level_quadratic(d, cfg.chi_n, p);
    std::vector<double> ts;
    for (double tau : tau_grid) ts.push_back(scale.t_of_tau(tau));
    auto vac = upa::bdg_propagate_vacuum(q, ts);
    const int i_m52 = q.mode_index(HalfInt{-5});
    const int i_32 = q.mode_index(HalfInt{3});
    const double pump = cfg.n_atoms / 2.0;  // both UPA modes scale the same way
    (void)pump;
    for (Eigen::Index k = 0; k < vac.populations.rows(); ++k) {
        out.upa_diff.push_back(vac.populations(k, i_32) - vac.populations(k, i_m52));
        out.upa_sum.push_back(vac.populations(k, i_32) + vac.populations(k, i_m52));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Light-cone correlation spreading (10-level ladder)
// ---------------------------------------------------------------------------

struct LightconeConfig {
    HalfInt f{9};
    int n_atoms{10};
    double chi_n{1.0};
    double omega{0.05};
    double delta_a{-3.0};
    double delta_b{4.1};
    double tau_max{150.0};
    int samples{601};
    bool sector_reduction{true};
    Index dense_cap{4000};
    Index dimension_cap{fock::kDefaultDimensionCap};
};

struct LightconeResult {
    TimeSeries series;  // per-site populations and C(0,r) channels
    std::vector<int> r_values;
    std::map<int, std::optional<double>> arrival_absolute;  // threshold -0.15
    std::map<int, std::optional<double>> arrival_relative;  // 10% of max |C|
    double max_abs_corr{0.0};
    double threshold_relative{0.0};
};

// Evolves the edge quench and extracts C(0,r)(tau) with r > 0 on the lower
// leg and r < 0 on the upper leg; site 0 is the lower-leg origin g_{-F}.
inline LightconeResult run_lightcone(const LightconeConfig& cfg) {
    ladder::LevelScheme s(cfg.f);
    auto setup = make_leg_quench(s, cfg.n_atoms, s.f, -s.f, cfg.sector_reduction, cfg.dimension_cap);
    DriveParams d;
    d.omega_a = d.omega_b = cfg.omega;
    d.delta_a = cfg.delta_a;
    d.delta_b = cfg.delta_b;
    auto h = handle_of(heff::build_heff_exact(s, setup.basis, d, cfg.chi_n));

    const auto& basis = *setup.basis;
    auto weight_of_mode = [&](HalfInt m) {
        for (int mi = 0; mi < basis.mode_count(); ++mi)
            if (basis.mode_label(mi) == m) return fock::occupation_weights(basis, mi);
        throw DomainError("mode " + m.str() + " not present");
    };

    LightconeResult out;
    const int r_max = (cfg.f.twice + 1) / 2 - 1;  // sites per leg minus the origin
    std::vector<DiagChannel> chans;
    const Eigen::VectorXd w0 = weight_of_mode(-cfg.f);
    chans.push_back({"n(r=0)", w0});
    for (int r = -r_max; r <= r_max; ++r) {
        if (r == 0) continue;
        out.r_values.push_back(r);
        const HalfInt m = s.mode_at_site(r);
        const Eigen::VectorXd wr = weight_of_mode(m);
        chans.push_back({"n(r=" + std::to_string(r) + ")", wr});
        chans.push_back({"nn(r=" + std::to_string(r) + ")", (w0.array() * wr.array()).matrix()});
    }

    std::vector<double> taus(static_cast<std::size_t>(cfg.samples));
    for (int i = 0; i < cfg.samples; ++i)
        taus[static_cast<std::size_t>(i)] = cfg.tau_max * i / (cfg.samples - 1);
    EvolveOptions eo;
    eo.dense_cap = cfg.dense_cap;
    out.series = evolve(h, setup.psi0, taus, TimeScale{cfg.omega, cfg.chi_n}, chans, eo);

    // connected correlators and their threshold crossings
    const Eigen::VectorXd n0 = out.series.channel("n(r=0)");
    std::map<int, Eigen::VectorXd> corr;
    for (int r : out.r_values) {
        const Eigen::VectorXd nr = out.series.channel("n(r=" + std::to_string(r) + ")");
        const Eigen::VectorXd nn = out.series.channel("nn(r=" + std::to_string(r) + ")");
        Eigen::VectorXd c = nn - (n0.array() * nr.array()).matrix();
        corr[r] = c;
        out.max_abs_corr = std::max(out.max_abs_corr, c.cwiseAbs().maxCoeff());
    }
    out.threshold_relative = -0.1 * out.max_abs_corr;
    for (int r : out.r_values) {
        out.arrival_absolute[r] = light_cone_front(out.series.tau, corr[r], -0.15);
        out.arrival_relative[r] = light_cone_front(out.series.tau, corr[r], out.threshold_relative);
    }
    // append correlator channels for emission
    for (int r : out.r_values) {
        out.series.channels.push_back("C(0," + std::to_string(r) + ")");
        out.series.values.conservativeResize(Eigen::NoChange, out.series.values.cols() + 1);
        out.series.values.col(out.series.values.cols() - 1) = corr[r];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Delay-time scaling and order-parameter curves for data collapse
// ---------------------------------------------------------------------------

struct DelayScalingResult {
    std::vector<int> sizes;
    std::vector<double> t_star;  // in tau units
    double slope{0.0};
    double intercept{0.0};
    double r_squared{0.0};
};

inline DelayScalingResult run_delay_scaling(const std::vector<int>& sizes, const DriveParams& drives, double chi_n,
                                            double level, double tau_max, int samples, bool sector_reduction = true) {
    ladder::LevelScheme s(HalfInt{3});
    DelayScalingResult out;
    out.sizes = sizes;
    for (int n : sizes) {
        auto setup = make_leg_quench(s, n, s.f, -s.f, sector_reduction);
        auto h = handle_of(heff::build_heff_exact(s, setup.basis, drives, chi_n));
        std::vector<double> taus(static_cast<std::size_t>(samples));
        for (int i = 0; i < samples; ++i) taus[static_cast<std::size_t>(i)] = tau_max * i / (samples - 1);
        auto series = evolve(h, setup.psi0, taus, TimeScale{drives.omega_a, chi_n},
                             {DiagChannel{"n_pm", pair_mode_weights(*setup.basis, n)}});
        auto t = delay_time(series.tau, series.channel("n_pm"), level);
        if (!t) throw NumericalError("delay level never crossed for N = " + std::to_string(n) +
                                     " within tau_max = " + std::to_string(tau_max));
        out.t_star.push_back(*t);
    }
    // least squares of t* against ln(N/2)
    const auto m = static_cast<double>(sizes.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const double x = std::log(0.5 * sizes[i]), y = out.t_star[i];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    out.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    out.intercept = (sy - out.slope * sx) / m;
    const double ss_res = syy - sy * sy / m - out.slope * (sxy - sx * sy / m);
    const double ss_tot = syy - sy * sy / m;
    out.r_squared = 1.0 - ss_res / ss_tot;
    return out;
}

// Long-time order parameter n_pm(Delta_B) for several system sizes, as input
// for the finite-size data collapse.
inline CollapseInput run_fss_sweep(const std::vector<int>& sizes, double delta_a, const Eigen::VectorXd& delta_b_grid,
                                   double omega, double chi_n, double x_c, bool sector_reduction = true) {
    ladder::LevelScheme s(HalfInt{3});
    CollapseInput in;
    in.sizes = sizes;
    for (Eigen::Index j = 0; j < delta_b_grid.size(); ++j) in.x.push_back(delta_b_grid[j]);
    in.x_c = x_c;
    for (int n : sizes) {
        Eigen::VectorXd y(delta_b_grid.size());
        auto setup = make_leg_quench(s, n, s.f, -s.f, sector_reduction);
        const Eigen::VectorXd w = pair_mode_weights(*setup.basis, n);
        for (Eigen::Index j = 0; j < delta_b_grid.size(); ++j) {
            DriveParams d;
            d.omega_a = d.omega_b = omega;
            d.delta_a = delta_a;
            d.delta_b = delta_b_grid[j];
            auto h = handle_of(heff::build_heff_exact(s, setup.basis, d, chi_n));
            y[j] = long_time_average(h, setup.psi0, w);
        }
        in.y.push_back(y);
    }
    return in;
}

}  // namespace synladder::dynamics
