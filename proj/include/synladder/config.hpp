// config.hpp — Run configuration: parsing, validation with field paths,
// JSON round-tripping, and the approximation-regime report

#pragma once

#include <json.hpp>

#include "synladder/fullmodel.hpp"
#include "synladder/heff.hpp"

namespace synladder::config {

using nlohmann::json;

// Bohr magneton over h, MHz per gauss
constexpr double kMuBMHzPerGauss = 1.3996245;

struct SectorStateSpec {
    // either all atoms in `m1`, or the two-mode superposition
    // (sqrt(p1)|m1> + sqrt(1-p1)|m2>)^{(x)n}
    HalfInt m1{0};
    std::optional<HalfInt> m2;
    double p1{1.0};
};

struct ZeemanSpec {
    double b_gauss{0.0};
    double g_excited{2.0 / 33.0};     // 87Sr 3P1 F=9/2 Lande factor
    double g_ground{-1.3e-4};         // 87Sr 1S0 F=9/2
    double chi_n_mhz{1.0};            // chiN / (2 pi), used to express shifts in chiN units

    double delta_e() const { return g_excited * kMuBMHzPerGauss * b_gauss / chi_n_mhz; }
    double delta_g() const { return g_ground * kMuBMHzPerGauss * b_gauss / chi_n_mhz; }
    fullmodel::ZeemanParams params() const { return {delta_e(), delta_g()}; }
};

struct AxisSpec {
    double min{0.0}, max{0.0};
    int points{1};
    Eigen::VectorXd grid() const {
        if (points == 1) return Eigen::VectorXd::Constant(1, min);
        return Eigen::VectorXd::LinSpaced(points, min, max);
    }
};

struct NumericsSpec {
    fock::Index dense_cap{4000};
    fock::Index dimension_cap{fock::kDefaultDimensionCap};
    double resonance_tol{1e-8};
    double krylov_tol{1e-11};
    double deg_tol{1e-10};
    int workers{0};
    bool sector_reduction{true};
    double finite_t_tau{2000.0};
    int finite_t_samples{2001};
    int substeps_per_period{40};
};

struct SimConfig {
    HalfInt f{3};
    int n_atoms{10};
    double chi_n{1.0};
    heff::DriveParams drives{0.05, 0.05, -3.0, 4.1};
    SectorStateSpec upper{HalfInt{3}, std::nullopt, 1.0};
    SectorStateSpec lower{HalfInt{-3}, std::nullopt, 1.0};
    double tau_max{50.0};
    int samples{500};
    std::optional<AxisSpec> sweep_delta_a;
    std::optional<AxisSpec> sweep_delta_b;
    std::optional<AxisSpec> sweep_p;
    std::optional<ZeemanSpec> zeeman;
    NumericsSpec numerics;
    std::string out_dir{"out"};
    bool plot{true};

    heff::HeffOptions heff_options() const {
        heff::HeffOptions o;
        o.dense_cap = numerics.dense_cap;
        o.resonance_tol = numerics.resonance_tol;
        return o;
    }
    dynamics::EvolveOptions evolve_options() const {
        dynamics::EvolveOptions o;
        o.dense_cap = numerics.dense_cap;
        o.krylov_tol = numerics.krylov_tol;
        o.deg_tol = numerics.deg_tol;
        return o;
    }
    dynamics::TimeScale time_scale() const {
        return {drives.omega_a != 0.0 ? drives.omega_a : drives.omega_b, chi_n};
    }
};

// ---------------------------------------------------------------------------
// JSON (de)serialization; parse errors carry the offending field path
// ---------------------------------------------------------------------------

namespace detail {

inline HalfInt half_from(const json& j, const std::string& path) {
    try {
        if (j.is_string()) return parse_half_int(j.get<std::string>());
        if (j.is_number()) {
            const double v = j.get<double>();
            const int tw = static_cast<int>(std::llround(2.0 * v));
            if (std::abs(2.0 * v - tw) > 1e-9) throw DomainError("not a half-integer");
            return HalfInt{tw};
        }
    } catch (const DomainError& e) {
        throw DomainError(path + ": " + e.what());
    }
    throw DomainError(path + ": expected a half-integer as string or number");
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback, const std::string& path) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw DomainError(path + "." + key + ": " + e.what());
    }
}

inline SectorStateSpec sector_from(const json& j, const std::string& path) {
    SectorStateSpec s;
    if (j.contains("mode")) {
        s.m1 = half_from(j.at("mode"), path + ".mode");
        return s;
    }
    if (j.contains("superposition")) {
        const json& sp = j.at("superposition");
        s.m1 = half_from(sp.at("m1"), path + ".superposition.m1");
        s.m2 = half_from(sp.at("m2"), path + ".superposition.m2");
        s.p1 = get_or<double>(sp, "p1", 0.5, path + ".superposition");
        if (s.p1 < 0.0 || s.p1 > 1.0) throw DomainError(path + ".superposition.p1: must lie in [0,1]");
        return s;
    }
    throw DomainError(path + ": needs either 'mode' or 'superposition'");
}

inline json sector_to(const SectorStateSpec& s) {
    if (!s.m2) return json{{"mode", s.m1.str()}};
    return json{{"superposition", {{"m1", s.m1.str()}, {"m2", s.m2->str()}, {"p1", s.p1}}}};
}

inline AxisSpec axis_from(const json& j, const std::string& path) {
    AxisSpec a;
    a.min = get_or<double>(j, "min", 0.0, path);
    a.max = get_or<double>(j, "max", a.min, path);
    a.points = get_or<int>(j, "points", 1, path);
    if (a.points < 1) throw DomainError(path + ".points: must be >= 1");
    return a;
}

}  // namespace detail

inline SimConfig parse_config(const json& j) {
    SimConfig c;
    if (j.contains("F")) c.f = detail::half_from(j.at("F"), "F");
    c.n_atoms = detail::get_or<int>(j, "N", c.n_atoms, "");
    c.chi_n = detail::get_or<double>(j, "chiN", c.chi_n, "");
    if (j.contains("drives")) {
        const json& d = j.at("drives");
        c.drives.omega_a = detail::get_or<double>(d, "Omega_A", 0.0, "drives");
        c.drives.omega_b = detail::get_or<double>(d, "Omega_B", 0.0, "drives");
        c.drives.delta_a = detail::get_or<double>(d, "Delta_A", 0.0, "drives");
        c.drives.delta_b = detail::get_or<double>(d, "Delta_B", 0.0, "drives");
    }
    if (j.contains("initial_state")) {
        const json& s = j.at("initial_state");
        if (s.contains("upper")) c.upper = detail::sector_from(s.at("upper"), "initial_state.upper");
        if (s.contains("lower")) c.lower = detail::sector_from(s.at("lower"), "initial_state.lower");
    }
    if (j.contains("time_grid")) {
        c.tau_max = detail::get_or<double>(j.at("time_grid"), "tau_max", c.tau_max, "time_grid");
        c.samples = detail::get_or<int>(j.at("time_grid"), "samples", c.samples, "time_grid");
        if (c.samples < 2) throw DomainError("time_grid.samples: must be >= 2");
    }
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        if (s.contains("Delta_A")) c.sweep_delta_a = detail::axis_from(s.at("Delta_A"), "sweep.Delta_A");
        if (s.contains("Delta_B")) c.sweep_delta_b = detail::axis_from(s.at("Delta_B"), "sweep.Delta_B");
        if (s.contains("p")) c.sweep_p = detail::axis_from(s.at("p"), "sweep.p");
    }
    if (j.contains("zeeman")) {
        const json& z = j.at("zeeman");
        ZeemanSpec zs;
        zs.b_gauss = detail::get_or<double>(z, "B_gauss", 0.0, "zeeman");
        zs.g_excited = detail::get_or<double>(z, "g_excited", zs.g_excited, "zeeman");
        zs.g_ground = detail::get_or<double>(z, "g_ground", zs.g_ground, "zeeman");
        zs.chi_n_mhz = detail::get_or<double>(z, "chiN_MHz", zs.chi_n_mhz, "zeeman");
        if (zs.chi_n_mhz <= 0.0) throw DomainError("zeeman.chiN_MHz: must be positive");
        c.zeeman = zs;
    }
    if (j.contains("numerics")) {
        const json& n = j.at("numerics");
        c.numerics.dense_cap = detail::get_or<fock::Index>(n, "dense_cap", c.numerics.dense_cap, "numerics");
        c.numerics.dimension_cap =
            detail::get_or<fock::Index>(n, "dimension_cap", c.numerics.dimension_cap, "numerics");
        c.numerics.resonance_tol = detail::get_or<double>(n, "resonance_tol", c.numerics.resonance_tol, "numerics");
        c.numerics.krylov_tol = detail::get_or<double>(n, "krylov_tol", c.numerics.krylov_tol, "numerics");
        c.numerics.deg_tol = detail::get_or<double>(n, "deg_tol", c.numerics.deg_tol, "numerics");
        c.numerics.workers = detail::get_or<int>(n, "workers", c.numerics.workers, "numerics");
        c.numerics.sector_reduction =
            detail::get_or<bool>(n, "sector_reduction", c.numerics.sector_reduction, "numerics");
        c.numerics.finite_t_tau = detail::get_or<double>(n, "finite_t_tau", c.numerics.finite_t_tau, "numerics");
        c.numerics.finite_t_samples =
            detail::get_or<int>(n, "finite_t_samples", c.numerics.finite_t_samples, "numerics");
        c.numerics.substeps_per_period =
            detail::get_or<int>(n, "substeps_per_period", c.numerics.substeps_per_period, "numerics");
    }
    if (j.contains("output")) {
        c.out_dir = detail::get_or<std::string>(j.at("output"), "dir", c.out_dir, "output");
        c.plot = detail::get_or<bool>(j.at("output"), "plot", c.plot, "output");
    }

    // hard invariants
    for (auto [name, v] : std::initializer_list<std::pair<const char*, double>>{
             {"numerics.resonance_tol", c.numerics.resonance_tol},
             {"numerics.krylov_tol", c.numerics.krylov_tol},
             {"numerics.deg_tol", c.numerics.deg_tol}})
        if (v <= 0.0) throw DomainError(std::string(name) + ": tolerance must be positive");
    if (c.n_atoms <= 0) throw DomainError("N: must be positive");
    if (c.f.twice <= 0 || c.f.is_integer()) throw DomainError("F: must be a positive half-integer");
    return c;
}

inline json to_json(const SimConfig& c) {
    json j;
    j["F"] = c.f.str();
    j["N"] = c.n_atoms;
    j["chiN"] = c.chi_n;
    j["drives"] = {{"Omega_A", c.drives.omega_a},
                   {"Omega_B", c.drives.omega_b},
                   {"Delta_A", c.drives.delta_a},
                   {"Delta_B", c.drives.delta_b}};
    j["initial_state"] = {{"upper", detail::sector_to(c.upper)}, {"lower", detail::sector_to(c.lower)}};
    j["time_grid"] = {{"tau_max", c.tau_max}, {"samples", c.samples}};
    json sweep;
    auto axis_to = [](const AxisSpec& a) { return json{{"min", a.min}, {"max", a.max}, {"points", a.points}}; };
    if (c.sweep_delta_a) sweep["Delta_A"] = axis_to(*c.sweep_delta_a);
    if (c.sweep_delta_b) sweep["Delta_B"] = axis_to(*c.sweep_delta_b);
    if (c.sweep_p) sweep["p"] = axis_to(*c.sweep_p);
    if (!sweep.empty()) j["sweep"] = sweep;
    if (c.zeeman)
        j["zeeman"] = {{"B_gauss", c.zeeman->b_gauss},
                       {"g_excited", c.zeeman->g_excited},
                       {"g_ground", c.zeeman->g_ground},
                       {"chiN_MHz", c.zeeman->chi_n_mhz}};
    j["numerics"] = {{"dense_cap", c.numerics.dense_cap},
                     {"dimension_cap", c.numerics.dimension_cap},
                     {"resonance_tol", c.numerics.resonance_tol},
                     {"krylov_tol", c.numerics.krylov_tol},
                     {"deg_tol", c.numerics.deg_tol},
                     {"workers", c.numerics.workers},
                     {"sector_reduction", c.numerics.sector_reduction},
                     {"finite_t_tau", c.numerics.finite_t_tau},
                     {"finite_t_samples", c.numerics.finite_t_samples},
                     {"substeps_per_period", c.numerics.substeps_per_period}};
    j["output"] = {{"dir", c.out_dir}, {"plot", c.plot}};
    return j;
}

// ---------------------------------------------------------------------------
// Validation report: soft warnings plus the approximation-regime rows
// ---------------------------------------------------------------------------

struct ValidationRow {
    std::string name;
    bool pass{true};
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationRow> rows;
    bool all_pass() const {
        for (const auto& r : rows)
            if (!r.pass) return false;
        return true;
    }
};

// Checks the drive/field hierarchy the effective description relies on, plus
// configuration sanity that is advisory rather than fatal.
inline ValidationReport validate(const SimConfig& c, double margin = 10.0) {
    ValidationReport rep;
    std::ostringstream os;

    const bool split_state = true;  // both sectors carry atoms in every experiment here
    if (split_state && c.n_atoms % 2 != 0)
        rep.rows.push_back({"even atom number for half/half initial states", false,
                            "N = " + std::to_string(c.n_atoms) + " is odd; sectors get N/2 and N - N/2"});

    const auto active = c.drives.active();
    if (active.size() == 2 && c.drives.delta_a * c.drives.delta_b >= 0.0)
        rep.rows.push_back({"opposite-sign detunings", false,
                            "Delta_A * Delta_B >= 0; shift cancellation needs opposite signs"});

    // adiabatic elimination of the dressed excited manifold
    for (const auto& d : active) {
        os.str("");
        os << "|Delta_" << d.name << "|/Omega = " << std::abs(d.delta) / d.omega << ", chiN/Omega = "
           << 1.0 / d.omega << " (margin " << margin << ")";
        const bool ok = std::abs(d.delta) >= margin * d.omega && 1.0 >= margin * d.omega;
        rep.rows.push_back({std::string("adiabatic elimination of excited states (drive ") + d.name + ")", ok,
                            os.str()});
    }

    // weak magnetic field: chiN >> delta_e * F_e
    if (c.zeeman) {
        const double lhs = 1.0, rhs = std::abs(c.zeeman->delta_e()) * c.f.value();
        os.str("");
        os << "chiN / (delta_e F) = " << (rhs > 0 ? lhs / rhs : std::numeric_limits<double>::infinity())
           << " (margin " << margin << ")";
        rep.rows.push_back({"weak magnetic field", rhs == 0.0 || lhs >= margin * rhs, os.str()});
    }

    // shift suppression at the configured quench
    try {
        ladder::LevelScheme s(c.f);
        auto up = std::make_shared<fock::FockBasis>(fock::ModeSet{s.leg_modes(fock::Sector::Upper)}, c.n_atoms / 2,
                                                    c.numerics.dimension_cap);
        auto low = std::make_shared<fock::FockBasis>(fock::ModeSet{s.leg_modes(fock::Sector::Lower)},
                                                     c.n_atoms - c.n_atoms / 2, c.numerics.dimension_cap);
        auto prod = std::make_shared<fock::ProductBasis>(up, low);
        auto mk = [&](const SectorStateSpec& spec, const fock::FockBasis& b) {
            return spec.m2 ? fock::binomial_state(b, spec.m1, *spec.m2, spec.p1) : fock::single_mode_state(b, spec.m1);
        };
        Eigen::VectorXcd psi = fock::product_state(*prod, mk(c.upper, *up), mk(c.lower, *low));
        auto psi_f = heff::dominant_hop_target(s, prod, psi);
        auto diag = heff::shift_suppression_diagnostic(s, prod, c.drives, c.chi_n, psi, psi_f, c.heff_options());
        os.str("");
        os << "shift gap / hop strength = " << diag.ratio << " (want < 1)";
        rep.rows.push_back({"differential shift suppressed by drive choice", diag.ratio < 1.0, os.str()});
    } catch (const std::exception& e) {
        rep.rows.push_back({"differential shift suppressed by drive choice", false,
                            std::string("diagnostic unavailable: ") + e.what()});
    }
    return rep;
}

}  // namespace synladder::config
