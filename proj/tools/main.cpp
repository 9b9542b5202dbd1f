// synladder — configuration-driven front end for the synthetic-ladder
// simulations: single trajectories, phase diagrams, chiral transport,
// correlation spreading, quadratic-model analytics, full-model benchmarks,
// finite-size scaling, and operator-identity verification.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "synladder/checks.hpp"
#include "synladder/config.hpp"
#include "synladder/io.hpp"
#include "synladder/svg.hpp"

namespace fs = std::filesystem;
using namespace synladder;
using nlohmann::json;
using config::SimConfig;

namespace {

struct Cli {
    std::string config_path;
    std::string out_override;
    int workers{-1};
    bool check{false};
    bool plot{true};
    bool no_plot{false};
};

SimConfig load(const Cli& cli, json& raw) {
    if (cli.config_path.empty()) {
        raw = json::object();
    } else {
        std::ifstream in(cli.config_path);
        if (!in) throw DomainError("cannot open config file " + cli.config_path);
        in >> raw;
    }
    SimConfig cfg = config::parse_config(raw);
    if (!cli.out_override.empty()) cfg.out_dir = cli.out_override;
    if (cli.workers >= 0) cfg.numerics.workers = cli.workers;
    if (cli.no_plot) cfg.plot = false;
    return cfg;
}

fs::path out_file(const SimConfig& cfg, const std::string& stem, const std::string& ext) {
    fs::create_directories(cfg.out_dir);
    return fs::path(cfg.out_dir) / (stem + "_" + io::param_hash(config::to_json(cfg)) + ext);
}

void write_sidecar(const SimConfig& cfg, const std::string& stem, json extra = {}) {
    json j;
    j["config"] = config::to_json(cfg);
    if (!extra.empty()) j["result"] = extra;
    io::write_json(out_file(cfg, stem, ".json"), j);
}

int report_checks(const std::vector<checks::CheckResult>& results) {
    bool all = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
        all = all && r.pass;
    }
    return all ? 0 : 1;
}

std::vector<double> tau_grid_of(const SimConfig& cfg) {
    std::vector<double> taus(static_cast<std::size_t>(cfg.samples));
    for (int i = 0; i < cfg.samples; ++i)
        taus[static_cast<std::size_t>(i)] = cfg.tau_max * i / (cfg.samples - 1);
    return taus;
}

Eigen::VectorXcd sector_state(const config::SectorStateSpec& spec, const fock::FockBasis& basis) {
    return spec.m2 ? fock::binomial_state(basis, spec.m1, *spec.m2, spec.p1)
                   : fock::single_mode_state(basis, spec.m1);
}

// ---------------------------------------------------------------------------

int cmd_evolve(const Cli& cli) {
    json raw;
    SimConfig cfg = load(cli, raw);
    ladder::LevelScheme s(cfg.f);
    auto up = std::make_shared<fock::FockBasis>(fock::ModeSet{s.leg_modes(fock::Sector::Upper)}, cfg.n_atoms / 2,
                                                cfg.numerics.dimension_cap);
    auto low = std::make_shared<fock::FockBasis>(fock::ModeSet{s.leg_modes(fock::Sector::Lower)},
                                                 cfg.n_atoms - cfg.n_atoms / 2, cfg.numerics.dimension_cap);
    auto prod = std::make_shared<fock::ProductBasis>(up, low);
    Eigen::VectorXcd psi = fock::product_state(*prod, sector_state(cfg.upper, *up), sector_state(cfg.lower, *low));

    std::shared_ptr<const fock::Basis> basis = prod;
    if (cfg.numerics.sector_reduction) {
        if (auto jz = ladder::definite_jz_twice(psi, *prod)) {
            auto sec = std::make_shared<fock::SectorBasis>(prod, ladder::jz_twice_weights(*prod), *jz);
            psi = fock::restrict_vector(psi, *sec);
            basis = sec;
        }
    }
    auto h = dynamics::handle_of(heff::build_heff_exact(s, basis, cfg.drives, cfg.chi_n, cfg.heff_options()));
    auto chans = dynamics::mode_population_channels(*basis);
    chans.push_back(dynamics::leg_population_channel(*basis, s, true));
    chans.push_back(dynamics::leg_population_channel(*basis, s, false));
    chans.push_back(dynamics::total_number_channel(*basis));
    auto series = dynamics::evolve(h, psi, tau_grid_of(cfg), cfg.time_scale(), chans, cfg.evolve_options());

    io::write_csv(out_file(cfg, "evolve", ".csv"), series);
    write_sidecar(cfg, "evolve", json{{"conservation", io::conservation_meta(series.cons)},
                                      {"basis_dim", basis->dim()}});
    if (cfg.plot) {
        std::vector<svg::Series> lines;
        for (int mi = 0; mi < basis->mode_count(); ++mi) {
            const std::string name = "n(" + basis->mode_label(mi).str() + ")";
            const Eigen::VectorXd y = series.channel(name);
            lines.push_back({name, series.tau, std::vector<double>(y.data(), y.data() + y.size())});
        }
        svg::write_line_chart(out_file(cfg, "evolve", ".svg").string(), lines, "tau", "population");
    }
    std::cout << "evolve: dim " << basis->dim() << ", " << cfg.samples << " samples -> "
              << out_file(cfg, "evolve", ".csv") << "\n";
    if (cli.check) {
        const bool ok = series.cons.max_norm_drift < 1e-7;
        return report_checks({{"trajectory conservation", ok,
                               "norm drift " + std::to_string(series.cons.max_norm_drift) + " (< 1e-7)"}});
    }
    return 0;
}

int cmd_phase_diagram(const Cli& cli) {
    json raw;
    SimConfig cfg = load(cli, raw);
    dynamics::PairSweepConfig sc;
    sc.n_atoms = cfg.n_atoms;
    sc.chi_n = cfg.chi_n;
    sc.omega = cfg.drives.omega_a != 0.0 ? cfg.drives.omega_a : cfg.drives.omega_b;
    sc.delta_a_grid = cfg.sweep_delta_a ? cfg.sweep_delta_a->grid() : Eigen::VectorXd::Constant(1, cfg.drives.delta_a);
    sc.delta_b_grid = cfg.sweep_delta_b ? cfg.sweep_delta_b->grid() : Eigen::VectorXd::Constant(1, cfg.drives.delta_b);
    sc.sector_reduction = cfg.numerics.sector_reduction;
    sc.dense_cap = cfg.numerics.dense_cap;
    sc.workers = cfg.numerics.workers;
    sc.heff_opts = cfg.heff_options();
    auto sweep = dynamics::pair_production_sweep(sc);
    io::write_csv(out_file(cfg, "phase_diagram", ".csv"), sweep);

    // analytic boundary overlay: roots per Delta_A over the Delta_B range
    {
        std::ofstream out(out_file(cfg, "phase_boundary", ".csv"));
        out.precision(17);
        out << "Delta_A,Delta_B_root\n";
        const double lo = sc.delta_b_grid.minCoeff(), hi = sc.delta_b_grid.maxCoeff();
        for (Eigen::Index i = 0; i < sc.delta_a_grid.size(); ++i) {
            for (double r :
                 upa::four_level_phase_boundary(sc.delta_a_grid[i], cfg.chi_n, sc.omega, sc.omega, lo, hi))
                out << sc.delta_a_grid[i] << "," << r << "\n";
        }
    }
    write_sidecar(cfg, "phase_diagram", io::sweep_meta(sweep));
    if (cfg.plot)
        svg::write_heatmap(out_file(cfg, "phase_diagram", ".svg").string(), sweep.ax1, sweep.ax2, sweep.value,
                           "Delta_B / chiN", "Delta_A / chiN", "long-time pair fraction");
    std::cout << "phase-diagram: " << sweep.ax1.size() << " x " << sweep.ax2.size() << " cells, "
              << sweep.messages.size() << " masked -> " << out_file(cfg, "phase_diagram", ".csv") << "\n";
    if (cli.check)
        return report_checks({checks::check_critical_detunings(), checks::check_pair_production()});
    return 0;
}

int cmd_chiral(const Cli& cli) {
    json raw;
    SimConfig cfg = load(cli, raw);
    dynamics::ChiralConfig cc;
    cc.n_atoms = cfg.n_atoms;
    cc.chi_n = cfg.chi_n;
    cc.omega = cfg.drives.omega_a != 0.0 ? cfg.drives.omega_a : cfg.drives.omega_b;
    cc.delta_a = cfg.drives.delta_a;
    cc.p_grid = cfg.sweep_p ? cfg.sweep_p->grid() : Eigen::VectorXd::LinSpaced(11, 0.0, 1.0);
    cc.delta_b_grid = cfg.sweep_delta_b ? cfg.sweep_delta_b->grid() : Eigen::VectorXd::Constant(1, cfg.drives.delta_b);
    cc.sector_reduction = cfg.numerics.sector_reduction;
    cc.dense_cap = cfg.numerics.dense_cap;
    cc.workers = cfg.numerics.workers;
    cc.finite_t_tau = cfg.numerics.finite_t_tau;
    cc.finite_t_samples = cfg.numerics.finite_t_samples;
    auto sweep = dynamics::chiral_transport_sweep(cc);
    io::write_csv(out_file(cfg, "chiral", ".csv"), sweep);
    write_sidecar(cfg, "chiral", io::sweep_meta(sweep));
    if (cfg.plot)
        svg::write_heatmap(out_file(cfg, "chiral", ".svg").string(), sweep.ax1, sweep.ax2, sweep.value,
                           "Delta_B / chiN", "p_-3/2", "N_diff / N_sum (long-time)");

    // short-time series with the quadratic-model overlay at the edge weights
    auto taus = tau_grid_of(cfg);
    for (double p : {0.1, 0.9}) {
        auto series = dynamics::chiral_short_time(cc, p, cfg.drives.delta_b, taus);
        dynamics::TimeSeries merged = series.ed;
        merged.channels.push_back("N_diff_quadratic");
        merged.values.conservativeResize(Eigen::NoChange, merged.values.cols() + 1);
        for (Eigen::Index k = 0; k < merged.values.rows(); ++k)
            merged.values(k, merged.values.cols() - 1) = series.upa_diff[static_cast<std::size_t>(k)];
        const std::string stem = p < 0.5 ? "chiral_series_p01" : "chiral_series_p09";
        io::write_csv(out_file(cfg, stem, ".csv"), merged);
        if (cfg.plot) {
            const Eigen::VectorXd ed = merged.channel("N_diff");
            svg::write_line_chart(out_file(cfg, stem, ".svg").string(),
                                  {{"N_diff (ED)", merged.tau, {ed.data(), ed.data() + ed.size()}},
                                   {"N_diff (quadratic)", merged.tau, series.upa_diff}},
                                  "tau", "N_diff", "p_-3/2 = " + std::to_string(p));
        }
    }
    std::cout << "chiral: " << sweep.ax1.size() << " x " << sweep.ax2.size() << " cells -> "
              << out_file(cfg, "chiral", ".csv") << "\n";
    if (cli.check) return report_checks({checks::check_chiral()});
    return 0;
}

int cmd_lightcone(const Cli& cli) {
    json raw;
    SimConfig cfg = load(cli, raw);
    dynamics::LightconeConfig lc;
    lc.f = cfg.f;
    lc.n_atoms = cfg.n_atoms;
    lc.chi_n = cfg.chi_n;
    lc.omega = cfg.drives.omega_a != 0.0 ? cfg.drives.omega_a : cfg.drives.omega_b;
    lc.delta_a = cfg.drives.delta_a;
    lc.delta_b = cfg.drives.delta_b;
    lc.tau_max = cfg.tau_max;
    lc.samples = cfg.samples;
    lc.sector_reduction = cfg.numerics.sector_reduction;
    lc.dense_cap = cfg.numerics.dense_cap;
    lc.dimension_cap = cfg.numerics.dimension_cap;
    auto res = dynamics::run_lightcone(lc);
    io::write_csv(out_file(cfg, "lightcone", ".csv"), res.series);
    {
        std::ofstream out(out_file(cfg, "lightcone_front", ".csv"));
        out.precision(17);
        out << "r,arrival_absolute,arrival_relative\n";
        for (int r : res.r_values) {
            out << r << ",";
            if (res.arrival_absolute.at(r)) out << *res.arrival_absolute.at(r);
            out << ",";
            if (res.arrival_relative.at(r)) out << *res.arrival_relative.at(r);
            out << "\n";
        }
    }
    write_sidecar(cfg, "lightcone",
                  json{{"max_abs_corr", res.max_abs_corr}, {"threshold_relative", res.threshold_relative}});
    if (cfg.plot) {
        std::vector<svg::Series> lines;
        for (int r : res.r_values) {
            const std::string name = "C(0," + std::to_string(r) + ")";
            const Eigen::VectorXd y = res.series.channel(name);
            lines.push_back({name, res.series.tau, {y.data(), y.data() + y.size()}});
        }
        svg::write_line_chart(out_file(cfg, "lightcone", ".svg").string(), lines, "tau", "C(0,r)");
    }
    std::cout << "lightcone: max |C| = " << res.max_abs_corr << " -> " << out_file(cfg, "lightcone", ".csv") << "\n";
    if (cli.check) return report_checks({checks::check_lightcone(false)});
    return 0;
}

int cmd_upa(const Cli& cli) {
    json raw;
    SimConfig cfg = load(cli, raw);
    json result;
    const double omega = cfg.drives.omega_a != 0.0 ? cfg.drives.omega_a : cfg.drives.omega_b;

    // 4-level closed forms
    auto k = upa::four_level_K(cfg.drives, cfg.chi_n);
    result["four_level"] = {{"K1", k.k1},
                            {"K2", k.k2},
                            {"K3", k.k3},
                            {"unstable", (k.k1 + k.k2) * (k.k1 + k.k2) < 4.0 * k.k3 * k.k3}};
    auto roots = upa::four_level_phase_boundary(cfg.drives.delta_a, cfg.chi_n, omega, omega, 0.5, 10.0);
    result["four_level"]["boundary_roots"] = roots;

    dynamics::TimeScale scale{omega, cfg.chi_n};
    dynamics::TimeSeries analytic;
    analytic.tau = tau_grid_of(cfg);
    analytic.channels = {"N_pm_quadratic"};
    analytic.values.resize(static_cast<Eigen::Index>(analytic.tau.size()), 1);
    analytic.t.resize(analytic.tau.size());
    for (std::size_t i = 0; i < analytic.tau.size(); ++i) {
        analytic.t[i] = scale.t_of_tau(analytic.tau[i]);
        analytic.values(static_cast<Eigen::Index>(i), 0) = upa::four_level_population(k, analytic.t[i]);
    }
    io::write_csv(out_file(cfg, "upa_population", ".csv"), analytic);

    // 6-level quadratic model at the configured upper-leg weight
    const double p = cfg.upper.m2 ? cfg.upper.p1 : 1.0;
    auto q = upa::six_level_quadratic(cfg.drives, cfg.chi_n, p);
    auto bdg = upa::bdg_solve(q);
    std::vector<std::pair<double, double>> eps;
    for (Eigen::Index i = 0; i < bdg.eps.size(); ++i) eps.push_back({bdg.eps[i].real(), bdg.eps[i].imag()});
    result["six_level"] = {{"p", p},
                           {"eigenvalues", eps},
                           {"phase", bdg.stability == upa::StabilityClass::ComplexPresent ? "I" : "II"},
                           {"quartet_defect", bdg.quartet_defect}};
    write_sidecar(cfg, "upa", result);
    std::cout << "upa: K = (" << k.k1 << ", " << k.k2 << ", " << k.k3 << "), phase "
              << result["six_level"]["phase"].get<std::string>() << " -> " << out_file(cfg, "upa", ".json") << "\n";
    if (cli.check) return report_checks({checks::check_critical_detunings(), checks::check_bdg_suite()});
    return 0;
}

int cmd_benchmark(const Cli& cli) {
    json raw;
    SimConfig cfg = load(cli, raw);
    fullmodel::IntegrateOptions opts;
    opts.substeps_per_period = cfg.numerics.substeps_per_period;
    opts.dense_cap = cfg.numerics.dense_cap;
    std::optional<fullmodel::ZeemanParams> z;
    if (cfg.zeeman) z = cfg.zeeman->params();
    auto bench = fullmodel::benchmark_heff(cfg.f, cfg.n_atoms, cfg.drives, cfg.chi_n, tau_grid_of(cfg), z, opts);
    io::write_csv(out_file(cfg, "benchmark_full", ".csv"), bench.full);
    io::write_csv(out_file(cfg, "benchmark_effective", ".csv"), bench.effective);
    json dev{{"max_deviation", bench.max_deviation},
             {"rms_deviation", bench.rms_deviation},
             {"richardson_error", bench.integration.richardson_error},
             {"max_q_drift", bench.integration.max_q_drift},
             {"max_excited_fraction", bench.integration.max_excited_fraction},
             {"adiabatic_warning", bench.integration.adiabatic_warning}};
    write_sidecar(cfg, "benchmark", dev);
    if (cfg.plot) {
        std::vector<svg::Series> lines;
        for (const auto& name : bench.full.channels) {
            const Eigen::VectorXd yf = bench.full.channel(name);
            const Eigen::VectorXd ye = bench.effective.channel(name);
            lines.push_back({name + " full", bench.full.tau, {yf.data(), yf.data() + yf.size()}});
            lines.push_back({name + " eff", bench.effective.tau, {ye.data(), ye.data() + ye.size()}});
        }
        svg::write_line_chart(out_file(cfg, "benchmark", ".svg").string(), lines, "tau", "fractional population");
    }
    std::cout << "benchmark: max deviation " << bench.max_deviation << ", rms " << bench.rms_deviation << " -> "
              << out_file(cfg, "benchmark", ".json") << "\n";
    if (cli.check)
        return report_checks(
            {checks::check_operator_identities(), checks::check_heff_oracle(), checks::check_benchmark()});
    return 0;
}

int cmd_fss(const Cli& cli) {
    json raw;
    SimConfig cfg = load(cli, raw);
    const std::vector<int> sizes{20, 40, 60, 80, 100};
    const double omega = cfg.drives.omega_a != 0.0 ? cfg.drives.omega_a : cfg.drives.omega_b;
    auto roots = upa::four_level_phase_boundary(cfg.drives.delta_a, cfg.chi_n, omega, omega, 0.5, 10.0);
    if (roots.empty()) throw NumericalError("no critical detuning in range for the configured Delta_A");
    const double xc = roots.front();
    Eigen::VectorXd grid = cfg.sweep_delta_b ? cfg.sweep_delta_b->grid()
                                             : Eigen::VectorXd::LinSpaced(25, xc - 0.3, xc + 0.3);
    auto data = dynamics::run_fss_sweep(sizes, cfg.drives.delta_a, grid, omega, cfg.chi_n, xc,
                                        cfg.numerics.sector_reduction);
    auto fit = dynamics::fit_collapse(data, 1.15, 2.38, 0.8);

    {
        std::ofstream out(out_file(cfg, "fss_curves", ".csv"));
        out.precision(17);
        out << "N,Delta_B,n_pm\n";
        for (std::size_t i = 0; i < data.sizes.size(); ++i)
            for (std::size_t jx = 0; jx < data.x.size(); ++jx)
                out << data.sizes[i] << "," << data.x[jx] << "," << data.y[i][static_cast<Eigen::Index>(jx)] << "\n";
    }
    write_sidecar(cfg, "fss", json{{"x_c", xc}, {"beta", fit.beta}, {"nu", fit.nu}, {"residual", fit.residual}});
    if (cfg.plot) {
        std::vector<svg::Series> lines;
        for (std::size_t i = 0; i < data.sizes.size(); ++i) {
            svg::Series s;
            s.label = "N=" + std::to_string(data.sizes[i]);
            const double sx = std::pow(data.sizes[i], 1.0 / fit.nu);
            const double sy = std::pow(data.sizes[i], fit.beta / fit.nu);
            for (std::size_t jx = 0; jx < data.x.size(); ++jx) {
                s.x.push_back((data.x[jx] - xc) * sx);
                s.y.push_back(data.y[i][static_cast<Eigen::Index>(jx)] * sy);
            }
            lines.push_back(std::move(s));
        }
        svg::write_line_chart(out_file(cfg, "fss_collapse", ".svg").string(), lines, "(Delta_B - c) N^{1/nu}",
                              "n N^{beta/nu}", "data collapse");
    }
    std::cout << "fss: x_c = " << xc << ", fit (beta, nu) = (" << fit.beta << ", " << fit.nu << ") -> "
              << out_file(cfg, "fss", ".json") << "\n";
    if (cli.check) return report_checks({checks::check_fss()});
    return 0;
}

int cmd_identities(const Cli& cli) {
    json raw;
    SimConfig cfg = load(cli, raw);
    json rows = json::array();
    double worst = 0.0;
    for (auto [tf, n] : std::vector<std::pair<int, int>>{{3, 1}, {3, 2}, {5, 1}, {5, 2}}) {
        auto r = fullmodel::verify_operator_identities(HalfInt{tf}, n, cfg.drives.delta_a, cfg.chi_n);
        rows.push_back({{"F", HalfInt{tf}.str()},
                        {"N", n},
                        {"residual_left", r.r_left},
                        {"residual_right", r.r_right},
                        {"residual_swapped_control", r.r_swapped}});
        worst = std::max({worst, r.r_left, r.r_right});
        std::cout << "F=" << HalfInt{tf}.str() << " N=" << n << ": residuals " << r.r_left << " / " << r.r_right
                  << " (swapped control " << r.r_swapped << ")\n";
    }
    write_sidecar(cfg, "identities", rows);
    if (cli.check) return report_checks({checks::check_operator_identities()});
    return worst < 1e-10 ? 0 : 1;
}

int cmd_validate(const Cli& cli) {
    json raw;
    SimConfig cfg = load(cli, raw);
    auto rep = config::validate(cfg);
    json rows = json::array();
    for (const auto& r : rep.rows) {
        std::cout << (r.pass ? "[pass] " : "[warn] ") << r.name << ": " << r.detail << "\n";
        rows.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    }
    write_sidecar(cfg, "validate", rows);
    return cli.check && !rep.all_pass() ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthetic-ladder cavity simulation toolkit"};
    app.require_subcommand(1);

    Cli cli;
    app.add_option("--config", cli.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", cli.out_override, "output directory override");
    app.add_option("--workers", cli.workers, "worker thread count for sweeps");
    app.add_flag("--check", cli.check, "run the built-in checks for this subcommand; nonzero exit on failure");
    auto* plot_flag = app.add_flag("--plot", "emit SVG plots (default)");
    auto* no_plot_flag = app.add_flag("--no-plot", "suppress SVG plots");

    std::map<std::string, std::function<int(const Cli&)>> commands{
        {"evolve", cmd_evolve},   {"phase-diagram", cmd_phase_diagram},
        {"chiral", cmd_chiral},   {"lightcone", cmd_lightcone},
        {"upa", cmd_upa},         {"benchmark", cmd_benchmark},
        {"fss", cmd_fss},         {"identities", cmd_identities},
        {"validate", cmd_validate}};
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, fn] : commands) {
        (void)fn;
        subs[name] = app.add_subcommand(name);
    }

    CLI11_PARSE(app, argc, argv);
    cli.no_plot = no_plot_flag->count() > 0;
    (void)plot_flag;

    try {
        for (const auto& [name, fn] : commands)
            if (subs[name]->parsed()) return fn(cli);
    } catch (const ResonanceError& e) {
        std::cerr << "resonance error: " << e.what() << "\n";
        return 2;
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
