// Propagation paths (spectral, Krylov, invariant sector), infinite-time
// averages, correlators, and threshold extraction.

#include <catch2/catch_amalgamated.hpp>

#include <memory>

#include "synladder/dynamics.hpp"
#include "synladder/fss.hpp"

using namespace synladder;
using namespace synladder::fock;
using namespace synladder::dynamics;
using heff::DriveParams;
using ladder::LevelScheme;

namespace {

std::shared_ptr<const ProductBasis> quench_basis(const LevelScheme& s, int n) {
    auto up = std::make_shared<FockBasis>(ModeSet{s.leg_modes(Sector::Upper)}, n / 2);
    auto low = std::make_shared<FockBasis>(ModeSet{s.leg_modes(Sector::Lower)}, n / 2);
    return std::make_shared<ProductBasis>(up, low);
}

Eigen::VectorXcd pair_quench_state(const LevelScheme& s, const ProductBasis& b) {
    return product_state(b, single_mode_state(*b.upper(), s.f), single_mode_state(*b.lower(), -s.f));
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    return v;
}

DriveParams fig_s1_drives() {
    DriveParams d;
    d.omega_a = d.omega_b = 0.05;
    d.delta_a = -3.0;
    d.delta_b = 4.1;
    return d;
}

}  // namespace

TEST_CASE("zero Hamiltonian keeps populations constant") {
    LevelScheme s(HalfInt{3});
    auto basis = quench_basis(s, 4);
    auto h = handle_of_dense(Eigen::MatrixXd::Zero(basis->dim(), basis->dim()));
    auto psi0 = pair_quench_state(s, *basis);
    auto series = evolve(h, psi0, linspace(0, 10, 21), TimeScale{}, mode_population_channels(*basis));
    for (Eigen::Index c = 0; c < series.values.cols(); ++c)
        REQUIRE((series.values.col(c).array() - series.values(0, c)).abs().maxCoeff() < 1e-12);
}

TEST_CASE("pair production grows to a macroscopic fraction at the benchmark parameters") {
    LevelScheme s(HalfInt{3});
    const int n = 10;
    auto basis = quench_basis(s, n);
    auto h = handle_of(heff::build_heff_exact(s, basis, fig_s1_drives(), 1.0));
    auto psi0 = pair_quench_state(s, *basis);
    auto series = evolve(h, psi0, linspace(0, 10, 201), TimeScale{0.05, 1.0}, mode_population_channels(*basis));
    const Eigen::VectorXd n_pm = 0.5 * (series.channel("n(-1/2)") + series.channel("n(1/2)"));
    REQUIRE(n_pm.maxCoeff() / n > 0.1);
    // conservation along the trajectory
    REQUIRE(series.cons.max_norm_drift < 1e-10);
    REQUIRE(series.cons.max_energy_drift < 1e-10);
}

TEST_CASE("leg populations stay constant along an effective-Hamiltonian trajectory") {
    LevelScheme s(HalfInt{3});
    auto basis = quench_basis(s, 6);
    auto h = handle_of(heff::build_heff_exact(s, basis, fig_s1_drives(), 1.0));
    auto psi0 = pair_quench_state(s, *basis);
    std::vector<DiagChannel> chans{leg_population_channel(*basis, s, true), leg_population_channel(*basis, s, false),
                                   total_number_channel(*basis)};
    auto series = evolve(h, psi0, linspace(0, 20, 101), TimeScale{0.05, 1.0}, chans);
    REQUIRE((series.channel("N_upper").array() - 3.0).abs().maxCoeff() < 1e-8);
    REQUIRE((series.channel("N_lower").array() - 3.0).abs().maxCoeff() < 1e-8);
    REQUIRE((series.channel("N_total").array() - 6.0).abs().maxCoeff() < 1e-8);
}

TEST_CASE("spectral and Krylov propagation agree on a mid-size instance") {
    LevelScheme s(HalfInt{5});
    const int n = 10;  // dim 441
    auto basis = quench_basis(s, n);
    DriveParams drives;
    drives.omega_a = drives.omega_b = 0.05;
    drives.delta_a = -3.0;
    drives.delta_b = 4.0;
    auto dense_h = handle_of(heff::build_heff_exact(s, basis, drives, 1.0));
    heff::HeffOptions solver_opts;
    solver_opts.force_solver = true;
    auto krylov_h = handle_of(heff::build_heff_exact(s, basis, drives, 1.0, solver_opts));
    REQUIRE(!krylov_h.dense_real);

    auto psi0 = product_state(*basis, binomial_state(*basis->upper(), HalfInt{-3}, HalfInt{5}, 0.5),
                              single_mode_state(*basis->lower(), HalfInt{-1}));
    auto taus = linspace(0, 5, 26);
    auto chans = mode_population_channels(*basis);
    auto a = evolve(dense_h, psi0, taus, TimeScale{0.05, 1.0}, chans);
    auto b = evolve(krylov_h, psi0, taus, TimeScale{0.05, 1.0}, chans);
    REQUIRE((a.values - b.values).cwiseAbs().maxCoeff() < 1e-8);
    REQUIRE(b.cons.max_norm_drift < 1e-8);
}

TEST_CASE("invariant-sector reduction reproduces the full propagation") {
    LevelScheme s(HalfInt{3});
    const int n = 8;
    auto basis = quench_basis(s, n);
    auto psi0 = pair_quench_state(s, *basis);
    auto jz = ladder::definite_jz_twice(psi0, *basis);
    REQUIRE(jz.has_value());
    REQUIRE(*jz == 0);

    auto sector = std::make_shared<SectorBasis>(basis, ladder::jz_twice_weights(*basis), *jz);
    REQUIRE(sector->dim() < basis->dim());

    auto h_full = handle_of(heff::build_heff_exact(s, basis, fig_s1_drives(), 1.0));
    auto h_sec = handle_of(heff::build_heff_exact(s, sector, fig_s1_drives(), 1.0));
    auto psi0_sec = restrict_vector(psi0, *sector);

    auto taus = linspace(0, 10, 51);
    auto a = evolve(h_full, psi0, taus, TimeScale{0.05, 1.0}, mode_population_channels(*basis));
    auto b = evolve(h_sec, psi0_sec, taus, TimeScale{0.05, 1.0}, mode_population_channels(*sector));
    REQUIRE((a.values - b.values).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("long-time averages") {
    SECTION("diagonal Hamiltonian with distinct eigenvalues") {
        Eigen::MatrixXd h = Eigen::VectorXd::LinSpaced(6, 0.0, 5.0).asDiagonal();
        auto handle = handle_of_dense(h);
        Eigen::VectorXcd psi0(6);
        psi0 << 0.5, 0.5, 0.5, 0.5, 0.0, 0.0;
        Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(6, 1.0, 6.0);
        double expect = 0.0;
        for (int k = 0; k < 6; ++k) expect += std::norm(psi0[k]) * w[k];
        REQUIRE(long_time_average(handle, psi0, w) == Catch::Approx(expect).epsilon(1e-12));
    }
    SECTION("commuting observable on an eigenstate returns its initial value") {
        Eigen::MatrixXd h(2, 2);
        h << 1.0, 0.2, 0.2, -0.5;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        Eigen::VectorXcd psi0 = es.eigenvectors().col(0).cast<std::complex<double>>();
        Eigen::VectorXd w(2);
        w << 3.0, 7.0;
        const double init = (w.array() * psi0.cwiseAbs2().array()).sum();
        REQUIRE(long_time_average(handle_of_dense(h), psi0, w) == Catch::Approx(init).epsilon(1e-12));
    }
    SECTION("matches a long trapezoidal average on a dim-225 instance") {
        LevelScheme s(HalfInt{3});
        auto basis = quench_basis(s, 28);  // dim 15^2 = 225
        auto handle = handle_of(heff::build_heff_exact(s, basis, fig_s1_drives(), 1.0));
        auto psi0 = pair_quench_state(s, *basis);
        Eigen::VectorXd w;
        for (int mi = 0; mi < basis->mode_count(); ++mi)
            if (basis->mode_label(mi) == HalfInt{-1}) w = occupation_weights(*basis, mi);
        const double exact = long_time_average(handle, psi0, w);
        EvolveOptions fast;
        fast.track_energy = false;
        auto series = evolve(handle, psi0, linspace(0, 2000, 20001), TimeScale{0.05, 1.0}, {DiagChannel{"o", w}}, fast);
        const double trap = finite_time_average(series, "o");
        REQUIRE(std::abs(exact - trap) < 1e-3);
    }
    SECTION("dimension above the dense cap is a capability error") {
        LevelScheme s(HalfInt{3});
        auto basis = quench_basis(s, 8);
        heff::HeffOptions o;
        o.force_solver = true;
        auto handle = handle_of(heff::build_heff_exact(s, basis, fig_s1_drives(), 1.0, o));
        auto psi0 = pair_quench_state(s, *basis);
        REQUIRE_THROWS_AS(long_time_average(handle, psi0, Eigen::VectorXd::Ones(basis->dim())), CapabilityError);
    }
}

TEST_CASE("correlation matrix") {
    LevelScheme s(HalfInt{3});
    SECTION("product Fock states have identically zero correlations") {
        auto basis = quench_basis(s, 6);
        auto psi = pair_quench_state(s, *basis);
        auto c = correlation_matrix(psi, s, *basis);
        REQUIRE(c.c.cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("two-atom pair state has C = -1 between the two sites") {
        auto basis = std::make_shared<FockBasis>(ModeSet{s.leg_modes(Sector::Lower)}, 2);
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(basis->dim());
        psi[basis->index_of({2, 0})] = 1.0 / std::sqrt(2.0);
        psi[basis->index_of({0, 2})] = 1.0 / std::sqrt(2.0);
        auto c = correlation_matrix(psi, s, *basis);
        REQUIRE(c.c(0, 1) == Catch::Approx(-1.0).epsilon(1e-12));
        REQUIRE((c.c - c.c.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("threshold extraction") {
    SECTION("light-cone front with interpolation") {
        std::vector<double> tau{0, 1, 2, 3};
        Eigen::VectorXd c(4);
        c << 0.0, -0.1, -0.2, -0.3;
        auto hit = light_cone_front(tau, c, -0.15);
        REQUIRE(hit.has_value());
        REQUIRE(*hit == Catch::Approx(1.5).epsilon(1e-12));
    }
    SECTION("never crossed reports absent") {
        std::vector<double> tau{0, 1, 2};
        Eigen::VectorXd c = Eigen::VectorXd::Constant(3, -0.05);
        REQUIRE(!light_cone_front(tau, c, -0.15).has_value());
    }
    SECTION("delay time starting above the level is zero") {
        std::vector<double> tau{0, 1};
        Eigen::VectorXd n(2);
        n << 0.2, 0.3;
        REQUIRE(*delay_time(tau, n, 0.05) == 0.0);
    }
    SECTION("delay time interpolates the first upward crossing") {
        std::vector<double> tau{0, 1, 2};
        Eigen::VectorXd n(3);
        n << 0.0, 0.04, 0.08;
        REQUIRE(*delay_time(tau, n, 0.05) == Catch::Approx(1.25).epsilon(1e-12));
    }
}

TEST_CASE("data collapse machinery") {
    // synthetic curves from a planted scaling function f(x) = 1/(1+exp(-x))
    const double beta_p = 1.1, nu_p = 2.3, xc = 5.0;
    CollapseInput in;
    in.sizes = {20, 40, 60, 80, 100};
    in.x = [] {
        std::vector<double> xs;
        for (int i = 0; i <= 400; ++i) xs.push_back(4.0 + i * 0.005);
        return xs;
    }();
    in.x_c = xc;
    for (int n : in.sizes) {
        Eigen::VectorXd y(static_cast<Eigen::Index>(in.x.size()));
        for (std::size_t j = 0; j < in.x.size(); ++j) {
            const double arg = (in.x[j] - xc) * std::pow(n, 1.0 / nu_p);
            y[static_cast<Eigen::Index>(j)] = std::pow(n, -beta_p / nu_p) / (1.0 + std::exp(-arg));
        }
        in.y.push_back(y);
    }
    SECTION("identical curves collapse with zero residual at beta = 0, large nu") {
        CollapseInput flat = in;
        for (auto& y : flat.y) y = flat.y.front();
        REQUIRE(collapse_residual(flat, 0.0, 1e9) < 1e-20);
    }
    SECTION("planted exponents are recovered to +-0.05") {
        auto fit = fit_collapse(in, beta_p + 0.3, nu_p - 0.4, 0.8);
        REQUIRE(std::abs(fit.beta - beta_p) < 0.05);
        REQUIRE(std::abs(fit.nu - nu_p) < 0.05);
    }
    SECTION("planted exponents beat perturbed ones") {
        const double r0 = collapse_residual(in, beta_p, nu_p);
        for (double db : {-0.5, 0.5})
            for (double dn : {-0.5, 0.5}) REQUIRE(r0 < collapse_residual(in, beta_p + db, nu_p + dn));
    }
    SECTION("disjoint rescaled ranges raise a collapse error") {
        // grids entirely to one side of x_c separate under strong rescaling
        CollapseInput bad;
        bad.sizes = {2, 400, 80000};
        bad.x = {6.0, 6.5, 7.0};
        bad.x_c = 5.0;
        for (std::size_t i = 0; i < 3; ++i) bad.y.push_back(Eigen::VectorXd::Ones(3));
        REQUIRE_THROWS_AS(collapse_residual(bad, 1.0, 0.3), CollapseError);
    }
}
