// Effective-Hamiltonian assembly: hand-solvable limits, Hermiticity and
// leg-number conservation, solver-vs-dense agreement, large-detuning scaling,
// and the drive-suppression diagnostic.

#include <catch2/catch_amalgamated.hpp>

#include <memory>
#include <random>

#include "synladder/heff.hpp"

using namespace synladder;
using namespace synladder::fock;
using namespace synladder::heff;
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

}  // namespace

TEST_CASE("single-atom exact Hamiltonian matches the scalar closed form") {
    LevelScheme s(HalfInt{3});
    auto basis = std::make_shared<FockBasis>(ModeSet{s.leg_modes(Sector::Lower)}, 1);
    DriveParams drives;
    drives.omega_a = 0.05;
    drives.delta_a = -3.0;
    auto h = build_heff_exact(s, basis, drives, 1.0);
    REQUIRE(h.has_dense());

    const double chi = 1.0;  // chiN / N with N = 1
    const double om = 0.05, de = -3.0;
    const double d_m32 = s.dl_coeff(HalfInt{-3});
    const double d_12 = s.dl_coeff(HalfInt{1});
    const double dr_m32 = s.dr_coeff(HalfInt{-3});
    const double t = s.tplus_coeff(HalfInt{-3});
    const double e0 = om * om * de / chi / (de - chi * d_m32);
    const double e1 = om * om * de / chi / (de - chi * d_12 - chi * chi * t * t / (de - chi * dr_m32));

    Eigen::MatrixXd hd = *h.dense;
    REQUIRE(hd(0, 0) == Catch::Approx(e0).epsilon(1e-12));
    REQUIRE(hd(1, 1) == Catch::Approx(e1).epsilon(1e-12));
    REQUIRE(std::abs(hd(0, 1)) < 1e-14);
}

TEST_CASE("zero drives give the zero operator") {
    LevelScheme s(HalfInt{3});
    auto basis = quench_basis(s, 4);
    auto h = build_heff_exact(s, basis, DriveParams{}, 1.0);
    REQUIRE(h.to_dense().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("resonant dressed denominator is rejected with the offending state") {
    LevelScheme s(HalfInt{3});
    auto basis = std::make_shared<FockBasis>(ModeSet{s.leg_modes(Sector::Lower)}, 1);
    DriveParams drives;
    drives.omega_a = 0.05;
    drives.delta_a = 0.4;  // equals chi * dr_coeff at N = 1
    REQUIRE_THROWS_AS(build_heff_exact(s, basis, drives, 1.0), ResonanceError);
    try {
        build_heff_exact(s, basis, drives, 1.0);
    } catch (const ResonanceError& e) {
        REQUIRE(std::string(e.what()).find("n(") != std::string::npos);
    }
}

TEST_CASE("exact Hamiltonian is Hermitian and conserves both leg numbers") {
    LevelScheme s(HalfInt{5});
    auto basis = quench_basis(s, 6);
    DriveParams drives;
    drives.omega_a = drives.omega_b = 0.05;
    drives.delta_a = -3.0;
    drives.delta_b = 4.0;
    auto h = build_heff_exact(s, basis, drives, 1.0);
    Eigen::MatrixXd hd = *h.dense;
    REQUIRE((hd - hd.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    for (Sector leg : {Sector::Upper, Sector::Lower}) {
        auto sec = basis->sector(leg);
        auto n_leg = embed(diagonal_operator(sec, total_number_weights(*sec)), basis, leg);
        Eigen::MatrixXd nd = Eigen::MatrixXcd(n_leg.mat).real();
        REQUIRE((hd * nd - nd * hd).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("solver-form application agrees with the dense inverse") {
    LevelScheme s(HalfInt{5});
    auto basis = quench_basis(s, 8);
    DriveParams drives;
    drives.omega_a = drives.omega_b = 0.05;
    drives.delta_a = -3.0;
    drives.delta_b = 4.0;
    auto dense = build_heff_exact(s, basis, drives, 1.0);
    HeffOptions solver_opts;
    solver_opts.force_solver = true;
    auto solver = build_heff_exact(s, basis, drives, 1.0, solver_opts);
    REQUIRE(!solver.has_dense());

    std::mt19937 rng(42);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXcd x(basis->dim());
        for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = std::complex<double>(g(rng), g(rng));
        x.normalize();
        REQUIRE((dense.apply(x) - solver.apply(x)).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("exact approaches perturbative with a cubic residual in chiN/Delta") {
    LevelScheme s(HalfInt{3});
    auto basis = quench_basis(s, 4);
    std::vector<double> deltas{5.0, 10.0, 20.0, 40.0};
    std::vector<double> lg_delta, lg_res;
    for (double de : deltas) {
        DriveParams drives;
        drives.omega_b = 0.05;
        drives.delta_b = de;
        auto ex = build_heff_exact(s, basis, drives, 1.0);
        auto pert = build_heff_perturbative(s, basis, drives, 1.0);
        Eigen::MatrixXd diff = ex.to_dense() - pert.to_dense() -
                               ex.cnumber() * Eigen::MatrixXd::Identity(basis->dim(), basis->dim());
        lg_delta.push_back(std::log(de));
        lg_res.push_back(std::log(diff.norm()));
    }
    // least-squares slope of log residual vs log Delta
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(deltas.size());
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        sx += lg_delta[i];
        sy += lg_res[i];
        sxx += lg_delta[i] * lg_delta[i];
        sxy += lg_delta[i] * lg_res[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    REQUIRE(slope == Catch::Approx(-3.0).margin(0.15));
}

TEST_CASE("single-drive large detuning is Stark dominated") {
    LevelScheme s(HalfInt{3});
    auto basis = quench_basis(s, 4);
    DriveParams drives;
    drives.omega_a = 0.05;
    drives.delta_a = 200.0;
    auto ex = build_heff_exact(s, basis, drives, 1.0);
    auto ops = ladder::build_ladder_operators(s, std::static_pointer_cast<const Basis>(basis));
    Eigen::MatrixXd stark =
        (drives.omega_a * drives.omega_a / drives.delta_a) * Eigen::MatrixXcd(ops.d_left.mat).real();
    Eigen::MatrixXd rest = ex.to_dense() - ex.cnumber() * Eigen::MatrixXd::Identity(basis->dim(), basis->dim());
    REQUIRE((rest - stark).norm() / stark.norm() < 0.02);
}

TEST_CASE("perturbative T+T- term couples the one-pair state") {
    LevelScheme s(HalfInt{3});
    auto basis = quench_basis(s, 2);  // one atom per leg
    auto ops = ladder::build_ladder_operators(s, std::static_pointer_cast<const Basis>(basis));
    auto hop = fock::compose(ops.t_plus, ops.t_minus);
    auto psi_i = pair_quench_state(s, *basis);
    Eigen::VectorXcd psi_f = product_state(*basis, single_mode_state(*basis->upper(), HalfInt{-1}),
                                           single_mode_state(*basis->lower(), HalfInt{1}));
    const std::complex<double> elem = psi_f.dot(hop.mat * psi_i);
    REQUIRE(std::abs(elem) > 1e-3);
    // explicit CG product evaluation
    const double expect = s.tplus_coeff(HalfInt{-3}) * s.tplus_coeff(HalfInt{-1});
    REQUIRE(elem.real() == Catch::Approx(expect).epsilon(1e-12));
}

TEST_CASE("shift-suppression diagnostic") {
    LevelScheme s(HalfInt{3});

    SECTION("antisymmetric drives cancel the shift gap as chiN -> 0") {
        auto basis = quench_basis(s, 6);
        auto psi_i = pair_quench_state(s, *basis);
        double gaps[2];
        int idx = 0;
        for (double chi_n : {1e-2, 1e-4}) {
            DriveParams drives;
            drives.omega_a = drives.omega_b = 0.05 / chi_n;  // fixed absolute Rabi
            drives.delta_a = -2.0 / chi_n;                   // fixed absolute detunings
            drives.delta_b = 2.0 / chi_n;
            auto psi_f = dominant_hop_target(s, basis, psi_i);
            auto d = shift_suppression_diagnostic(s, basis, drives, chi_n, psi_i, psi_f);
            gaps[idx++] = d.shift_gap;
        }
        REQUIRE(gaps[1] / gaps[0] < 0.05);  // gap scales down with chiN
    }
    SECTION("pair-production parameters put correlated hopping in charge") {
        auto basis = quench_basis(s, 20);
        auto psi_i = pair_quench_state(s, *basis);
        DriveParams drives;
        drives.omega_a = drives.omega_b = 0.05;
        drives.delta_a = -4.0;
        drives.delta_b = 5.3;
        auto psi_f = dominant_hop_target(s, basis, psi_i);
        auto d = shift_suppression_diagnostic(s, basis, drives, 1.0, psi_i, psi_f);
        REQUIRE(d.ratio < 1.0);
    }
    SECTION("a single drive is Stark dominated") {
        auto basis = quench_basis(s, 20);
        auto psi_i = pair_quench_state(s, *basis);
        DriveParams drives;
        drives.omega_a = 0.05;
        drives.delta_a = -4.0;
        auto psi_f = dominant_hop_target(s, basis, psi_i);
        auto d = shift_suppression_diagnostic(s, basis, drives, 1.0, psi_i, psi_f);
        REQUIRE(d.ratio > 10.0);
    }
    SECTION("vanishing hop element is a diagnostic error") {
        auto basis = quench_basis(s, 6);
        auto psi_i = pair_quench_state(s, *basis);
        DriveParams drives;
        drives.omega_a = drives.omega_b = 0.05;
        drives.delta_a = -4.0;
        drives.delta_b = 5.3;
        // <i|T+T-|i> is diagonal so the i -> i element is nonzero only through
        // the diagonal; use the initial state for both slots, which has zero
        // connected hop element after the projector inside dominant_hop_target,
        // but a nonzero diagonal one; instead test the orthogonal empty pair.
        Eigen::VectorXcd psi_f = product_state(*basis, single_mode_state(*basis->upper(), HalfInt{-1}),
                                               single_mode_state(*basis->lower(), HalfInt{-3}));
        REQUIRE_THROWS_AS(shift_suppression_diagnostic(s, basis, drives, 1.0, psi_i, psi_f), DiagnosticError);
    }
}
