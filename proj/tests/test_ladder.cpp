// Ladder geometry, collective operators, and their spin-operator equivalents.

#include <catch2/catch_amalgamated.hpp>

#include <memory>

#include "synladder/ladder.hpp"

using namespace synladder;
using namespace synladder::fock;
using namespace synladder::ladder;

namespace {

std::shared_ptr<const FockBasis> leg_basis(const LevelScheme& s, Sector leg, int n) {
    return std::make_shared<FockBasis>(ModeSet{s.leg_modes(leg)}, n);
}

double max_abs(const SpMat& m) {
    double mx = 0.0;
    for (int k = 0; k < m.outerSize(); ++k)
        for (SpMat::InnerIterator it(m, k); it; ++it) mx = std::max(mx, std::abs(it.value()));
    return mx;
}

}  // namespace

TEST_CASE("level scheme geometry") {
    REQUIRE_THROWS_AS(LevelScheme(HalfInt{4}), DomainError);  // integer F has no two-leg split

    LevelScheme s(HalfInt{9});
    auto up = s.leg_modes(Sector::Upper), low = s.leg_modes(Sector::Lower);
    REQUIRE(up.size() + low.size() == 10);
    for (auto m : up) REQUIRE(s.on_upper_leg(m));
    for (auto m : low) REQUIRE(!s.on_upper_leg(m));
    // legs partition the manifold
    for (auto m : s.ground_modes()) {
        const bool in_up = std::find(up.begin(), up.end(), m) != up.end();
        const bool in_low = std::find(low.begin(), low.end(), m) != low.end();
        REQUIRE(in_up != in_low);
    }

    SECTION("site coordinates match the hop-direction convention") {
        REQUIRE(s.site_coordinate(HalfInt{-9}) == 0);  // lower leg origin
        REQUIRE(s.site_coordinate(HalfInt{3}) == 3);   // lower leg m=3/2
        REQUIRE(s.site_coordinate(HalfInt{9}) == 0);   // upper leg origin (0*)
        REQUIRE(s.site_coordinate(HalfInt{1}) == -2);  // upper leg m=1/2
        REQUIRE(s.mode_at_site(3) == HalfInt{3});
        REQUIRE(s.mode_at_site(-2) == HalfInt{1});
        LevelScheme s32(HalfInt{3});
        REQUIRE(s32.site_coordinate(HalfInt{-3}) == 0);
    }
}

TEST_CASE("collective operators on the 4-level product basis") {
    LevelScheme s(HalfInt{3});
    const int n = 10;
    auto prod = std::make_shared<ProductBasis>(leg_basis(s, Sector::Upper, n / 2), leg_basis(s, Sector::Lower, n / 2));
    auto ops = build_ladder_operators(s, prod);

    SECTION("quench state expectation <D_L> = N/5") {
        auto psi = product_state(*prod, single_mode_state(*prod->upper(), HalfInt{3}),
                                 single_mode_state(*prod->lower(), HalfInt{-3}));
        const double dl = psi.dot(ops.d_left.mat * psi).real();
        REQUIRE(dl == Catch::Approx(n / 5.0).epsilon(1e-12));
    }
    SECTION("D_L coefficient of n_{1/2} is 8/15") {
        REQUIRE(s.dl_coeff(HalfInt{1}) == Catch::Approx(8.0 / 15.0).epsilon(1e-12));
    }
    SECTION("T- annihilates the lowest-weight lower-leg state") {
        auto low = leg_basis(s, Sector::Lower, 5);
        auto lops = build_ladder_operators(s, std::static_pointer_cast<const Basis>(low));
        auto psi = single_mode_state(*low, HalfInt{-3});
        REQUIRE((lops.t_minus.mat * psi).norm() == 0.0);
        REQUIRE(std::abs(psi.dot(fock::adjoint(lops.t_minus).mat * (lops.t_minus.mat * psi))) == 0.0);
    }
    SECTION("T+ annihilates the all-top state") {
        auto psi = product_state(*prod, single_mode_state(*prod->upper(), HalfInt{3}),
                                 single_mode_state(*prod->lower(), HalfInt{1}));
        REQUIRE((ops.t_plus.mat * psi).norm() < 1e-14);
    }
    SECTION("T+ commutes with both leg number operators") {
        for (Sector leg : {Sector::Upper, Sector::Lower}) {
            auto sec = prod->sector(leg);
            auto n_leg = embed(diagonal_operator(sec, total_number_weights(*sec)), prod, leg);
            SpMat comm = ops.t_plus.mat * n_leg.mat - n_leg.mat * ops.t_plus.mat;
            REQUIRE(max_abs(comm) < 1e-12);
        }
    }
    SECTION("D_L + D_R and D_L - D_R operator identities") {
        const double nf = s.norm_factor();
        SparseOperator sum_expect = zero_operator(prod), diff_expect = zero_operator(prod);
        for (int mi = 0; mi < prod->mode_count(); ++mi) {
            const HalfInt m = prod->mode_label(mi);
            const double f = s.f.value(), mv = m.value();
            auto n_m = diagonal_operator(prod, occupation_weights(*prod, mi));
            sum_expect = add(sum_expect, scale(n_m, 2.0 * (f * (f + 1) - mv * mv) / nf));
            diff_expect = add(diff_expect, scale(n_m, 2.0 * mv / nf));
        }
        REQUIRE(max_abs((add(ops.d_left, ops.d_right).mat - sum_expect.mat).pruned()) < 1e-12);
        REQUIRE(max_abs((add(ops.d_left, scale(ops.d_right, -1.0)).mat - diff_expect.mat).pruned()) < 1e-12);
    }
}

TEST_CASE("single-atom operators equal the spin-matrix forms for F <= 9/2") {
    for (int tf : {3, 5, 9}) {
        LevelScheme s(HalfInt{tf});
        auto basis = std::make_shared<FockBasis>(ModeSet{s.ground_modes()}, 1);
        auto ops = build_ladder_operators(s, std::static_pointer_cast<const Basis>(basis));
        const int d = tf + 1;
        const double f = 0.5 * tf;
        // S+ in the ascending-m mode order that the one-particle basis uses
        Eigen::MatrixXd sp = Eigen::MatrixXd::Zero(d, d);
        for (int k = 0; k + 1 < d; ++k) {
            const double m = -f + k;
            sp(k + 1, k) = std::sqrt(f * (f + 1) - m * (m + 1));
        }
        Eigen::MatrixXd sm = sp.transpose();
        const double nf = s.norm_factor();
        Eigen::MatrixXd dl = sp * sm / nf, dr = sm * sp / nf, tp = -sp * sp / nf;

        REQUIRE((Eigen::MatrixXcd(ops.d_left.mat).real() - dl).cwiseAbs().maxCoeff() < 1e-12);
        REQUIRE((Eigen::MatrixXcd(ops.d_right.mat).real() - dr).cwiseAbs().maxCoeff() < 1e-12);
        REQUIRE((Eigen::MatrixXcd(ops.t_plus.mat).real() - tp).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("leg populations") {
    LevelScheme s(HalfInt{3});
    auto prod = std::make_shared<ProductBasis>(leg_basis(s, Sector::Upper, 5), leg_basis(s, Sector::Lower, 5));

    auto psi = product_state(*prod, single_mode_state(*prod->upper(), HalfInt{3}),
                             single_mode_state(*prod->lower(), HalfInt{-3}));
    auto [up, low] = leg_populations(psi, s, *prod);
    REQUIRE(up == Catch::Approx(5.0).margin(1e-10));
    REQUIRE(low == Catch::Approx(5.0).margin(1e-10));

    SECTION("single particle spread over one leg") {
        auto upb = leg_basis(s, Sector::Upper, 1);
        auto single = std::make_shared<ProductBasis>(upb, std::make_shared<FockBasis>(ModeSet{s.leg_modes(Sector::Lower)}, 0));
        Eigen::VectorXcd u(upb->dim());
        u.setConstant(1.0 / std::sqrt(static_cast<double>(upb->dim())));
        auto v = product_state(*single, u, Eigen::VectorXcd::Ones(1));
        auto [u2, l2] = leg_populations(v, s, *single);
        REQUIRE(u2 == Catch::Approx(1.0).margin(1e-10));
        REQUIRE(l2 == Catch::Approx(0.0).margin(1e-10));
    }
    SECTION("unnormalized state rejected") {
        Eigen::VectorXcd bad = 2.0 * psi;
        REQUIRE_THROWS_AS(leg_populations(bad, s, *prod), DomainError);
    }
}
