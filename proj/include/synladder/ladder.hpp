// ladder.hpp — Synthetic two-leg ladder geometry over a ground manifold and the
// collective operators D_L, D_R, T+, T- in their Schwinger-boson form

#pragma once

#include <memory>
#include <optional>

#include "synladder/angular.hpp"
#include "synladder/fock.hpp"

namespace synladder::ladder {

using fock::Basis;
using fock::FockBasis;
using fock::Index;
using fock::ProductBasis;
using fock::Sector;
using fock::SectorBasis;
using fock::SparseOperator;

// Ground-manifold level scheme for a half-integer hyperfine spin F with
// F_g = F_e = F. The Delta-m = +2 hops split the 2F+1 sublevels into two legs:
// upper {-F+1, -F+3, ..., F}, lower {-F, -F+2, ..., F-1}.
struct LevelScheme {
    HalfInt f;
    angular::CGTable cg;

    explicit LevelScheme(HalfInt spin) : f(spin), cg(angular::build_cg_table(spin, spin)) {
        if (spin.twice < 0) throw DomainError("hyperfine spin must be nonnegative");
        if (spin.is_integer())
            throw DomainError("integer F=" + spin.str() + " does not form a two-leg ladder; F must be a half-integer");
    }

    int level_count() const { return f.twice + 1; }
    double norm_factor() const {  // N_F = 2F(F+1)
        const double fv = f.value();
        return 2.0 * fv * (fv + 1.0);
    }

    std::vector<HalfInt> ground_modes() const {
        std::vector<HalfInt> ms;
        for (int t = -f.twice; t <= f.twice; t += 2) ms.push_back(HalfInt{t});
        return ms;
    }
    std::vector<HalfInt> leg_modes(Sector leg) const {
        std::vector<HalfInt> ms;
        const int start = (leg == Sector::Upper) ? -f.twice + 2 : -f.twice;
        for (int t = start; t <= f.twice; t += 4) ms.push_back(HalfInt{t});
        return ms;
    }
    bool on_upper_leg(HalfInt m) const { return ((m.twice + f.twice) / 2) % 2 == 1; }

    // Synthetic site coordinate: lower-leg m -> (m+F)/2, upper-leg m -> (m-F)/2,
    // so the g_{-F} and g_{F} quench modes both sit at r = 0 and labels grow to
    // the right along the hop direction.
    int site_coordinate(HalfInt m) const {
        if (std::abs(m.twice) > f.twice || ((m.twice ^ f.twice) & 1))
            throw DomainError("mode " + m.str() + " is not a ground mode of F=" + f.str());
        return on_upper_leg(m) ? (m.twice - f.twice) / 4 : (m.twice + f.twice) / 4;
    }
    // inverse map; r > 0 reads from the lower leg, r < 0 from the upper leg,
    // r = 0 is the lower-leg origin (upper-leg origin labelled 0*).
    HalfInt mode_at_site(int r) const {
        const int tm = (r >= 0) ? 4 * r - f.twice : 4 * r + f.twice;
        if (std::abs(tm) > f.twice) throw DomainError("site index out of range");
        return HalfInt{tm};
    }

    // Schwinger-boson coefficients of Eq-style collective operators:
    //   D_L = sum_m (C_m^{-1})^2 n_m,  D_R = sum_m (C_m^{+1})^2 n_m,
    //   T+  = sum_m C_m^{+1} C_{m+2}^{-1} adag_{m+2} a_m
    double dl_coeff(HalfInt m) const {
        const double c = cg.minus1(m);
        return c * c;
    }
    double dr_coeff(HalfInt m) const {
        const double c = cg.plus1(m);
        return c * c;
    }
    double tplus_coeff(HalfInt m) const { return cg.plus1(m) * cg.minus1(m + HalfInt{4}); }
};

struct LadderOperators {
    std::shared_ptr<const Basis> basis;
    SparseOperator d_left;   // real diagonal, entries >= 0
    SparseOperator d_right;  // real diagonal, entries >= 0
    SparseOperator t_plus;
    SparseOperator t_minus;  // (t_plus)^dagger
};

namespace detail {

inline void accumulate_sector_ops(const LevelScheme& scheme, const std::shared_ptr<const FockBasis>& basis,
                                  SparseOperator& dl, SparseOperator& dr, SparseOperator& tp) {
    for (HalfInt m : basis->modes().labels) {
        if (std::abs(m.twice) > scheme.f.twice || ((m.twice ^ scheme.f.twice) & 1))
            throw DomainError("basis mode " + m.str() + " is not a ground mode of F=" + scheme.f.str());
        const auto n_m = fock::build_bilinear(basis, m, m);
        dl = fock::add(dl, fock::scale(n_m, scheme.dl_coeff(m)));
        dr = fock::add(dr, fock::scale(n_m, scheme.dr_coeff(m)));
        const HalfInt m2 = m + HalfInt{4};
        if (basis->modes().find(m2) >= 0) {
            const double c = scheme.tplus_coeff(m);
            if (c != 0.0) tp = fock::add(tp, fock::build_bilinear(basis, m2, m, c));
        }
    }
}

}  // namespace detail

// Builds the collective operators on a single-sector or two-sector basis
// (sums embedded across both sectors in the product case).
inline LadderOperators build_ladder_operators(const LevelScheme& scheme, const std::shared_ptr<const Basis>& basis) {
    LadderOperators ops;
    ops.basis = basis;
    if (auto fb = std::dynamic_pointer_cast<const FockBasis>(basis)) {
        SparseOperator dl = fock::zero_operator(fb), dr = fock::zero_operator(fb), tp = fock::zero_operator(fb);
        detail::accumulate_sector_ops(scheme, fb, dl, dr, tp);
        ops.d_left = std::move(dl);
        ops.d_right = std::move(dr);
        ops.t_plus = std::move(tp);
    } else if (auto pb = std::dynamic_pointer_cast<const ProductBasis>(basis)) {
        SparseOperator dl = fock::zero_operator(pb), dr = fock::zero_operator(pb), tp = fock::zero_operator(pb);
        for (Sector s : {Sector::Upper, Sector::Lower}) {
            const auto& sec = pb->sector(s);
            SparseOperator sdl = fock::zero_operator(sec), sdr = fock::zero_operator(sec),
                           stp = fock::zero_operator(sec);
            detail::accumulate_sector_ops(scheme, sec, sdl, sdr, stp);
            dl = fock::add(dl, fock::embed(sdl, pb, s));
            dr = fock::add(dr, fock::embed(sdr, pb, s));
            tp = fock::add(tp, fock::embed(stp, pb, s));
        }
        ops.d_left = std::move(dl);
        ops.d_right = std::move(dr);
        ops.t_plus = std::move(tp);
    } else {
        throw DomainError("build_ladder_operators: basis must be a FockBasis or ProductBasis");
    }
    ops.d_left.hermitian = ops.d_right.hermitian = true;
    ops.t_minus = fock::adjoint(ops.t_plus);
    return ops;
}

// ---------------------------------------------------------------------------
// Leg populations
// ---------------------------------------------------------------------------

// Sum of <n_m> over each leg; requires a normalized state.
inline std::pair<double, double> leg_populations(const Eigen::VectorXcd& state, const LevelScheme& scheme,
                                                 const Basis& basis) {
    if (std::abs(state.norm() - 1.0) > 1e-8) throw DomainError("leg_populations: state is not normalized");
    double up = 0.0, low = 0.0;
    for (int mi = 0; mi < basis.mode_count(); ++mi) {
        const HalfInt m = basis.mode_label(mi);
        double pop = 0.0;
        for (Index s = 0; s < basis.dim(); ++s) pop += std::norm(state[s]) * basis.occupation(s, mi);
        (scheme.on_upper_leg(m) ? up : low) += pop;
    }
    return {up, low};
}

// Total J_z weight vector (twice-values), used for invariant-sector restriction
// of quench dynamics: H_eff commutes with J_z = sum_m m n_m.
inline std::vector<int> jz_twice_weights(const Basis& basis) {
    std::vector<int> w(static_cast<std::size_t>(basis.mode_count()));
    for (int mi = 0; mi < basis.mode_count(); ++mi) w[static_cast<std::size_t>(mi)] = basis.mode_label(mi).twice;
    return w;
}

// If every occupied basis state of `state` shares one total J_z, return it.
inline std::optional<int> definite_jz_twice(const Eigen::VectorXcd& state, const Basis& basis, double amp_tol = 1e-14) {
    const auto w = jz_twice_weights(basis);
    std::optional<int> jz;
    for (Index s = 0; s < basis.dim(); ++s) {
        if (std::abs(state[s]) <= amp_tol) continue;
        long tot = 0;
        for (int mi = 0; mi < basis.mode_count(); ++mi)
            tot += static_cast<long>(w[static_cast<std::size_t>(mi)]) * basis.occupation(s, mi);
        if (!jz) {
            jz = static_cast<int>(tot);
        } else if (*jz != tot) {
            return std::nullopt;
        }
    }
    return jz;
}

}  // namespace synladder::ladder
