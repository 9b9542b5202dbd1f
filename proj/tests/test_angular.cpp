// Clebsch-Gordan evaluation against the ladder-operator recursion and the
// closed-form spin-F identities.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "synladder/angular.hpp"

using namespace synladder;
using namespace synladder::angular;

namespace {

// Independent oracle: build the coupled states |J,M> of j1 (x) j2=1 by lowering
// from the stretched state and Gram-Schmidt within each M subspace, with the
// Condon-Shortley phase fixed by a positive coefficient on the largest m1.
struct RecursionOracle {
    HalfInt j1;
    // product-basis vectors indexed by (m1 slot, p slot)
    int n1;
    std::map<std::pair<int, int>, std::map<std::pair<int, int>, double>> cg;  // (2J, 2M) -> {(2m1, p) -> coeff}

    explicit RecursionOracle(HalfInt spin) : j1(spin), n1(spin.twice + 1) {
        using Vec = std::vector<double>;
        auto idx = [&](int tm1, int p) { return ((tm1 + j1.twice) / 2) * 3 + (p + 1); };
        auto lower = [&](const Vec& v) {
            Vec out(static_cast<std::size_t>(n1 * 3), 0.0);
            for (int tm1 = -j1.twice; tm1 <= j1.twice; tm1 += 2) {
                for (int p = -1; p <= 1; ++p) {
                    const double a = v[static_cast<std::size_t>(idx(tm1, p))];
                    if (a == 0.0) continue;
                    const double m1 = 0.5 * tm1;
                    const double jj = 0.5 * j1.twice;
                    if (tm1 - 2 >= -j1.twice)
                        out[static_cast<std::size_t>(idx(tm1 - 2, p))] += a * std::sqrt(jj * (jj + 1) - m1 * (m1 - 1));
                    if (p - 1 >= -1) out[static_cast<std::size_t>(idx(tm1, p - 1))] += a * std::sqrt(2.0 - p * (p - 1));
                }
            }
            return out;
        };
        auto dot = [&](const Vec& a, const Vec& b) {
            double s = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
            return s;
        };

        std::map<int, std::vector<std::pair<int, Vec>>> by_m;  // 2M -> [(2J, vec)]
        // stretched state J = j1 + 1
        {
            Vec top(static_cast<std::size_t>(n1 * 3), 0.0);
            top[static_cast<std::size_t>(idx(j1.twice, 1))] = 1.0;
            int tJ = j1.twice + 2;
            Vec cur = top;
            for (int tM = tJ; tM >= -tJ; tM -= 2) {
                by_m[tM].push_back({tJ, cur});
                if (tM > -tJ) {
                    const double J = 0.5 * tJ, M = 0.5 * tM;
                    Vec low = lower(cur);
                    const double nrm = std::sqrt(J * (J + 1) - M * (M - 1));
                    for (auto& x : low) x /= nrm;
                    cur = low;
                }
            }
        }
        // lower multiplets J = j1, j1 - 1
        for (int tJ = j1.twice; tJ >= j1.twice - 2 && tJ >= 0; tJ -= 2) {
            Vec seed(static_cast<std::size_t>(n1 * 3), 0.0);
            // span of M = J subspace: components (m1, p) with m1 + p = J
            for (int p = -1; p <= 1; ++p) {
                const int tm1 = tJ - 2 * p;
                if (std::abs(tm1) <= j1.twice) seed[static_cast<std::size_t>(idx(tm1, p))] = 1.0;
            }
            for (const auto& [tJp, v] : by_m[tJ]) {
                (void)tJp;
                const double ov = dot(seed, v);
                for (std::size_t i = 0; i < seed.size(); ++i) seed[i] -= ov * v[i];
            }
            double nrm = std::sqrt(dot(seed, seed));
            REQUIRE(nrm > 1e-12);
            for (auto& x : seed) x /= nrm;
            // Condon-Shortley: positive coefficient on the largest contributing m1
            for (int tm1 = j1.twice; tm1 >= -j1.twice; tm1 -= 2) {
                const int p = (tJ - tm1) / 2;
                if (p < -1 || p > 1) continue;
                const double c = seed[static_cast<std::size_t>(idx(tm1, p))];
                if (std::abs(c) > 1e-12) {
                    if (c < 0)
                        for (auto& x : seed) x = -x;
                    break;
                }
            }
            Vec cur = seed;
            for (int tM = tJ; tM >= -tJ; tM -= 2) {
                by_m[tM].push_back({tJ, cur});
                if (tM > -tJ) {
                    const double J = 0.5 * tJ, M = 0.5 * tM;
                    Vec low = lower(cur);
                    const double nrm2 = std::sqrt(J * (J + 1) - M * (M - 1));
                    for (auto& x : low) x /= nrm2;
                    cur = low;
                }
            }
        }
        for (const auto& [tM, states] : by_m) {
            for (const auto& [tJ, v] : states) {
                for (int tm1 = -j1.twice; tm1 <= j1.twice; tm1 += 2)
                    for (int p = -1; p <= 1; ++p) {
                        const double c = v[static_cast<std::size_t>(idx(tm1, p))];
                        if (std::abs(c) > 1e-14) cg[{tJ, tM}][{tm1, p}] = c;
                    }
            }
        }
    }

    double operator()(HalfInt m, int p, HalfInt fe) const {
        auto it = cg.find({fe.twice, m.twice + 2 * p});
        if (it == cg.end()) return 0.0;
        auto jt = it->second.find({m.twice, p});
        return jt == it->second.end() ? 0.0 : jt->second;
    }
};

double eq3_minus_sq(double f, double m) { return (f + m) * (f - m + 1.0) / (2.0 * f * (f + 1.0)); }

}  // namespace

TEST_CASE("compute_cg basic values and selection rules") {
    // F_e = F_g + 1 channel is allowed and finite
    REQUIRE(std::abs(compute_cg(HalfInt{3}, HalfInt{3}, -1, HalfInt{5})) > 0.0);
    // m + p beyond F_e is an exact zero
    REQUIRE(compute_cg(HalfInt{3}, HalfInt{3}, +1, HalfInt{3}) == 0.0);
    // (C_{3/2}^{-1})^2 = 0.4 for F = 3/2 from the spin-operator identity
    const double c = compute_cg(HalfInt{3}, HalfInt{3}, -1, HalfInt{3});
    REQUIRE(c * c == Catch::Approx(0.4).epsilon(1e-12));
    // lowering from the bottom state annihilates
    REQUIRE(compute_cg(HalfInt{9}, HalfInt{-9}, -1, HalfInt{9}) == 0.0);
}

TEST_CASE("compute_cg rejects invalid spins") {
    REQUIRE_THROWS_AS(compute_cg(HalfInt{-3}, HalfInt{1}, 0, HalfInt{3}), DomainError);
    REQUIRE_THROWS_AS(compute_cg(HalfInt{3}, HalfInt{2}, 0, HalfInt{3}), DomainError);  // m not a step of F
    REQUIRE_THROWS_AS(compute_cg(HalfInt{3}, HalfInt{3}, 2, HalfInt{3}), DomainError);
}

TEST_CASE("build_cg_table contents") {
    SECTION("F=3/2: p=-1 nonzeros counted by brute force") {
        auto t = build_cg_table(HalfInt{3}, HalfInt{3});
        int nonzero = 0;
        for (int tm = -3; tm <= 3; tm += 2)
            if (t.minus1(HalfInt{tm}) != 0.0) ++nonzero;
        int expected = 0;
        for (int tm = -3; tm <= 3; tm += 2)
            if (compute_cg(HalfInt{3}, HalfInt{tm}, -1, HalfInt{3}) != 0.0) ++expected;
        REQUIRE(nonzero == expected);
        REQUIRE(nonzero == 3);  // m in {-1/2, 1/2, 3/2}; (F+m)(F-m+1) kills m=-3/2
        REQUIRE(t.minus1(HalfInt{-3}) == 0.0);
    }
    SECTION("F=1/2 value from the identity") {
        auto t = build_cg_table(HalfInt{1}, HalfInt{1});
        REQUIRE(t.minus1(HalfInt{1}) * t.minus1(HalfInt{1}) == Catch::Approx(2.0 / 3.0).epsilon(1e-12));
    }
    SECTION("lookup outside the table returns zero") {
        auto t = build_cg_table(HalfInt{3}, HalfInt{3});
        REQUIRE(t(HalfInt{17}, -1) == 0.0);
        REQUIRE(t(HalfInt{-5}, +1) == 0.0);
    }
}

TEST_CASE("spin-F identities for F_g = F_e = F") {
    for (int tf = 1; tf <= 9; tf += 2) {
        const double f = 0.5 * tf;
        auto t = build_cg_table(HalfInt{tf}, HalfInt{tf});
        for (int tm = -tf; tm <= tf; tm += 2) {
            const double m = 0.5 * tm;
            const double lhs = t.minus1(HalfInt{tm}) * t.minus1(HalfInt{tm});
            REQUIRE(std::abs(lhs - eq3_minus_sq(f, m)) < 1e-12);
        }
        // product sign: C_m^{+1} C_{m+2}^{-1} < 0 whenever both factors are nonzero
        for (int tm = -tf; tm <= tf - 4; tm += 2) {
            const double prod = t.plus1(HalfInt{tm}) * t.minus1(HalfInt{tm + 4});
            if (t.plus1(HalfInt{tm}) != 0.0 && t.minus1(HalfInt{tm + 4}) != 0.0) {
                REQUIRE(prod < 0.0);
                const double m = 0.5 * tm;
                const double expect = -std::sqrt((f - m) * (f + m + 1) * (f - m - 1) * (f + m + 2)) /
                                      (2.0 * f * (f + 1.0));
                REQUIRE(std::abs(prod - expect) < 1e-12);
            }
        }
    }
}

TEST_CASE("Racah sum equals the ladder-operator recursion for all F <= 9/2") {
    for (int tf = 1; tf <= 9; tf += 2) {
        RecursionOracle oracle(HalfInt{tf});
        for (int tfe = tf - 2; tfe <= tf + 2; tfe += 2) {
            if (tfe < 0) continue;
            for (int tm = -tf; tm <= tf; tm += 2)
                for (int p = -1; p <= 1; ++p) {
                    const double racah = compute_cg(HalfInt{tf}, HalfInt{tm}, p, HalfInt{tfe});
                    const double rec = oracle(HalfInt{tm}, p, HalfInt{tfe});
                    INFO("F=" << tf << "/2 Fe=" << tfe << "/2 2m=" << tm << " p=" << p);
                    REQUIRE(std::abs(racah - rec) < 1e-12);
                }
        }
    }
}

TEST_CASE("CG columns are orthonormal at fixed total m+p") {
    const HalfInt f{5};
    for (int tM = -f.twice - 2; tM <= f.twice + 2; tM += 2) {
        for (int tJ = f.twice - 2; tJ <= f.twice + 2; tJ += 2) {
            for (int tJ2 = tJ; tJ2 <= f.twice + 2; tJ2 += 2) {
                if (std::abs(tM) > tJ || std::abs(tM) > tJ2) continue;
                double s = 0.0;
                for (int p = -1; p <= 1; ++p) {
                    const int tm = tM - 2 * p;
                    if (std::abs(tm) > f.twice) continue;
                    s += compute_cg(f, HalfInt{tm}, p, HalfInt{tJ}) * compute_cg(f, HalfInt{tm}, p, HalfInt{tJ2});
                }
                REQUIRE(std::abs(s - (tJ == tJ2 ? 1.0 : 0.0)) < 1e-12);
            }
        }
    }
}
