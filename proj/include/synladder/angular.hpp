// angular.hpp — Clebsch-Gordan coefficients C^p_m = <F_g,m;1,p|F_e,m+p> and tables

#pragma once

#include <array>
#include <cmath>
#include <map>
#include <utility>

#include "synladder/core.hpp"

namespace synladder::angular {

namespace detail {

// Factorials as doubles. Arguments stay small (<= 2F_g + 2F_e + 3), far below
// the double-exactness limit at 22!.
inline double factorial(int n) {
    static const auto table = [] {
        std::array<double, 64> t{};
        t[0] = 1.0;
        for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * static_cast<double>(i);
        return t;
    }();
    return table.at(static_cast<std::size_t>(n));
}

inline void check_spin(HalfInt f, const char* name) {
    if (f.twice < 0) throw DomainError(std::string(name) + " must be a nonnegative half-integer, got " + f.str());
}

}  // namespace detail

// General Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M> (Condon-Shortley),
// evaluated with the Racah closed-form sum. Selection-rule zeros short-circuit
// to exactly 0 before any floating-point summation.
inline double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M) {
    detail::check_spin(j1, "j1");
    detail::check_spin(j2, "j2");
    detail::check_spin(J, "J");
    if ((m1.twice & 1) != (j1.twice & 1)) throw DomainError("m1 is not a magnetic number of j1");
    if ((m2.twice & 1) != (j2.twice & 1)) throw DomainError("m2 is not a magnetic number of j2");

    if (m1 + m2 != M) return 0.0;
    if (std::abs(m1.twice) > j1.twice || std::abs(m2.twice) > j2.twice || std::abs(M.twice) > J.twice) return 0.0;
    // triangle rule and integer perimeter
    if (J.twice > j1.twice + j2.twice || J.twice < std::abs(j1.twice - j2.twice)) return 0.0;
    if ((j1.twice + j2.twice + J.twice) % 2 != 0) return 0.0;
    if ((M.twice & 1) != (J.twice & 1)) return 0.0;

    // all the following combinations are integers
    const int a = (j1.twice + j2.twice - J.twice) / 2;
    const int b = (j1.twice - j2.twice + J.twice) / 2;
    const int c = (-j1.twice + j2.twice + J.twice) / 2;
    const int j1pm1 = (j1.twice + m1.twice) / 2;
    const int j1mm1 = (j1.twice - m1.twice) / 2;
    const int j2pm2 = (j2.twice + m2.twice) / 2;
    const int j2mm2 = (j2.twice - m2.twice) / 2;
    const int JpM = (J.twice + M.twice) / 2;
    const int JmM = (J.twice - M.twice) / 2;

    using detail::factorial;
    const double norm = (J.twice + 1.0) * factorial(a) * factorial(b) * factorial(c) /
                        factorial((j1.twice + j2.twice + J.twice) / 2 + 1) * factorial(JpM) * factorial(JmM) *
                        factorial(j1pm1) * factorial(j1mm1) * factorial(j2pm2) * factorial(j2mm2);

    const int k_min = std::max({0, (j2.twice - J.twice - m1.twice) / 2, (j1.twice - J.twice + m2.twice) / 2});
    const int k_max = std::min({a, j1mm1, j2pm2});
    double sum = 0.0;
    for (int k = k_min; k <= k_max; ++k) {
        const double den = factorial(k) * factorial(a - k) * factorial(j1mm1 - k) * factorial(j2pm2 - k) *
                           factorial((J.twice - j2.twice + m1.twice) / 2 + k) *
                           factorial((J.twice - j1.twice - m2.twice) / 2 + k);
        sum += ((k % 2 == 0) ? 1.0 : -1.0) / den;
    }
    return std::sqrt(norm) * sum;
}

// C^p_m for a dipole (j2 = 1) coupling between a ground manifold F_g and an
// excited manifold F_e.
inline double compute_cg(HalfInt f_g, HalfInt m, int p, HalfInt f_e) {
    if (p < -1 || p > 1) throw DomainError("polarization p must be in {-1,0,+1}");
    return clebsch_gordan(f_g, m, HalfInt::from_int(1), HalfInt::from_int(p), f_e, m + p);
}

// Table of C^p_m over all magnetic numbers of F_g and p in {-1,0,+1}.
// Lookups outside the stored range return 0.
struct CGTable {
    HalfInt f_g;
    HalfInt f_e;
    std::map<std::pair<int, int>, double> entries;  // key (2m, p)

    double operator()(HalfInt m, int p) const {
        auto it = entries.find({m.twice, p});
        return it == entries.end() ? 0.0 : it->second;
    }
    double minus1(HalfInt m) const { return (*this)(m, -1); }
    double plus1(HalfInt m) const { return (*this)(m, +1); }
};

inline CGTable build_cg_table(HalfInt f_g, HalfInt f_e) {
    detail::check_spin(f_g, "F_g");
    detail::check_spin(f_e, "F_e");
    CGTable t{f_g, f_e, {}};
    for (int tm = -f_g.twice; tm <= f_g.twice; tm += 2) {
        for (int p = -1; p <= 1; ++p) {
            t.entries[{tm, p}] = compute_cg(f_g, HalfInt{tm}, p, f_e);
        }
    }
    return t;
}

}  // namespace synladder::angular
