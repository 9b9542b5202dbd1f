// fss.hpp — Finite-size scaling: data collapse of order-parameter curves
// n(N, x) = N^{-beta/nu} f((x - x_c) N^{1/nu}) and exponent optimization

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <vector>

#include "synladder/core.hpp"

namespace synladder::dynamics {

struct CollapseInput {
    std::vector<int> sizes;            // system sizes N_i (>= 3)
    std::vector<double> x;             // common control-parameter grid
    std::vector<Eigen::VectorXd> y;    // y[i][j] = order parameter at (N_i, x_j)
    double x_c{0.0};                   // critical point (held fixed)
};

// Sum of squared deviations between each rescaled curve and the linear
// interpolant of every other curve, over the overlapping rescaled range,
// normalized by the number of contributing pairs.
inline double collapse_residual(const CollapseInput& in, double beta, double nu) {
    const std::size_t n_curves = in.sizes.size();
    if (n_curves < 3) throw CollapseError("data collapse needs at least 3 system sizes");
    if (nu == 0.0) throw CollapseError("nu must be nonzero");
    std::vector<std::vector<double>> xs(n_curves);
    std::vector<std::vector<double>> ys(n_curves);
    for (std::size_t i = 0; i < n_curves; ++i) {
        const double n = static_cast<double>(in.sizes[i]);
        const double sx = std::pow(n, 1.0 / nu), sy = std::pow(n, beta / nu);
        for (std::size_t j = 0; j < in.x.size(); ++j) {
            xs[i].push_back((in.x[j] - in.x_c) * sx);
            ys[i].push_back(in.y[i][static_cast<Eigen::Index>(j)] * sy);
        }
    }
    // overlap of rescaled ranges
    double lo = -1e300, hi = 1e300;
    for (std::size_t i = 0; i < n_curves; ++i) {
        lo = std::max(lo, *std::min_element(xs[i].begin(), xs[i].end()));
        hi = std::min(hi, *std::max_element(xs[i].begin(), xs[i].end()));
    }
    if (!(lo < hi)) throw CollapseError("rescaled curves do not overlap");

    auto interp = [](const std::vector<double>& gx, const std::vector<double>& gy, double x) {
        auto it = std::lower_bound(gx.begin(), gx.end(), x);
        if (it == gx.begin()) return gy.front();
        if (it == gx.end()) return gy.back();
        const std::size_t k = static_cast<std::size_t>(it - gx.begin());
        const double f = (x - gx[k - 1]) / (gx[k] - gx[k - 1]);
        return gy[k - 1] + f * (gy[k] - gy[k - 1]);
    };

    double acc = 0.0;
    long count = 0;
    for (std::size_t i = 0; i < n_curves; ++i) {
        for (std::size_t j = 0; j < n_curves; ++j) {
            if (i == j) continue;
            for (std::size_t k = 0; k < xs[i].size(); ++k) {
                const double x = xs[i][k];
                if (x < lo || x > hi) continue;
                const double d = ys[i][k] - interp(xs[j], ys[j], x);
                acc += d * d;
                ++count;
            }
        }
    }
    if (count == 0) throw CollapseError("no points in the overlapping rescaled range");
    return acc / static_cast<double>(count);
}

struct CollapseFit {
    double beta{0.0};
    double nu{0.0};
    double residual{0.0};
};

// Coordinate descent over (beta, nu): golden-section line searches alternated
// until the step shrinks below tol.
inline CollapseFit fit_collapse(const CollapseInput& in, double beta0, double nu0, double span = 1.0,
                                double tol = 1e-4, int max_sweeps = 200) {
    auto safe_res = [&](double b, double nv) {
        try {
            return collapse_residual(in, b, nv);
        } catch (const CollapseError&) {
            return 1e300;
        }
    };
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    auto golden = [&](auto&& f, double a, double b) {
        double c = b - gr * (b - a), d = a + gr * (b - a);
        double fc = f(c), fd = f(d);
        while (b - a > tol) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                fd = f(d);
            }
        }
        return 0.5 * (a + b);
    };

    CollapseFit fit{beta0, nu0, safe_res(beta0, nu0)};
    double w = span;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        const double b_new = golden([&](double b) { return safe_res(b, fit.nu); }, fit.beta - w, fit.beta + w);
        const double nu_lo = std::max(0.2, fit.nu - w);
        const double n_new = golden([&](double nv) { return safe_res(b_new, nv); }, nu_lo, fit.nu + w);
        const double moved = std::abs(b_new - fit.beta) + std::abs(n_new - fit.nu);
        fit.beta = b_new;
        fit.nu = n_new;
        fit.residual = safe_res(fit.beta, fit.nu);
        // shrink the search window only once a sweep stops making progress, so
        // a diagonal valley can still be followed in zigzag steps
        if (moved < 0.3 * w) w *= 0.5;
        if (w < tol) break;
    }
    return fit;
}

}  // namespace synladder::dynamics
