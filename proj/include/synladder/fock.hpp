// fock.hpp — Fixed-number bosonic Fock bases, two-sector products, invariant
// sectors, and sparse operators assembled from normal-ordered boson bilinears

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <cstdint>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "synladder/core.hpp"

namespace synladder::fock {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using SpMat = Eigen::SparseMatrix<Complex>;
using Triplet = Eigen::Triplet<Complex>;

constexpr Index kDefaultDimensionCap = 200000;

// Ordered set of mode labels (magnetic quantum numbers), strictly increasing.
struct ModeSet {
    std::vector<HalfInt> labels;

    ModeSet() = default;
    explicit ModeSet(std::vector<HalfInt> ls) : labels(std::move(ls)) {
        for (std::size_t i = 1; i < labels.size(); ++i) {
            if (!(labels[i - 1] < labels[i]))
                throw DomainError("ModeSet labels must be strictly increasing");
        }
    }
    int count() const { return static_cast<int>(labels.size()); }
    int find(HalfInt m) const {
        for (int i = 0; i < count(); ++i)
            if (labels[static_cast<std::size_t>(i)] == m) return i;
        return -1;
    }
    int require(HalfInt m) const {
        int i = find(m);
        if (i < 0) throw DomainError("mode " + m.str() + " not in mode set");
        return i;
    }
};

// ---------------------------------------------------------------------------
// Basis abstraction: anything indexable with per-mode occupations. Concrete
// bases: FockBasis (one sector), ProductBasis (upper x lower), SectorBasis
// (restriction of either to an invariant subspace).
// ---------------------------------------------------------------------------

class Basis {
public:
    virtual ~Basis() = default;
    virtual Index dim() const = 0;
    // flattened mode count (product bases concatenate upper then lower modes)
    virtual int mode_count() const = 0;
    virtual HalfInt mode_label(int flat_mode) const = 0;
    virtual int occupation(Index state, int flat_mode) const = 0;
    virtual std::uint64_t hash() const = 0;
    virtual std::string describe_state(Index state) const = 0;
};

inline bool same_basis(const Basis& a, const Basis& b) { return &a == &b || a.hash() == b.hash(); }

namespace detail {

struct OccHash {
    std::size_t operator()(const std::vector<int>& v) const {
        Fnv1a f;
        for (int x : v) f.feed(x);
        return static_cast<std::size_t>(f.h);
    }
};

inline std::uint64_t binomial_checked(int n, int k, Index cap) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
        if (r > static_cast<std::uint64_t>(cap) * 16) return r;  // already hopeless, avoid overflow
    }
    return r;
}

}  // namespace detail

// One permutation-symmetric sector: `particles` bosons over `modes`.
// States are ordered lexicographically descending in the occupation of the
// first mode (so states[0] puts every particle in modes.labels[0]); this fixed
// ordering makes emitted matrices and files reproducible across runs.
class FockBasis final : public Basis {
public:
    FockBasis(ModeSet modes, int particles, Index dimension_cap = kDefaultDimensionCap)
        : modes_(std::move(modes)), particles_(particles) {
        if (particles < 0) throw DomainError("particle number must be nonnegative");
        if (modes_.count() == 0) throw DomainError("mode set must be nonempty");
        const std::uint64_t d =
            detail::binomial_checked(particles + modes_.count() - 1, modes_.count() - 1, dimension_cap);
        if (d > static_cast<std::uint64_t>(dimension_cap))
            throw ResourceError("Fock basis dimension " + std::to_string(d) + " exceeds cap " +
                                std::to_string(dimension_cap));
        std::vector<int> cur(static_cast<std::size_t>(modes_.count()), 0);
        enumerate(0, particles, cur);
        index_.reserve(states_.size());
        for (std::size_t k = 0; k < states_.size(); ++k) index_[states_[k]] = static_cast<Index>(k);

        Fnv1a f;
        f.feed(std::string("fock"));
        for (auto m : modes_.labels) f.feed(m.twice);
        f.feed(particles_);
        hash_ = f.h;
    }

    Index dim() const override { return static_cast<Index>(states_.size()); }
    int mode_count() const override { return modes_.count(); }
    HalfInt mode_label(int flat_mode) const override { return modes_.labels.at(static_cast<std::size_t>(flat_mode)); }
    int occupation(Index state, int flat_mode) const override {
        return states_[static_cast<std::size_t>(state)][static_cast<std::size_t>(flat_mode)];
    }
    std::uint64_t hash() const override { return hash_; }
    std::string describe_state(Index state) const override {
        std::ostringstream os;
        os << "|";
        const auto& occ = states_[static_cast<std::size_t>(state)];
        for (int i = 0; i < modes_.count(); ++i) {
            if (i) os << ",";
            os << "n(" << modes_.labels[static_cast<std::size_t>(i)].str() << ")=" << occ[static_cast<std::size_t>(i)];
        }
        os << ">";
        return os.str();
    }

    const ModeSet& modes() const { return modes_; }
    int particles() const { return particles_; }
    const std::vector<int>& state(Index k) const { return states_[static_cast<std::size_t>(k)]; }
    Index index_of(const std::vector<int>& occ) const {
        auto it = index_.find(occ);
        return it == index_.end() ? Index{-1} : it->second;
    }

private:
    void enumerate(int mode, int remaining, std::vector<int>& cur) {
        const int last = modes_.count() - 1;
        if (mode == last) {
            cur[static_cast<std::size_t>(mode)] = remaining;
            states_.push_back(cur);
            return;
        }
        for (int n = remaining; n >= 0; --n) {
            cur[static_cast<std::size_t>(mode)] = n;
            enumerate(mode + 1, remaining - n, cur);
        }
    }

    ModeSet modes_;
    int particles_;
    std::vector<std::vector<int>> states_;
    std::unordered_map<std::vector<int>, Index, detail::OccHash> index_;
    std::uint64_t hash_{0};
};

enum class Sector { Upper, Lower };

// Product of two sectors; composite index = i_upper * lower.dim + i_lower.
// Flattened modes list the upper sector's modes first.
class ProductBasis final : public Basis {
public:
    ProductBasis(std::shared_ptr<const FockBasis> upper, std::shared_ptr<const FockBasis> lower)
        : upper_(std::move(upper)), lower_(std::move(lower)) {
        Fnv1a f;
        f.feed(std::string("product"));
        f.feed(upper_->hash());
        f.feed(lower_->hash());
        hash_ = f.h;
    }

    Index dim() const override { return upper_->dim() * lower_->dim(); }
    int mode_count() const override { return upper_->mode_count() + lower_->mode_count(); }
    HalfInt mode_label(int flat_mode) const override {
        const int nu = upper_->mode_count();
        return flat_mode < nu ? upper_->mode_label(flat_mode) : lower_->mode_label(flat_mode - nu);
    }
    int occupation(Index state, int flat_mode) const override {
        const int nu = upper_->mode_count();
        const Index iu = state / lower_->dim();
        const Index il = state % lower_->dim();
        return flat_mode < nu ? upper_->occupation(iu, flat_mode) : lower_->occupation(il, flat_mode - nu);
    }
    std::uint64_t hash() const override { return hash_; }
    std::string describe_state(Index state) const override {
        return upper_->describe_state(state / lower_->dim()) + " x " + lower_->describe_state(state % lower_->dim());
    }

    const std::shared_ptr<const FockBasis>& upper() const { return upper_; }
    const std::shared_ptr<const FockBasis>& lower() const { return lower_; }
    const std::shared_ptr<const FockBasis>& sector(Sector s) const { return s == Sector::Upper ? upper_ : lower_; }
    Index composite(Index iu, Index il) const { return iu * lower_->dim() + il; }
    // flat index of a sector-local mode
    int flat_mode(Sector s, int local_mode) const {
        return s == Sector::Upper ? local_mode : upper_->mode_count() + local_mode;
    }

private:
    std::shared_ptr<const FockBasis> upper_, lower_;
    std::uint64_t hash_{0};
};

// Restriction of a parent basis to the states where a linear mode weight
// sum_modes w(mode) * n_mode equals a target. Weights are given as twice
// their value so the selection is exact integer arithmetic.
class SectorBasis final : public Basis {
public:
    SectorBasis(std::shared_ptr<const Basis> parent, std::vector<int> twice_weights, int twice_target)
        : parent_(std::move(parent)), twice_weights_(std::move(twice_weights)), twice_target_(twice_target) {
        if (static_cast<int>(twice_weights_.size()) != parent_->mode_count())
            throw DomainError("weight vector length must match parent mode count");
        for (Index s = 0; s < parent_->dim(); ++s) {
            long w = 0;
            for (int m = 0; m < parent_->mode_count(); ++m)
                w += static_cast<long>(twice_weights_[static_cast<std::size_t>(m)]) * parent_->occupation(s, m);
            if (w == twice_target_) kept_.push_back(s);
        }
        if (kept_.empty()) throw DomainError("weight sector is empty");
        parent_to_sub_.reserve(kept_.size());
        for (std::size_t k = 0; k < kept_.size(); ++k) parent_to_sub_[kept_[k]] = static_cast<Index>(k);

        Fnv1a f;
        f.feed(std::string("sector"));
        f.feed(parent_->hash());
        for (int w : twice_weights_) f.feed(w);
        f.feed(twice_target_);
        hash_ = f.h;
    }

    Index dim() const override { return static_cast<Index>(kept_.size()); }
    int mode_count() const override { return parent_->mode_count(); }
    HalfInt mode_label(int flat_mode) const override { return parent_->mode_label(flat_mode); }
    int occupation(Index state, int flat_mode) const override {
        return parent_->occupation(kept_[static_cast<std::size_t>(state)], flat_mode);
    }
    std::uint64_t hash() const override { return hash_; }
    std::string describe_state(Index state) const override {
        return parent_->describe_state(kept_[static_cast<std::size_t>(state)]);
    }

    const std::shared_ptr<const Basis>& parent() const { return parent_; }
    const std::vector<Index>& kept() const { return kept_; }
    Index parent_index(Index sub) const { return kept_[static_cast<std::size_t>(sub)]; }
    Index sub_index(Index parent) const {
        auto it = parent_to_sub_.find(parent);
        return it == parent_to_sub_.end() ? Index{-1} : it->second;
    }

private:
    std::shared_ptr<const Basis> parent_;
    std::vector<int> twice_weights_;
    int twice_target_;
    std::vector<Index> kept_;
    std::unordered_map<Index, Index> parent_to_sub_;
    std::uint64_t hash_{0};
};

// ---------------------------------------------------------------------------
// Sparse operators
// ---------------------------------------------------------------------------

struct SparseOperator {
    std::shared_ptr<const Basis> basis;
    SpMat mat;
    bool hermitian{false};

    Index dim() const { return mat.rows(); }

    double hermiticity_defect() const {
        SpMat d = SpMat(mat.adjoint()) - mat;
        double mx = 0.0;
        for (int k = 0; k < d.outerSize(); ++k)
            for (SpMat::InnerIterator it(d, k); it; ++it) mx = std::max(mx, std::abs(it.value()));
        return mx;
    }
    SparseOperator& mark_hermitian(double tol = 1e-12) {
        hermitian = hermiticity_defect() < tol;
        return *this;
    }

    double max_abs_imag() const {
        double mx = 0.0;
        for (int k = 0; k < mat.outerSize(); ++k)
            for (SpMat::InnerIterator it(mat, k); it; ++it) mx = std::max(mx, std::abs(it.value().imag()));
        return mx;
    }
    Eigen::SparseMatrix<double> real_part() const {
        Eigen::SparseMatrix<double> r(mat.rows(), mat.cols());
        std::vector<Eigen::Triplet<double>> ts;
        ts.reserve(static_cast<std::size_t>(mat.nonZeros()));
        for (int k = 0; k < mat.outerSize(); ++k)
            for (SpMat::InnerIterator it(mat, k); it; ++it)
                ts.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value().real());
        r.setFromTriplets(ts.begin(), ts.end());
        return r;
    }
    Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(mat); }
};

namespace detail {
inline void require_same_basis(const SparseOperator& a, const SparseOperator& b, const char* what) {
    if (!a.basis || !b.basis || !same_basis(*a.basis, *b.basis))
        throw DomainError(std::string("basis mismatch in ") + what);
}
}  // namespace detail

inline SparseOperator make_operator(std::shared_ptr<const Basis> basis, std::vector<Triplet>& triplets,
                                    bool hermitian = false) {
    SparseOperator op;
    op.basis = std::move(basis);
    op.mat = SpMat(op.basis->dim(), op.basis->dim());
    op.mat.setFromTriplets(triplets.begin(), triplets.end());
    op.mat.makeCompressed();
    op.hermitian = hermitian;
    return op;
}

inline SparseOperator zero_operator(std::shared_ptr<const Basis> basis) {
    std::vector<Triplet> none;
    return make_operator(std::move(basis), none, true);
}

inline SparseOperator identity_operator(std::shared_ptr<const Basis> basis) {
    std::vector<Triplet> ts;
    for (Index i = 0; i < basis->dim(); ++i) ts.emplace_back(i, i, Complex{1.0, 0.0});
    return make_operator(std::move(basis), ts, true);
}

// Diagonal operator from per-state weights.
inline SparseOperator diagonal_operator(std::shared_ptr<const Basis> basis, const Eigen::VectorXd& diag) {
    if (diag.size() != basis->dim()) throw DomainError("diagonal length mismatch");
    std::vector<Triplet> ts;
    for (Index i = 0; i < basis->dim(); ++i)
        if (diag[i] != 0.0) ts.emplace_back(i, i, Complex{diag[i], 0.0});
    return make_operator(std::move(basis), ts, true);
}

// weight * adag_{m_dst} a_{m_src} on a single-sector basis, with the standard
// bosonic matrix elements sqrt(n_src) * sqrt(n_dst + 1).
inline SparseOperator build_bilinear(const std::shared_ptr<const FockBasis>& basis, HalfInt m_dst, HalfInt m_src,
                                     Complex weight = Complex{1.0, 0.0}) {
    const int src = basis->modes().require(m_src);
    const int dst = basis->modes().require(m_dst);
    std::vector<Triplet> ts;
    for (Index k = 0; k < basis->dim(); ++k) {
        const auto& occ = basis->state(k);
        const int n_src = occ[static_cast<std::size_t>(src)];
        if (n_src == 0) continue;
        if (src == dst) {
            ts.emplace_back(k, k, weight * static_cast<double>(n_src));
            continue;
        }
        std::vector<int> tgt = occ;
        tgt[static_cast<std::size_t>(src)] -= 1;
        tgt[static_cast<std::size_t>(dst)] += 1;
        const Index kk = basis->index_of(tgt);
        const double amp = std::sqrt(static_cast<double>(n_src)) *
                           std::sqrt(static_cast<double>(occ[static_cast<std::size_t>(dst)] + 1));
        ts.emplace_back(kk, k, weight * amp);
    }
    const bool herm = (src == dst) && weight.imag() == 0.0;
    return make_operator(basis, ts, herm);
}

// op (x) identity (sector == Upper) or identity (x) op (sector == Lower).
inline SparseOperator embed(const SparseOperator& op, const std::shared_ptr<const ProductBasis>& product,
                            Sector sector) {
    const auto& own = product->sector(sector);
    if (!op.basis || !same_basis(*op.basis, *own)) throw DomainError("embed: operator basis does not match sector");
    const Index d_other = (sector == Sector::Upper) ? product->lower()->dim() : product->upper()->dim();
    const Index d_low = product->lower()->dim();
    std::vector<Triplet> ts;
    ts.reserve(static_cast<std::size_t>(op.mat.nonZeros() * d_other));
    for (int k = 0; k < op.mat.outerSize(); ++k) {
        for (SpMat::InnerIterator it(op.mat, k); it; ++it) {
            for (Index j = 0; j < d_other; ++j) {
                const Index row = (sector == Sector::Upper) ? it.row() * d_low + j : j * d_low + it.row();
                const Index col = (sector == Sector::Upper) ? it.col() * d_low + j : j * d_low + it.col();
                ts.emplace_back(row, col, it.value());
            }
        }
    }
    return make_operator(product, ts, op.hermitian);
}

inline SparseOperator compose(const SparseOperator& a, const SparseOperator& b) {
    detail::require_same_basis(a, b, "compose");
    SparseOperator out;
    out.basis = a.basis;
    out.mat = a.mat * b.mat;
    out.mat.prune([](Index, Index, const Complex& v) { return v != Complex{0.0, 0.0}; });
    out.mat.makeCompressed();
    out.hermitian = false;  // conservatively cleared; callers may mark_hermitian()
    return out;
}

inline SparseOperator add(const SparseOperator& a, const SparseOperator& b) {
    detail::require_same_basis(a, b, "add");
    SparseOperator out;
    out.basis = a.basis;
    out.mat = a.mat + b.mat;
    out.mat.makeCompressed();
    out.hermitian = a.hermitian && b.hermitian;
    return out;
}

inline SparseOperator scale(const SparseOperator& a, Complex s) {
    SparseOperator out;
    out.basis = a.basis;
    out.mat = a.mat * s;
    out.hermitian = a.hermitian && s.imag() == 0.0;
    return out;
}

inline SparseOperator adjoint(const SparseOperator& a) {
    SparseOperator out;
    out.basis = a.basis;
    out.mat = a.mat.adjoint();
    out.mat.makeCompressed();
    out.hermitian = a.hermitian;
    return out;
}

// Restrict an operator to a SectorBasis. The subspace must be invariant: any
// coupling between kept and dropped states above `leak_tol` is an error.
inline SparseOperator restrict_operator(const SparseOperator& op, const std::shared_ptr<const SectorBasis>& sector,
                                        double leak_tol = 1e-12) {
    if (!op.basis || !same_basis(*op.basis, *sector->parent()))
        throw DomainError("restrict_operator: operator basis does not match sector parent");
    const Index n = sector->dim();
    std::vector<Triplet> ts;
    for (Index sub_col = 0; sub_col < n; ++sub_col) {
        const Index col = sector->parent_index(sub_col);
        for (SpMat::InnerIterator it(op.mat, static_cast<int>(col)); it; ++it) {
            const Index sub_row = sector->sub_index(it.row());
            if (sub_row < 0) {
                if (std::abs(it.value()) > leak_tol)
                    throw DomainError("restrict_operator: operator couples out of the sector (|" +
                                      std::to_string(std::abs(it.value())) + "| at parent row " +
                                      std::to_string(it.row()) + ")");
                continue;
            }
            ts.emplace_back(sub_row, sub_col, it.value());
        }
    }
    SparseOperator out = make_operator(sector, ts, false);
    out.hermitian = op.hermitian;
    return out;
}

inline Eigen::VectorXcd restrict_vector(const Eigen::VectorXcd& v, const SectorBasis& sector, double leak_tol = 1e-12) {
    if (v.size() != sector.parent()->dim()) throw DomainError("restrict_vector: length mismatch");
    Eigen::VectorXcd out(sector.dim());
    for (Index k = 0; k < sector.dim(); ++k) out[k] = v[sector.parent_index(k)];
    const double dropped = std::sqrt(std::max(0.0, v.squaredNorm() - out.squaredNorm()));
    if (dropped > leak_tol) throw DomainError("restrict_vector: state has weight outside the sector");
    return out;
}

inline Eigen::VectorXcd expand_vector(const Eigen::VectorXcd& v, const SectorBasis& sector) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(sector.parent()->dim());
    for (Index k = 0; k < sector.dim(); ++k) out[sector.parent_index(k)] = v[k];
    return out;
}

// ---------------------------------------------------------------------------
// Diagonal observable helpers
// ---------------------------------------------------------------------------

// Per-state occupation of one flattened mode, as a weight vector.
inline Eigen::VectorXd occupation_weights(const Basis& basis, int flat_mode) {
    Eigen::VectorXd w(basis.dim());
    for (Index s = 0; s < basis.dim(); ++s) w[s] = basis.occupation(s, flat_mode);
    return w;
}

inline Eigen::VectorXd total_number_weights(const Basis& basis) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(basis.dim());
    for (int m = 0; m < basis.mode_count(); ++m) w += occupation_weights(basis, m);
    return w;
}

// ---------------------------------------------------------------------------
// Debug dump: sparse-triplet text format, one "row col re im" line per nonzero
// ---------------------------------------------------------------------------

inline void dump_operator(std::ostream& os, const SparseOperator& op, const std::string& name = "operator") {
    os << "# synladder sparse operator: " << name << "\n";
    os << "# basis_hash " << hex16(op.basis->hash()) << "\n";
    os << "# dim " << op.dim() << " nnz " << op.mat.nonZeros() << " hermitian " << (op.hermitian ? 1 : 0) << "\n";
    os.precision(17);
    for (int k = 0; k < op.mat.outerSize(); ++k)
        for (SpMat::InnerIterator it(op.mat, k); it; ++it)
            os << it.row() << " " << it.col() << " " << it.value().real() << " " << it.value().imag() << "\n";
}

// ---------------------------------------------------------------------------
// State builders
// ---------------------------------------------------------------------------

// All particles of one sector in a single mode.
inline Eigen::VectorXcd single_mode_state(const FockBasis& basis, HalfInt m) {
    std::vector<int> occ(static_cast<std::size_t>(basis.mode_count()), 0);
    occ[static_cast<std::size_t>(basis.modes().require(m))] = basis.particles();
    const Index k = basis.index_of(occ);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(basis.dim());
    v[k] = 1.0;
    return v;
}

// (sqrt(p) |m1> + sqrt(1-p) |m2>)^{(x) n} expanded binomially into the sector
// Fock basis (exact floating-point amplitudes, no sampling).
inline Eigen::VectorXcd binomial_state(const FockBasis& basis, HalfInt m1, HalfInt m2, double p) {
    if (p < 0.0 || p > 1.0) throw DomainError("superposition probability must be in [0,1]");
    const int i1 = basis.modes().require(m1);
    const int i2 = basis.modes().require(m2);
    if (i1 == i2) throw DomainError("superposition modes must differ");
    const int n = basis.particles();
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(basis.dim());
    // amplitude on |k in m1, n-k in m2> = sqrt(C(n,k)) p^{k/2} (1-p)^{(n-k)/2}
    for (int k = 0; k <= n; ++k) {
        double lc = 0.0;  // log C(n,k)
        for (int i = 1; i <= k; ++i) lc += std::log(static_cast<double>(n - k + i)) - std::log(static_cast<double>(i));
        double amp = std::exp(0.5 * lc) * std::pow(p, 0.5 * k) * std::pow(1.0 - p, 0.5 * (n - k));
        if (amp == 0.0) continue;
        std::vector<int> occ(static_cast<std::size_t>(basis.mode_count()), 0);
        occ[static_cast<std::size_t>(i1)] = k;
        occ[static_cast<std::size_t>(i2)] = n - k;
        v[basis.index_of(occ)] = amp;
    }
    v.normalize();
    return v;
}

// Product state on a two-sector basis from per-sector vectors.
inline Eigen::VectorXcd product_state(const ProductBasis& basis, const Eigen::VectorXcd& up,
                                      const Eigen::VectorXcd& low) {
    if (up.size() != basis.upper()->dim() || low.size() != basis.lower()->dim())
        throw DomainError("product_state: sector vector lengths mismatch");
    Eigen::VectorXcd v(basis.dim());
    for (Index iu = 0; iu < up.size(); ++iu)
        for (Index il = 0; il < low.size(); ++il) v[basis.composite(iu, il)] = up[iu] * low[il];
    return v;
}

}  // namespace synladder::fock
