// fock.hpp — truncated Fock space ⊕_{n≤N} X(n) and operators on it.
//
// Operators are dense matrices on the whole truncation. Truncation is tracked
// per source level: column m of an operator is "exact" when every block in that
// column equals the corresponding block of the untruncated operator.

#pragma once

#include "subprod/systems.hpp"

#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace subprod {

struct TruncatedFock {
    SubproductSystem system;
    std::vector<Eigen::Index> offsets;  // offsets[n] = first index of level n; offsets[N+1] = total
    int N() const { return system.N; }
    Eigen::Index total_dim() const { return offsets.back(); }
    Eigen::Index offset(int n) const { return offsets.at(static_cast<std::size_t>(n)); }
    Eigen::Index dim(int n) const { return offsets.at(static_cast<std::size_t>(n) + 1) - offsets.at(static_cast<std::size_t>(n)); }
    /// Level containing global index i.
    int level_of(Eigen::Index i) const {
        for (int n = 0; n <= N(); ++n)
            if (i < offset(n + 1)) return n;
        throw std::out_of_range("TruncatedFock::level_of");
    }
};

using FockPtr = std::shared_ptr<const TruncatedFock>;

inline FockPtr make_fock(SubproductSystem X) {
    auto f = std::make_shared<TruncatedFock>();
    f->system = std::move(X);
    f->offsets.push_back(0);
    for (int n = 0; n <= f->system.N; ++n)
        f->offsets.push_back(f->offsets.back() + static_cast<Eigen::Index>(f->system.fiber_dim(n)));
    return f;
}

class FockOperator {
public:
    FockOperator() = default;
    FockOperator(FockPtr fock, CMatrix m, std::vector<bool> exact, std::set<int> degrees)
        : fock_(std::move(fock)), m_(std::move(m)), exact_(std::move(exact)), degrees_(std::move(degrees)) {
        if (!fock_) throw std::invalid_argument("FockOperator: null Fock space");
        if (m_.rows() != fock_->total_dim() || m_.cols() != fock_->total_dim())
            throw std::invalid_argument("FockOperator: matrix size does not match the truncation");
        if (exact_.size() != static_cast<std::size_t>(fock_->N() + 1))
            throw std::invalid_argument("FockOperator: exactness vector has the wrong length");
    }

    static FockOperator zero(const FockPtr& f) {
        return {f, CMatrix::Zero(f->total_dim(), f->total_dim()), std::vector<bool>(static_cast<std::size_t>(f->N() + 1), true), {}};
    }
    static FockOperator identity(const FockPtr& f) {
        return {f, CMatrix::Identity(f->total_dim(), f->total_dim()), std::vector<bool>(static_cast<std::size_t>(f->N() + 1), true), {0}};
    }

    const FockPtr& fock() const { return fock_; }
    const CMatrix& matrix() const { return m_; }
    const std::vector<bool>& exactness() const { return exact_; }
    const std::set<int>& degrees() const { return degrees_; }
    bool column_exact(int m) const { return exact_.at(static_cast<std::size_t>(m)); }
    int N() const { return fock_->N(); }

    CMatrix block(int to, int from) const {
        return m_.block(fock_->offset(to), fock_->offset(from), fock_->dim(to), fock_->dim(from));
    }
    /// S·Q_m as the columns of level m.
    CMatrix column(int m) const { return m_.middleCols(fock_->offset(m), fock_->dim(m)); }

    /// Largest exact source level, or -1 if none.
    int last_exact() const {
        for (int m = N(); m >= 0; --m)
            if (exact_[static_cast<std::size_t>(m)]) return m;
        return -1;
    }

    double norm() const { return op_norm(m_); }

    FockOperator adjoint() const {
        std::vector<bool> ex(exact_.size());
        for (int mp = 0; mp <= N(); ++mp) {
            bool ok = true;
            for (int k : degrees_) {
                const int src = mp - k;
                if (src < 0) continue;
                if (src > N() || !exact_[static_cast<std::size_t>(src)]) ok = false;
            }
            ex[static_cast<std::size_t>(mp)] = ok;
        }
        std::set<int> deg;
        for (int k : degrees_) deg.insert(-k);
        return {fock_, m_.adjoint(), std::move(ex), std::move(deg)};
    }

    FockOperator& operator+=(const FockOperator& o) {
        same_space(o);
        m_ += o.m_;
        for (std::size_t i = 0; i < exact_.size(); ++i) exact_[i] = exact_[i] && o.exact_[i];
        degrees_.insert(o.degrees_.begin(), o.degrees_.end());
        return *this;
    }
    FockOperator& operator-=(const FockOperator& o) { return *this += o * cplx(-1.0, 0.0); }

    friend FockOperator operator+(FockOperator a, const FockOperator& b) { return a += b; }
    friend FockOperator operator-(FockOperator a, const FockOperator& b) { return a -= b; }
    friend FockOperator operator*(const FockOperator& a, cplx s) {
        FockOperator out = a;
        out.m_ *= s;
        return out;
    }
    friend FockOperator operator*(cplx s, const FockOperator& a) { return a * s; }

    /// Composition. Column m of AB is exact when B's column m is exact and each
    /// level B can reach from m is either below 0 or an exact column of A.
    friend FockOperator operator*(const FockOperator& a, const FockOperator& b) {
        a.same_space(b);
        std::set<int> deg;
        for (int i : a.degrees_)
            for (int j : b.degrees_) deg.insert(i + j);
        return {a.fock_, a.m_ * b.m_, product_exactness(a, b), std::move(deg)};
    }

    static std::vector<bool> product_exactness(const FockOperator& a, const FockOperator& b) {
        const int N = a.N();
        std::vector<bool> ex(a.exact_.size());
        for (int m = 0; m <= N; ++m) {
            bool ok = b.exact_[static_cast<std::size_t>(m)];
            for (int k : b.degrees_) {
                const int lvl = m + k;
                if (lvl < 0) continue;
                if (lvl > N || !a.exact_[static_cast<std::size_t>(lvl)]) ok = false;
            }
            ex[static_cast<std::size_t>(m)] = ok;
        }
        return ex;
    }

private:
    void same_space(const FockOperator& o) const {
        if (fock_ != o.fock_ && (fock_->total_dim() != o.fock_->total_dim() || fock_->N() != o.fock_->N()))
            throw std::invalid_argument("FockOperator: operands live on different Fock spaces");
    }

    FockPtr fock_;
    CMatrix m_;
    std::vector<bool> exact_;
    std::set<int> degrees_;
};

inline std::vector<bool> all_exact(const FockPtr& f) { return std::vector<bool>(static_cast<std::size_t>(f->N() + 1), true); }

// ---------------------------------------------------------------------------
// Shifts
// ---------------------------------------------------------------------------

/// p_{n+m}(ζ⊗η) in X(n+m) coordinates.
inline CVector fiber_product(const SubproductSystem& X, int n, int m, const CVector& zeta, const CVector& eta) {
    const CMatrix& Jn = X.J.at(static_cast<std::size_t>(n));
    const CMatrix& Jm = X.J.at(static_cast<std::size_t>(m));
    const CMatrix w = concat_rows(X, n, m, CMatrix(kron_vec(Jn * zeta, Jm * eta)));
    return X.J.at(static_cast<std::size_t>(n + m)).adjoint() * w.col(0);
}

/// Block (n+m, m) of S_n(ζ): J_{n+m}* (J_n ζ ⊗ J_m), ζ in X(n) coordinates.
inline CMatrix shift_block(const SubproductSystem& X, int n, int m, const CVector& zeta) {
    const CVector zE = X.J[static_cast<std::size_t>(n)] * zeta;
    const CMatrix& Jt = X.J[static_cast<std::size_t>(n + m)];
    if (n > 0 && m > 0) {
        // J_{n+m}*(ζ_E ⊗ I) first: a sum of row slices, skipping zero letters of ζ_E
        const auto wm = static_cast<Eigen::Index>(X.word_dim(m));
        CMatrix contracted = CMatrix::Zero(Jt.cols(), wm);
        for (Eigen::Index w = 0; w < zE.size(); ++w)
            if (zE(w) != cplx(0.0, 0.0)) contracted += zE(w) * Jt.middleRows(w * wm, wm).adjoint();
        return contracted * X.J[static_cast<std::size_t>(m)];
    }
    const CMatrix words = concat_rows(X, n, m, kron(CMatrix(zE), X.J[static_cast<std::size_t>(m)]));
    return Jt.adjoint() * words;
}

/// S_n(ζ) on the truncation. n = 0 gives the left action φ_∞(ζ), ζ ∈ ℂ^q.
inline FockOperator shift(const FockPtr& f, int n, const CVector& zeta) {
    const auto& X = f->system;
    if (n < 0 || n > f->N()) throw std::invalid_argument("shift: level " + std::to_string(n) + " outside [0, N]");
    if (zeta.size() != static_cast<Eigen::Index>(X.fiber_dim(n)))
        throw std::invalid_argument("shift: vector has the wrong dimension for X(" + std::to_string(n) + ")");
    CMatrix out = CMatrix::Zero(f->total_dim(), f->total_dim());
    std::vector<bool> ex(static_cast<std::size_t>(f->N() + 1), true);
    for (int m = 0; m <= f->N(); ++m) {
        if (n + m > f->N()) {
            ex[static_cast<std::size_t>(m)] = false;
            continue;
        }
        out.block(f->offset(n + m), f->offset(m), f->dim(n + m), f->dim(m)) = shift_block(X, n, m, zeta);
    }
    return {f, std::move(out), std::move(ex), {n}};
}

/// max over exact columns k of ‖S_n(ζ)S_m(η) − S_{n+m}(p_{n+m}(ζ⊗η))‖ on level k,
/// evaluated blockwise.
inline double semigroup_residual(const SubproductSystem& X, int n, int m, const CVector& zeta, const CVector& eta) {
    const CVector prod = fiber_product(X, n, m, zeta, eta);
    double worst = 0.0;
    for (int k = 0; n + m + k <= X.N; ++k) {
        const CMatrix lhs = shift_block(X, n, m + k, zeta) * shift_block(X, m, k, eta);
        worst = std::max(worst, op_norm(lhs - shift_block(X, n + m, k, prod)));
    }
    return worst;
}

inline FockOperator shift_basis(const FockPtr& f, int n, std::size_t index) {
    CVector z = CVector::Zero(static_cast<Eigen::Index>(f->system.fiber_dim(n)));
    z(static_cast<Eigen::Index>(index)) = 1.0;
    return shift(f, n, z);
}

inline FockOperator left_action(const FockPtr& f, const CVector& a) { return shift(f, 0, a); }

/// max_m ‖block(m, n+m) of S_n(ζ)* − J_m*(⟨J_nζ| ⊗ I)J_{n+m}‖ over the truncation.
inline double adjoint_action_check(const FockPtr& f, int n, const CVector& zeta) {
    const auto& X = f->system;
    const FockOperator Sa = shift(f, n, zeta).adjoint();
    const CMatrix zE = X.J[static_cast<std::size_t>(n)] * zeta;
    double worst = 0.0;
    for (int m = 0; n + m <= f->N(); ++m) {
        const auto wm = static_cast<Eigen::Index>(X.word_dim(m));
        const CMatrix contract = kron(zE.adjoint(), CMatrix::Identity(wm, wm));
        const CMatrix expected = X.J[static_cast<std::size_t>(m)].adjoint() * contract *
                                 split_rows(X, n, m, X.J[static_cast<std::size_t>(n + m)]);
        worst = std::max(worst, op_norm(Sa.block(m, n + m) - expected));
        // every other block in this column must vanish
        CMatrix rest = Sa.column(n + m);
        rest.middleRows(f->offset(m), f->dim(m)).setZero();
        worst = std::max(worst, op_norm(rest));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Level projections
// ---------------------------------------------------------------------------

inline FockOperator level_projection(const FockPtr& f, int n) {
    CMatrix m = CMatrix::Zero(f->total_dim(), f->total_dim());
    if (n >= 0 && n <= f->N()) m.block(f->offset(n), f->offset(n), f->dim(n), f->dim(n)).setIdentity();
    return {f, std::move(m), all_exact(f), {0}};
}

/// R_n = Q_0 + … + Q_n.
inline FockOperator partial_projection(const FockPtr& f, int n) {
    CMatrix m = CMatrix::Zero(f->total_dim(), f->total_dim());
    for (int k = 0; k <= std::min(n, f->N()); ++k) m.block(f->offset(k), f->offset(k), f->dim(k), f->dim(k)).setIdentity();
    return {f, std::move(m), all_exact(f), {0}};
}

/// R_n′ = I − R_{n−1}.
inline FockOperator tail_projection(const FockPtr& f, int n) {
    return FockOperator::identity(f) - partial_projection(f, n - 1);
}

/// ‖S Q_n‖.
inline double norm_on_level(const FockOperator& S, int n) { return op_norm(S.column(n)); }

/// ‖S R_n′‖ restricted to the exact columns of levels n..N.
inline double tail_norm_exact(const FockOperator& S, int n) {
    const auto& f = S.fock();
    std::vector<Eigen::Index> cols;
    for (int m = std::max(n, 0); m <= S.N(); ++m)
        if (S.column_exact(m))
            for (Eigen::Index c = 0; c < f->dim(m); ++c) cols.push_back(f->offset(m) + c);
    if (cols.empty()) return 0.0;
    CMatrix sub(S.matrix().rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) sub.col(static_cast<Eigen::Index>(i)) = S.matrix().col(cols[i]);
    return op_norm(sub);
}

/// max over columns exact in both operands of ‖(A − B)Q_m‖.
inline double exact_difference(const FockOperator& a, const FockOperator& b) {
    double worst = 0.0;
    const CMatrix d = a.matrix() - b.matrix();
    for (int m = 0; m <= a.N(); ++m)
        if (a.column_exact(m) && b.column_exact(m))
            worst = std::max(worst, op_norm(d.middleCols(a.fock()->offset(m), a.fock()->dim(m))));
    return worst;
}

// ---------------------------------------------------------------------------
// Gauge action and spectral bands
// ---------------------------------------------------------------------------

/// W_λ S W_λ*: block (m′, m) scaled by λ^{m′−m}.
inline FockOperator gauge_conjugate(const FockOperator& S, cplx lambda) {
    if (std::abs(std::abs(lambda) - 1.0) > 1e-12) throw std::invalid_argument("gauge_conjugate: |lambda| must be 1");
    const auto& f = S.fock();
    CMatrix m = S.matrix();
    for (int to = 0; to <= S.N(); ++to)
        for (int from = 0; from <= S.N(); ++from)
            m.block(f->offset(to), f->offset(from), f->dim(to), f->dim(from)) *= std::pow(lambda, to - from);
    return {f, std::move(m), S.exactness(), S.degrees()};
}

/// Φ_k(S): keep the band of blocks with m′ − m = k.
inline FockOperator spectral_component(const FockOperator& S, int k) {
    if (std::abs(k) > S.N()) throw std::invalid_argument("spectral_component: |k| must not exceed N");
    const auto& f = S.fock();
    CMatrix m = CMatrix::Zero(f->total_dim(), f->total_dim());
    for (int from = 0; from <= S.N(); ++from) {
        const int to = from + k;
        if (to < 0 || to > S.N()) continue;
        m.block(f->offset(to), f->offset(from), f->dim(to), f->dim(from)) = S.block(to, from);
    }
    std::set<int> deg;
    if (S.degrees().count(k)) deg.insert(k);
    return {f, std::move(m), S.exactness(), std::move(deg)};
}

/// Cesàro mean σ_n(S) = Σ_{|k|≤n} (1 − |k|/(n+1)) Φ_k(S).
inline FockOperator fejer(const FockOperator& S, int n) {
    if (n < 0) throw std::invalid_argument("fejer: order must be >= 0");
    FockOperator out = FockOperator::zero(S.fock());
    const int kmax = std::min(n, S.N());
    for (int k = -kmax; k <= kmax; ++k) {
        const double w = 1.0 - static_cast<double>(std::abs(k)) / static_cast<double>(n + 1);
        out += spectral_component(S, k) * cplx(w, 0.0);
    }
    return FockOperator(S.fock(), out.matrix(), S.exactness(), out.degrees());
}

}  // namespace subprod
