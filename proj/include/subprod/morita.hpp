// morita.hpp — the imprimitivity bimodule M = ℂ^k between A = M_k(ℂ) and B = ℂ.
//
// Coordinates: X(n) = M ⊗ Y(n) ⊗ M̃ is ℂ^k ⊗ Y(n) ⊗ ℂ^k, and the linking fiber
// Z(n) is ℂ^{1+k} ⊗ Y(n) ⊗ ℂ^{1+k}, index 0 of ℂ^{1+k} being the B-slot. A
// balanced tensor over the coefficient algebra contracts the adjacent
// right/left indices through the pairing ⟨e_b, e_c⟩ = δ_bc.
//
// Operators on F_Z′ = F_Y ⊕ (ℂ^k ⊗ F_Y) are ordered as ℂ^{1+k} ⊗ F_Y.

#pragma once

#include "subprod/ideal.hpp"

#include <random>
#include <string>
#include <vector>

namespace subprod {

/// Dense product with one running accumulator per entry, inner index ascending.
/// Used wherever two assemblies of the same operator must agree bit for bit.
inline CMatrix ordered_product(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("ordered_product: size mismatch");
    CMatrix out(a.rows(), b.cols());
    for (Eigen::Index c = 0; c < b.cols(); ++c)
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
            cplx s(0.0, 0.0);
            for (Eigen::Index t = 0; t < a.cols(); ++t) s += a(r, t) * b(t, c);
            out(r, c) = s;
        }
    return out;
}

struct MoritaContext {
    int k = 1;
    SubproductSystem Y;
    FockPtr FY;
    std::vector<CMatrix> JX;  // I_k ⊗ J^Y_n ⊗ I_k
    std::vector<CMatrix> W;   // W_n : M ⊗ Y(n) → X(n) ⊗_A M ≅ ℂ^k ⊗ Y(n)

    int N() const { return Y.N; }
    std::size_t dimY(int n) const { return Y.fiber_dim(n); }
    std::size_t dimX(int n) const { return static_cast<std::size_t>(k * k) * dimY(n); }
    std::size_t dimZ(int n) const { return static_cast<std::size_t>((1 + k) * (1 + k)) * dimY(n); }
    Eigen::Index fock_dim() const { return FY->total_dim(); }
    Eigen::Index prime_dim() const { return (1 + k) * fock_dim(); }
};

/// _A⟨x,y⟩ = x y*.
inline CMatrix left_rigging(const CVector& x, const CVector& y) { return x * y.adjoint(); }
/// ⟨x,y⟩_B = Σ x̄_i y_i.
inline cplx right_rigging(const CVector& x, const CVector& y) { return x.dot(y); }

/// Insertion x⊗η ↦ x⊗η⊗ẽ_1⊗e_1 into (ℂ^k ⊗ V ⊗ ℂ^k) ⊗ ℂ^k.
inline CMatrix frame_insertion(int k, Eigen::Index dimV) {
    const Eigen::Index kk = k;
    CMatrix out = CMatrix::Zero(kk * dimV * kk * kk, kk * dimV);
    for (Eigen::Index a = 0; a < kk; ++a)
        for (Eigen::Index v = 0; v < dimV; ++v) out(((a * dimV + v) * kk + 0) * kk + 0, a * dimV + v) = 1.0;
    return out;
}

/// Contraction x⊗η⊗ỹ⊗z ↦ ⟨y,z⟩_B x⊗η from (ℂ^k ⊗ V ⊗ ℂ^k) ⊗ ℂ^k.
inline CMatrix right_contraction(int k, Eigen::Index dimV) {
    const Eigen::Index kk = k;
    CMatrix out = CMatrix::Zero(kk * dimV, kk * dimV * kk * kk);
    for (Eigen::Index a = 0; a < kk; ++a)
        for (Eigen::Index v = 0; v < dimV; ++v)
            for (Eigen::Index b = 0; b < kk; ++b) out(a * dimV + v, ((a * dimV + v) * kk + b) * kk + b) = 1.0;
    return out;
}

/// x⊗η⊗ỹ⊗z⊗η′ ↦ ⟨y,z⟩_B x⊗η⊗η′ from (ℂ^k ⊗ V ⊗ ℂ^k ⊗ ℂ^k) ⊗ U.
inline CMatrix middle_contraction(int k, Eigen::Index dimV, Eigen::Index dimU) {
    const Eigen::Index kk = k;
    CMatrix out = CMatrix::Zero(kk * dimV * dimU, kk * dimV * kk * kk * dimU);
    for (Eigen::Index a = 0; a < kk; ++a)
        for (Eigen::Index v = 0; v < dimV; ++v)
            for (Eigen::Index b = 0; b < kk; ++b)
                for (Eigen::Index u = 0; u < dimU; ++u)
                    out((a * dimV + v) * dimU + u, (((a * dimV + v) * kk + b) * kk + b) * dimU + u) = 1.0;
    return out;
}

inline MoritaContext build_context(int k, SubproductSystem Y) {
    if (k < 1) throw InvalidSystem("build_context: k must be >= 1");
    if (Y.q() != 1) throw InvalidSystem("build_context: the inducing system must have scalar coefficients");
    MoritaContext ctx;
    ctx.k = k;
    ctx.Y = std::move(Y);
    ctx.FY = make_fock(ctx.Y);
    const CMatrix Ik = CMatrix::Identity(k, k);
    for (int n = 0; n <= ctx.N(); ++n) {
        ctx.JX.push_back(kron(Ik, kron(ctx.Y.J[static_cast<std::size_t>(n)], Ik)));
        const auto dy = static_cast<Eigen::Index>(ctx.dimY(n));
        ctx.W.push_back(right_contraction(k, dy) * frame_insertion(k, dy));
    }
    return ctx;
}

struct ContextReport {
    double imprimitivity_residual = 0.0;  // ‖_A⟨x,y⟩z − x⟨y,z⟩_B‖ on samples
    double w_identity_residual = 0.0;     // ‖W_n − I‖ (coordinates make W_n the identity)
    double composition_residual = 0.0;    // ‖W_{n+m} − (I⊗W_m)(W_n⊗I)‖
    double intertwining_residual = 0.0;   // ‖W_n(I⊗p^Y_n) − (p^X_n⊗I)W_n‖ on the word space
    double x_subproduct_residual = 0.0;
    double z_subproduct_residual = 0.0;
    bool z_dims_exact = true;
    std::vector<std::size_t> dims_Y, dims_X, dims_Z;
};

/// ‖(K K* − I) J_{n+m}‖ for K = I_r ⊗ J_n ⊗ J_m ⊗ I_r, J_{n+m} likewise padded.
inline double padded_subproduct_residual(const SubproductSystem& Y, int r, int n, int m) {
    const CMatrix Ir = CMatrix::Identity(r, r);
    const CMatrix K = kron(Ir, kron(kron(Y.J[static_cast<std::size_t>(n)], Y.J[static_cast<std::size_t>(m)]), Ir));
    const CMatrix Jt = kron(Ir, kron(Y.J[static_cast<std::size_t>(n + m)], Ir));
    return op_norm(K * (K.adjoint() * Jt) - Jt);
}

inline ContextReport check_context(const MoritaContext& ctx, std::size_t samples = 20, std::uint64_t seed = 1) {
    ContextReport r;
    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < samples; ++s) {
        const CVector x = random_cmatrix(ctx.k, 1, rng), y = random_cmatrix(ctx.k, 1, rng), z = random_cmatrix(ctx.k, 1, rng);
        r.imprimitivity_residual = std::max(r.imprimitivity_residual, (left_rigging(x, y) * z - x * right_rigging(y, z)).norm());
    }
    for (int n = 0; n <= ctx.N(); ++n) {
        r.dims_Y.push_back(ctx.dimY(n));
        r.dims_X.push_back(ctx.dimX(n));
        r.dims_Z.push_back(static_cast<std::size_t>(1 + ctx.k) * ctx.dimY(n) * static_cast<std::size_t>(1 + ctx.k));
        r.z_dims_exact = r.z_dims_exact && r.dims_Z.back() == ctx.dimZ(n);
        const CMatrix& Wn = ctx.W[static_cast<std::size_t>(n)];
        r.w_identity_residual = std::max(r.w_identity_residual, op_norm(Wn - CMatrix::Identity(Wn.rows(), Wn.cols())));
        if (n >= 1) {
            // intertwining on the ambient word space ℂ^k ⊗ E^{⊗n}
            const auto wd = static_cast<Eigen::Index>(ctx.Y.word_dim(n));
            const CMatrix pY = ctx.Y.projection(n);
            const CMatrix Ik = CMatrix::Identity(ctx.k, ctx.k);
            const CMatrix Wamb = right_contraction(ctx.k, wd) * frame_insertion(ctx.k, wd);
            const CMatrix pXI = kron(kron(Ik, kron(pY, Ik)), Ik);
            const CMatrix lhs = Wamb * kron(Ik, pY);
            const CMatrix rhs = right_contraction(ctx.k, wd) * pXI * frame_insertion(ctx.k, wd);
            r.intertwining_residual = std::max(r.intertwining_residual, op_norm(lhs - rhs));
        }
    }
    for (int n = 0; n <= ctx.N(); ++n)
        for (int m = 0; n + m <= ctx.N(); ++m) {
            const auto dn = static_cast<Eigen::Index>(ctx.dimY(n)), dm = static_cast<Eigen::Index>(ctx.dimY(m));
            // W_{n+m} on M⊗Y(n)⊗Y(m) against W_n⊗I followed by I⊗W_m, both
            // read in the contracted coordinates ℂ^k ⊗ Y(n) ⊗ Y(m)
            const CMatrix direct = right_contraction(ctx.k, dn * dm) * frame_insertion(ctx.k, dn * dm);
            const CMatrix staged = middle_contraction(ctx.k, dn, dm) * kron(frame_insertion(ctx.k, dn), CMatrix::Identity(dm, dm));
            r.composition_residual = std::max(r.composition_residual, op_norm(direct - staged));
            if (n >= 1 && m >= 1) {
                r.x_subproduct_residual = std::max(r.x_subproduct_residual, padded_subproduct_residual(ctx.Y, ctx.k, n, m));
                r.z_subproduct_residual = std::max(r.z_subproduct_residual, padded_subproduct_residual(ctx.Y, ctx.k + 1, n, m));
            }
        }
    return r;
}

// ---------------------------------------------------------------------------
// Linking system elements and shifts
// ---------------------------------------------------------------------------

/// α ∈ Z(n) in coordinates (left ∈ [0,k], fiber κ, right ∈ [0,k]).
struct LinkingElement {
    int n = 0;
    int k = 1;
    CVector coords;

    std::size_t dimY() const { return static_cast<std::size_t>(coords.size() / ((1 + k) * (1 + k))); }
    Eigen::Index index(int left, std::size_t kappa, int right) const {
        return (static_cast<Eigen::Index>(left) * static_cast<Eigen::Index>(dimY()) + static_cast<Eigen::Index>(kappa)) * (1 + k) + right;
    }
    /// The Y(n)-vector in slot (left, right).
    CVector slot(int left, int right) const {
        CVector v(static_cast<Eigen::Index>(dimY()));
        for (std::size_t c = 0; c < dimY(); ++c) v(static_cast<Eigen::Index>(c)) = coords(index(left, c, right));
        return v;
    }
    void set_slot(int left, int right, const CVector& v) {
        for (std::size_t c = 0; c < dimY(); ++c) coords(index(left, c, right)) = v(static_cast<Eigen::Index>(c));
    }
};

inline LinkingElement linking_zero(const MoritaContext& ctx, int n) {
    return {n, ctx.k, CVector::Zero(static_cast<Eigen::Index>(ctx.dimZ(n)))};
}

/// Corners: η₁ ∈ Y(n); β ∈ Y(n)⊗M̃ (k slots); γ ∈ M⊗Y(n) (k slots); ζ₂ ∈ X(n) (k×k slots).
inline LinkingElement linking_from_corners(const MoritaContext& ctx, int n, const CVector& eta1, const std::vector<CVector>& beta,
                                           const std::vector<CVector>& gamma, const std::vector<std::vector<CVector>>& zeta2) {
    LinkingElement a = linking_zero(ctx, n);
    if (eta1.size()) a.set_slot(0, 0, eta1);
    for (std::size_t b = 0; b < beta.size(); ++b) a.set_slot(0, static_cast<int>(b) + 1, beta[b]);
    for (std::size_t c = 0; c < gamma.size(); ++c) a.set_slot(static_cast<int>(c) + 1, 0, gamma[c]);
    for (std::size_t i = 0; i < zeta2.size(); ++i)
        for (std::size_t j = 0; j < zeta2[i].size(); ++j) a.set_slot(static_cast<int>(i) + 1, static_cast<int>(j) + 1, zeta2[i][j]);
    return a;
}

/// S^Z_n(α) on the full truncated F_Z, indices (left, F_Y index, right), built
/// from the balanced tensor over the linking algebra: the right index of α is
/// paired with the left index of the argument; the argument's right index passes
/// through.
inline CMatrix linking_shift_full(const MoritaContext& ctx, const LinkingElement& alpha) {
    const int n = alpha.n, r = ctx.k + 1;
    const FockPtr& F = ctx.FY;
    const Eigen::Index dF = F->total_dim();
    auto gidx = [&](int left, Eigen::Index y, int right) { return (static_cast<Eigen::Index>(left) * dF + y) * r + right; };
    CMatrix out = CMatrix::Zero(r * dF * r, r * dF * r);
    const CMatrix pairing = CMatrix::Identity(r, r);
    for (int m = 0; n + m <= ctx.N(); ++m)
        for (int i = 0; i < r; ++i)
            for (int b = 0; b < r; ++b) {
                const CVector v = alpha.slot(i, b);
                if (v.isZero(0.0)) continue;
                const CMatrix blk = shift_block(ctx.Y, n, m, v);
                for (int x = 0; x < r; ++x) {
                    const cplx c = pairing(b, x);
                    if (c == cplx(0.0, 0.0)) continue;
                    for (int jr = 0; jr < r; ++jr)
                        for (Eigen::Index rr = 0; rr < blk.rows(); ++rr)
                            for (Eigen::Index cc = 0; cc < blk.cols(); ++cc)
                                out(gidx(i, F->offset(n + m) + rr, jr), gidx(x, F->offset(m) + cc, jr)) += c * blk(rr, cc);
                }
            }
    return out;
}

/// Isometry F_Z′ → F_Z onto the right-index-0 slice.
inline CMatrix prime_embedding(const MoritaContext& ctx) {
    const int r = ctx.k + 1;
    const Eigen::Index dF = ctx.fock_dim();
    CMatrix V = CMatrix::Zero(r * dF * r, r * dF);
    for (int i = 0; i < r; ++i)
        for (Eigen::Index y = 0; y < dF; ++y) V((i * dF + y) * r + 0, i * dF + y) = 1.0;
    return V;
}

/// Route 1: S^Z_n(α) restricted to F_Z′.
inline CMatrix linking_shift(const MoritaContext& ctx, const LinkingElement& alpha) {
    const CMatrix V = prime_embedding(ctx);
    const CMatrix full = linking_shift_full(ctx, alpha);
    CMatrix out(V.cols(), V.cols());
    // V is a coordinate selection, so the compression is a plain gather
    std::vector<Eigen::Index> sel;
    for (Eigen::Index c = 0; c < V.cols(); ++c)
        for (Eigen::Index rr = 0; rr < V.rows(); ++rr)
            if (V(rr, c) != cplx(0.0, 0.0)) {
                sel.push_back(rr);
                break;
            }
    for (std::size_t a = 0; a < sel.size(); ++a)
        for (std::size_t b = 0; b < sel.size(); ++b) out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = full(sel[a], sel[b]);
    return out;
}

/// ‖(I − P′) S P′‖ and ‖(I − P′) S* P′‖ on the full F_Z.
inline double prime_invariance_residual(const MoritaContext& ctx, const LinkingElement& alpha) {
    const CMatrix V = prime_embedding(ctx);
    const CMatrix full = linking_shift_full(ctx, alpha);
    const CMatrix P = V * V.adjoint();
    const CMatrix Pc = CMatrix::Identity(P.rows(), P.cols()) - P;
    return std::max(op_norm(Pc * full * P), op_norm(Pc * full.adjoint() * P));
}

// ---------------------------------------------------------------------------
// Route 2: (1+k)×(1+k) matrices over Y-side operators
// ---------------------------------------------------------------------------

struct CornerOp {
    int r = 1;                      // 1 + k
    std::vector<FockOperator> e;    // row-major entries

    const FockOperator& at(int i, int j) const { return e[static_cast<std::size_t>(i * r + j)]; }
    FockOperator& at(int i, int j) { return e[static_cast<std::size_t>(i * r + j)]; }

    /// Assembled operator on ℂ^{1+k} ⊗ F_Y.
    CMatrix assemble() const {
        const Eigen::Index dF = e.front().matrix().rows();
        CMatrix out(r * dF, r * dF);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) out.block(i * dF, j * dF, dF, dF) = at(i, j).matrix();
        return out;
    }

    CornerOp adjoint() const {
        CornerOp out{r, e};
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) out.at(i, j) = at(j, i).adjoint();
        return out;
    }
};

/// Generator from the corner formulas: entry (i, j) = S^Y_n(α slot (i, j)).
inline CornerOp corner_shift(const MoritaContext& ctx, const LinkingElement& alpha) {
    CornerOp out;
    out.r = ctx.k + 1;
    for (int i = 0; i < out.r; ++i)
        for (int j = 0; j < out.r; ++j) {
            const CVector v = alpha.slot(i, j);
            if (v.isZero(0.0)) {
                FockOperator z = FockOperator::zero(ctx.FY);
                out.e.push_back(FockOperator(ctx.FY, z.matrix(), shift(ctx.FY, alpha.n, v).exactness(), {alpha.n}));
                continue;
            }
            // same block primitive as route 1, placed per level
            const FockPtr& F = ctx.FY;
            CMatrix m = CMatrix::Zero(F->total_dim(), F->total_dim());
            std::vector<bool> ex(static_cast<std::size_t>(F->N() + 1), true);
            for (int lvl = 0; lvl <= F->N(); ++lvl) {
                if (alpha.n + lvl > F->N()) {
                    ex[static_cast<std::size_t>(lvl)] = false;
                    continue;
                }
                m.block(F->offset(alpha.n + lvl), F->offset(lvl), F->dim(alpha.n + lvl), F->dim(lvl)) =
                    shift_block(ctx.Y, alpha.n, lvl, v);
            }
            out.e.emplace_back(F, std::move(m), std::move(ex), std::set<int>{alpha.n});
        }
    return out;
}

/// Corner-algebra product. Matrices use one accumulator per entry running over
/// (corner l, inner index t), matching ordered_product on the assembled form;
/// exactness and degrees follow the Fock operator rules.
inline CornerOp corner_product(const CornerOp& a, const CornerOp& b) {
    CornerOp out;
    out.r = a.r;
    const Eigen::Index dF = a.e.front().matrix().rows();
    for (int i = 0; i < a.r; ++i)
        for (int j = 0; j < a.r; ++j) {
            CMatrix m(dF, dF);
            for (Eigen::Index c = 0; c < dF; ++c)
                for (Eigen::Index rr = 0; rr < dF; ++rr) {
                    cplx s(0.0, 0.0);
                    for (int l = 0; l < a.r; ++l) {
                        const CMatrix& A = a.at(i, l).matrix();
                        const CMatrix& B = b.at(l, j).matrix();
                        for (Eigen::Index t = 0; t < dF; ++t) s += A(rr, t) * B(t, c);
                    }
                    m(rr, c) = s;
                }
            // exactness/degrees from the symbolic sum of products
            FockOperator meta = a.at(i, 0) * b.at(0, j);
            for (int l = 1; l < a.r; ++l) meta += a.at(i, l) * b.at(l, j);
            out.e.emplace_back(meta.fock(), std::move(m), meta.exactness(), meta.degrees());
        }
    return out;
}

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

/// S^Z_n(α)* on an upper vector ν at level m: the lower component must equal
/// e_w ⊗ S^Y_n(η₂)*ν when α has only the upper-right slot η₂ ⊗ ẽ_w.
inline double adjoint_lemma_residual(const MoritaContext& ctx, int n, const CVector& eta2, int w) {
    LinkingElement a = linking_zero(ctx, n);
    a.set_slot(0, w + 1, eta2);
    const CMatrix Sa = linking_shift(ctx, a).adjoint();
    const FockPtr& F = ctx.FY;
    const Eigen::Index dF = F->total_dim();
    const CMatrix zE = ctx.Y.J[static_cast<std::size_t>(n)] * eta2;
    double worst = 0.0;
    for (int m = n; m <= ctx.N(); ++m) {
        const auto wl = static_cast<Eigen::Index>(ctx.Y.word_dim(m - n));
        const CMatrix expected = ctx.Y.J[static_cast<std::size_t>(m - n)].adjoint() * kron(zE.adjoint(), CMatrix::Identity(wl, wl)) *
                                 split_rows(ctx.Y, n, m - n, ctx.Y.J[static_cast<std::size_t>(m)]);
        for (int lower = 0; lower < ctx.k; ++lower) {
            const CMatrix got = Sa.block((1 + lower) * dF + F->offset(m - n), F->offset(m), F->dim(m - n), F->dim(m));
            const CMatrix want = lower == w ? expected : CMatrix::Zero(expected.rows(), expected.cols());
            worst = std::max(worst, op_norm(got - want));
        }
    }
    return worst;
}

struct GeneratorWord {
    std::vector<LinkingElement> letters;
    std::vector<bool> adjoint;
};

inline LinkingElement random_linking_element(const MoritaContext& ctx, int n, std::mt19937_64& rng) {
    LinkingElement a = linking_zero(ctx, n);
    a.coords = random_cmatrix(a.coords.size(), 1, rng);
    a.coords /= a.coords.norm();
    return a;
}

inline std::vector<GeneratorWord> random_words(const MoritaContext& ctx, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> len(1, 3), lvl(0, std::min(2, ctx.N())), coin(0, 1);
    std::vector<GeneratorWord> out;
    for (std::size_t s = 0; s < count; ++s) {
        GeneratorWord w;
        const int L = len(rng);
        for (int i = 0; i < L; ++i) {
            w.letters.push_back(random_linking_element(ctx, lvl(rng), rng));
            w.adjoint.push_back(coin(rng) == 1);
        }
        out.push_back(std::move(w));
    }
    return out;
}

struct CompressionReport {
    std::size_t words = 0;
    double generator_residual = 0.0;   // route 1 vs route 2 on single generators
    double p_corner_residual = 0.0;    // p·word·p vs the Y-side entry
    double q_corner_residual = 0.0;    // q·word·q vs the X-side word ⊗ I_M
    double norm_preservation = 0.0;    // |‖T⊗I_M‖ − ‖T‖|
    double y_slot_homomorphism = 0.0;  // p-corner words of η₁-only generators vs Y-side products
    double invariance_residual = 0.0;  // F_Z′ invariance over the generators used
    double adjoint_lemma = 0.0;
};

inline CompressionReport compression_check(const MoritaContext& ctx, std::size_t samples = 20, std::uint64_t seed = 1) {
    CompressionReport rep;
    const Eigen::Index dF = ctx.fock_dim();
    const int r = ctx.k + 1;
    const auto words = random_words(ctx, samples, seed);
    rep.words = words.size();
    for (const auto& w : words) {
        CMatrix route1;
        CornerOp route2;
        for (std::size_t i = 0; i < w.letters.size(); ++i) {
            CMatrix g1 = linking_shift(ctx, w.letters[i]);
            CornerOp g2 = corner_shift(ctx, w.letters[i]);
            rep.generator_residual = std::max(rep.generator_residual, op_norm(g1 - g2.assemble()));
            rep.invariance_residual = std::max(rep.invariance_residual, prime_invariance_residual(ctx, w.letters[i]));
            if (w.adjoint[i]) {
                g1.adjointInPlace();
                g2 = g2.adjoint();
            }
            if (i == 0) {
                route1 = g1;
                route2 = g2;
            } else {
                route1 = ordered_product(route1, g1);
                route2 = corner_product(route2, g2);
            }
        }
        const CMatrix assembled = route2.assemble();
        rep.p_corner_residual = std::max(rep.p_corner_residual, op_norm(route1.topLeftCorner(dF, dF) - route2.at(0, 0).matrix()));
        const CMatrix qblock = route1.bottomRightCorner((r - 1) * dF, (r - 1) * dF);
        rep.q_corner_residual = std::max(rep.q_corner_residual, op_norm(qblock - assembled.bottomRightCorner((r - 1) * dF, (r - 1) * dF)));
        // X-side operator on F_X = ℂ^k ⊗ F_Y ⊗ M̃ is qblock ⊗ I on the M̃ factor
        const CMatrix onX = kron(qblock, CMatrix::Identity(ctx.k, ctx.k));
        rep.norm_preservation = std::max(rep.norm_preservation, std::abs(op_norm(onX) - op_norm(qblock)));

        // the same word with only the η₁ slots kept: p-corner is a Y-side word
        FockOperator yword = FockOperator::identity(ctx.FY);
        CMatrix zword;
        for (std::size_t i = 0; i < w.letters.size(); ++i) {
            LinkingElement only = linking_zero(ctx, w.letters[i].n);
            only.set_slot(0, 0, w.letters[i].slot(0, 0));
            FockOperator s = shift(ctx.FY, only.n, only.slot(0, 0));
            CMatrix g = linking_shift(ctx, only);
            if (w.adjoint[i]) {
                s = s.adjoint();
                g.adjointInPlace();
            }
            yword = i == 0 ? s : yword * s;
            zword = i == 0 ? g : CMatrix(zword * g);
        }
        rep.y_slot_homomorphism = std::max(rep.y_slot_homomorphism, op_norm(zword.topLeftCorner(dF, dF) - yword.matrix()));
    }
    std::mt19937_64 rng(seed + 7);
    for (int n = 1; n <= std::min(2, ctx.N()); ++n)
        for (int w = 0; w < ctx.k; ++w) {
            CVector eta = random_cmatrix(static_cast<Eigen::Index>(ctx.dimY(n)), 1, rng);
            rep.adjoint_lemma = std::max(rep.adjoint_lemma, adjoint_lemma_residual(ctx, n, eta, w));
        }
    return rep;
}

struct IdealTransferReport {
    int degree = 0;          // m, the degree of T2
    double norm_T1 = 0.0, norm_T2 = 0.0;
    std::vector<NormEntry> dominated;  // ‖D (Q_n^X ⊗ I_M)‖
    std::vector<double> bound;         // ‖T1‖‖S Q^Y_{n+m}‖‖T2‖
    std::size_t violations = 0;
    double terminal = 0.0;             // last exact dominated value
    double y_terminal = 0.0;           // last exact ‖S Q^Y_n‖
    bool decays = false;
};

/// D = q T1 p · S · p T2 q on ℂ^k ⊗ F_Y, checked against the dominated bound.
inline IdealTransferReport ideal_transfer_check(const MoritaContext& ctx, const CornerOp& T1, const CornerOp& T2,
                                                const FockOperator& S, double tol = 1e-10) {
    std::set<int> deg;
    for (int b = 0; b < ctx.k; ++b) deg.insert(T2.at(0, b + 1).degrees().begin(), T2.at(0, b + 1).degrees().end());
    if (deg.size() != 1) throw std::invalid_argument("ideal_transfer_check: T2 must be a monomial of a single degree");
    IdealTransferReport rep;
    rep.degree = *deg.begin();
    if (rep.degree < 0) throw std::invalid_argument("ideal_transfer_check: T2 must have nonnegative degree");
    rep.norm_T1 = op_norm(T1.assemble());
    rep.norm_T2 = op_norm(T2.assemble());
    const int k = ctx.k;
    const FockPtr& F = ctx.FY;
    const Eigen::Index dF = F->total_dim();
    CMatrix D = CMatrix::Zero(k * dF, k * dF);
    std::vector<bool> exact(static_cast<std::size_t>(F->N() + 1), true);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            const FockOperator Dab = T1.at(a + 1, 0) * S * T2.at(0, b + 1);
            D.block(a * dF, b * dF, dF, dF) = Dab.matrix();
            for (std::size_t i = 0; i < exact.size(); ++i) exact[i] = exact[i] && Dab.column_exact(static_cast<int>(i));
        }
    for (int n = 0; n <= F->N(); ++n) {
        CMatrix cols(k * dF, k * F->dim(n));
        for (int b = 0; b < k; ++b) cols.middleCols(b * F->dim(n), F->dim(n)) = D.middleCols(b * dF + F->offset(n), F->dim(n));
        const bool ex = exact[static_cast<std::size_t>(n)] && n + rep.degree <= F->N() && S.column_exact(n + rep.degree);
        rep.dominated.push_back({n, op_norm(cols), ex});
        const double b = n + rep.degree <= F->N() ? rep.norm_T1 * norm_on_level(S, n + rep.degree) * rep.norm_T2 : 0.0;
        rep.bound.push_back(b);
        if (ex && rep.dominated.back().value > b + tol) ++rep.violations;
    }
    for (const auto& e : rep.dominated)
        if (e.exact) rep.terminal = e.value;
    for (int n = 0; n <= S.N(); ++n)
        if (S.column_exact(n)) rep.y_terminal = norm_on_level(S, n);
    std::vector<NormEntry> ex;
    for (const auto& e : rep.dominated)
        if (e.exact) ex.push_back(e);
    rep.decays = ex.size() >= 2 && ex.back().value < ex.front().value + tol;
    return rep;
}

inline IdealTransferReport ideal_transfer_check(const MoritaContext& ctx, const LinkingElement& t1, const LinkingElement& t2,
                                                const FockOperator& S, double tol = 1e-10) {
    return ideal_transfer_check(ctx, corner_shift(ctx, t1), corner_shift(ctx, t2), S, tol);
}

}  // namespace subprod
