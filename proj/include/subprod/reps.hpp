// reps.hpp — covariant representations on finite-dimensional graded spaces.
//
// H carries a vertex label per basis vector; σ(e_a) is the coordinate
// projection onto the vectors labelled a. T[n][κ] is T_n of the κ-th basis
// vector of X(n); T[0][a] = σ(e_a).

#pragma once

#include "subprod/expr.hpp"
#include "subprod/ideal.hpp"

#include <Eigen/Eigenvalues>

#include <limits>
#include <string>
#include <vector>

namespace subprod {

class InvalidRep : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct CovariantRep {
    SubproductSystem system;
    std::vector<int> vertex;                 // vertex of each basis vector of H
    std::vector<std::vector<CMatrix>> T;     // T[n][κ], n = 0..N
    double consistency_residual = 0.0;
    std::string witness;                     // worst word as (first letter, rest), if any

    Eigen::Index dim() const { return static_cast<Eigen::Index>(vertex.size()); }
    int N() const { return system.N; }
    const CMatrix& sigma(int a) const { return T.at(0).at(static_cast<std::size_t>(a)); }

    /// T_n(ζ) for ζ in X(n) coordinates.
    CMatrix apply(int n, const CVector& zeta) const {
        const auto& Tn = T.at(static_cast<std::size_t>(n));
        if (zeta.size() != static_cast<Eigen::Index>(Tn.size())) throw std::invalid_argument("CovariantRep::apply: wrong fiber dimension");
        CMatrix out = CMatrix::Zero(dim(), dim());
        for (std::size_t k = 0; k < Tn.size(); ++k)
            if (zeta(static_cast<Eigen::Index>(k)) != cplx(0.0, 0.0)) out += zeta(static_cast<Eigen::Index>(k)) * Tn[k];
        return out;
    }
};

inline CMatrix vertex_projection(const std::vector<int>& vertex, int a) {
    const auto n = static_cast<Eigen::Index>(vertex.size());
    CMatrix p = CMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        if (vertex[static_cast<std::size_t>(i)] == a) p(i, i) = 1.0;
    return p;
}

inline std::vector<int> contiguous_vertices(const std::vector<int>& dims) {
    std::vector<int> v;
    for (std::size_t a = 0; a < dims.size(); ++a)
        for (int i = 0; i < dims[a]; ++i) v.push_back(static_cast<int>(a));
    return v;
}

/// Max over basis vectors κ of ‖T(κ) − σ(left κ) T(κ) σ(right κ)‖.
inline double grading_residual(const std::vector<BasisVector>& basis, const std::vector<CMatrix>& ops, const std::vector<int>& vertex) {
    double worst = 0.0;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const CMatrix l = vertex_projection(vertex, basis[k].left), r = vertex_projection(vertex, basis[k].right);
        worst = std::max(worst, op_norm(ops[k] - l * ops[k] * r));
    }
    return worst;
}

/// Extend T_1 to every level through words T_1(e_{w1})⋯T_1(e_{wn}) and check that
/// the extension is well defined: the word products must vanish on ker p_n.
inline CovariantRep rep_from_generators(const SubproductSystem& X, std::vector<int> vertex, const std::vector<CMatrix>& T1,
                                        double tol = 1e-10) {
    const auto dimH = static_cast<Eigen::Index>(vertex.size());
    for (int v : vertex)
        if (v < 0 || v >= X.q()) throw InvalidRep("rep_from_generators: vertex label out of range");
    if (T1.size() != X.letters()) throw InvalidRep("rep_from_generators: need one operator per basis vector of E");
    for (const auto& t : T1)
        if (t.rows() != dimH || t.cols() != dimH) throw InvalidRep("rep_from_generators: operators must be dim(H) x dim(H)");
        else if (!all_finite(t)) throw InvalidRep("rep_from_generators: non-finite entries");
    if (const double g = grading_residual(X.E.basis, T1, vertex); g > tol)
        throw InvalidRep("rep_from_generators: T1 does not respect the vertex grading (residual " + std::to_string(g) + ")");

    CovariantRep rep;
    rep.system = X;
    rep.vertex = std::move(vertex);
    rep.T.resize(static_cast<std::size_t>(X.N + 1));
    for (int a = 0; a < X.q(); ++a) rep.T[0].push_back(vertex_projection(rep.vertex, a));

    std::vector<CMatrix> words;  // word products at the current level
    for (std::size_t l = 0; l < X.letters(); ++l) words.push_back(T1[l]);
    double worst = 0.0;
    for (int n = 1; n <= X.N; ++n) {
        if (n > 1) {
            std::vector<CMatrix> next;
            next.reserve(words.size() * X.letters());
            for (const auto& w : words)
                for (std::size_t l = 0; l < X.letters(); ++l) next.push_back(w * T1[l]);
            words = std::move(next);
        }
        const CMatrix& Jn = X.J[static_cast<std::size_t>(n)];
        auto& Tn = rep.T[static_cast<std::size_t>(n)];
        for (Eigen::Index k = 0; k < Jn.cols(); ++k) {
            CMatrix t = CMatrix::Zero(dimH, dimH);
            for (Eigen::Index w = 0; w < Jn.rows(); ++w)
                if (Jn(w, k) != cplx(0.0, 0.0)) t += Jn(w, k) * words[static_cast<std::size_t>(w)];
            Tn.push_back(std::move(t));
        }
        // T_n(J_n* e_w) must reproduce the word product
        for (std::size_t w = 0; w < words.size(); ++w) {
            if (!X.word_composable(n, w)) continue;
            CMatrix proj = CMatrix::Zero(dimH, dimH);
            for (Eigen::Index k = 0; k < Jn.cols(); ++k)
                if (Jn(static_cast<Eigen::Index>(w), k) != cplx(0.0, 0.0))
                    proj += std::conj(Jn(static_cast<Eigen::Index>(w), k)) * Tn[static_cast<std::size_t>(k)];
            const double r = op_norm(proj - words[w]);
            if (r > worst) {
                worst = r;
                const auto letters = X.word_letters(n, w);
                std::string rest;
                for (std::size_t i = 1; i < letters.size(); ++i) rest += X.E.basis[letters[i]].label;
                rep.witness = "(" + X.E.basis[letters[0]].label + ", " + (rest.empty() ? "-" : rest) + ")";
            }
        }
    }
    rep.consistency_residual = worst;
    if (worst > tol)
        throw InvalidRep("rep_from_generators: inconsistent extension, residual " + std::to_string(worst) + " at witness " +
                         rep.witness);
    return rep;
}

/// Multiplicativity over full basis sweeps: max ‖T_{n+m}(p_{n+m}(ζ⊗η)) − T_n(ζ)T_m(η)‖.
inline double multiplicativity_residual(const CovariantRep& rep, int max_level = -1) {
    const auto& X = rep.system;
    if (max_level < 0) max_level = X.N;
    double worst = 0.0;
    for (int n = 1; n <= max_level; ++n)
        for (int m = 1; n + m <= max_level; ++m)
            for (std::size_t a = 0; a < X.fiber_dim(n); ++a)
                for (std::size_t b = 0; b < X.fiber_dim(m); ++b) {
                    const CVector prod = fiber_product(X, n, m, CVector::Unit(static_cast<Eigen::Index>(X.fiber_dim(n)), static_cast<Eigen::Index>(a)),
                                                       CVector::Unit(static_cast<Eigen::Index>(X.fiber_dim(m)), static_cast<Eigen::Index>(b)));
                    const CMatrix lhs = rep.apply(n + m, prod);
                    const CMatrix rhs = rep.T[static_cast<std::size_t>(n)][a] * rep.T[static_cast<std::size_t>(m)][b];
                    worst = std::max(worst, op_norm(lhs - rhs));
                }
    return worst;
}

/// First `level` fibers of X as a system truncated there.
inline SubproductSystem truncate_system(const SubproductSystem& X, int level) {
    if (level < 1 || level > X.N) throw std::invalid_argument("truncate_system: level outside [1, N]");
    SubproductSystem Y = X;
    Y.N = level;
    Y.J.resize(static_cast<std::size_t>(level + 1));
    Y.fiber.resize(static_cast<std::size_t>(level + 1));
    if (Y.quiver) {
        Y.quiver->powers.resize(static_cast<std::size_t>(level + 1));
        Y.quiver->support_powers.resize(static_cast<std::size_t>(level + 1));
    }
    return Y;
}

/// The Fock representation T_n(ζ) = S_n(ζ) on ⊕_{k ≤ fock_level} X(k), for the
/// system X with its own (larger or equal) truncation level. T_n = 0 for n > fock_level.
inline CovariantRep fock_representation(const SubproductSystem& X, int fock_level) {
    const FockPtr f = make_fock(truncate_system(X, fock_level));
    CovariantRep rep;
    rep.system = X;
    for (int k = 0; k <= fock_level; ++k)
        for (const auto& b : X.fiber[static_cast<std::size_t>(k)]) rep.vertex.push_back(b.left);
    rep.T.resize(static_cast<std::size_t>(X.N + 1));
    for (int a = 0; a < X.q(); ++a) rep.T[0].push_back(vertex_projection(rep.vertex, a));
    for (int n = 1; n <= X.N; ++n)
        for (std::size_t k = 0; k < X.fiber_dim(n); ++k)
            rep.T[static_cast<std::size_t>(n)].push_back(n <= fock_level ? shift_basis(f, n, k).matrix()
                                                                         : CMatrix::Zero(f->total_dim(), f->total_dim()));
    return rep;
}

/// Evaluation at z ∈ ℂ^d on H = ℂ: T_1(e_i) = z_i.
inline CovariantRep evaluation_rep(const SubproductSystem& X, const CVector& z, double tol = 1e-10) {
    if (X.q() != 1 || z.size() != static_cast<Eigen::Index>(X.letters()))
        throw InvalidRep("evaluation_rep: need a scalar system and one coordinate per letter");
    std::vector<CMatrix> T1;
    for (Eigen::Index i = 0; i < z.size(); ++i) T1.push_back(CMatrix::Constant(1, 1, z(i)));
    return rep_from_generators(X, {0}, T1, tol);
}

/// Fully coisometric rank-one-per-vertex representation of a quiver system:
/// T_1(f_ij) = x √P_ji h_i/h_j E_ij with u = 1/h² the Perron vector of Pᵀ and x² = 1/ρ(P).
inline CovariantRep perron_coisometric_rep(const SubproductSystem& X, double tol = 1e-10) {
    if (!X.quiver) throw InvalidRep("perron_coisometric_rep: needs a quiver system");
    const RMatrix& P = X.quiver->P;
    const auto d = P.rows();
    Eigen::EigenSolver<RMatrix> es(P.transpose());
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < d; ++i)
        if (es.eigenvalues()(i).real() > es.eigenvalues()(best).real()) best = i;
    const double rho = es.eigenvalues()(best).real();
    Eigen::VectorXd u = es.eigenvectors().col(best).real();
    if (u.sum() < 0) u = -u;
    for (Eigen::Index i = 0; i < d; ++i)
        if (!(u(i) > 0)) throw InvalidRep("perron_coisometric_rep: Perron vector is not strictly positive");
    const double x = 1.0 / std::sqrt(rho);
    std::vector<int> vertex(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) vertex[static_cast<std::size_t>(i)] = static_cast<int>(i);
    std::vector<CMatrix> T1;
    for (const auto& e : X.E.basis) {
        CMatrix t = CMatrix::Zero(d, d);
        const double hi = 1.0 / std::sqrt(u(e.left)), hj = 1.0 / std::sqrt(u(e.right));
        t(e.left, e.right) = x * std::sqrt(P(e.right, e.left)) * hi / hj;
        T1.push_back(std::move(t));
    }
    return rep_from_generators(X, vertex, T1, tol);
}

inline CovariantRep direct_sum(const CovariantRep& a, const CovariantRep& b) {
    if (a.system.N != b.system.N || a.T.size() != b.T.size()) throw InvalidRep("direct_sum: representations of different systems");
    CovariantRep r;
    r.system = a.system;
    r.vertex = a.vertex;
    r.vertex.insert(r.vertex.end(), b.vertex.begin(), b.vertex.end());
    r.T.resize(a.T.size());
    for (std::size_t n = 0; n < a.T.size(); ++n)
        for (std::size_t k = 0; k < a.T[n].size(); ++k) {
            CMatrix m = CMatrix::Zero(a.dim() + b.dim(), a.dim() + b.dim());
            m.topLeftCorner(a.dim(), a.dim()) = a.T[n][k];
            m.bottomRightCorner(b.dim(), b.dim()) = b.T[n][k];
            r.T[n].push_back(std::move(m));
        }
    r.consistency_residual = std::max(a.consistency_residual, b.consistency_residual);
    return r;
}

// ---------------------------------------------------------------------------
// T̃_n and classification
// ---------------------------------------------------------------------------

struct TTilde {
    CMatrix T;       // X(n) ⊗_σ H → H, domain ordered as ⊕_κ H_{right κ}
    CMatrix defect;  // T̃_n T̃_n*
};

inline TTilde ttilde(const CovariantRep& rep, int n) {
    const auto& basis = rep.system.fiber.at(static_cast<std::size_t>(n));
    std::vector<std::pair<std::size_t, Eigen::Index>> cols;  // (κ, column of H)
    for (std::size_t k = 0; k < basis.size(); ++k)
        for (Eigen::Index h = 0; h < rep.dim(); ++h)
            if (rep.vertex[static_cast<std::size_t>(h)] == basis[k].right) cols.emplace_back(k, h);
    TTilde t;
    t.T = CMatrix::Zero(rep.dim(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
        t.T.col(static_cast<Eigen::Index>(c)) = rep.T[static_cast<std::size_t>(n)][cols[c].first].col(cols[c].second);
    t.defect = t.T * t.T.adjoint();
    return t;
}

/// π(R_n′) := Σ_κ T_n(e_κ) T_n(e_κ)*.
inline CMatrix represented_tail(const CovariantRep& rep, int n) {
    CMatrix out = CMatrix::Zero(rep.dim(), rep.dim());
    for (const auto& t : rep.T.at(static_cast<std::size_t>(n))) out += t * t.adjoint();
    return out;
}

struct Classification {
    bool pure = false;
    bool fully_coisometric = false;
    bool essential = false;
    std::vector<double> defect_norms;    // ‖T̃_nT̃_n*‖, n = 1..horizon
    std::vector<Eigen::Index> ranks;     // rank T̃_n, n = 1..horizon
    double coisometry_residual = 0.0;    // ‖T̃_1T̃_1* − I‖
    std::vector<double> defect_spectrum; // eigenvalues of T̃_1T̃_1*, ascending
    std::vector<double> ttilde_norms;    // ‖T̃_n‖, contractivity evidence
};

inline Classification classify(const CovariantRep& rep, int horizon = -1, double tol = 1e-10) {
    if (horizon < 0 || horizon > rep.N()) horizon = rep.N();
    Classification c;
    c.essential = true;
    for (int n = 1; n <= horizon; ++n) {
        const TTilde t = ttilde(rep, n);
        c.defect_norms.push_back(op_norm(t.defect));
        c.ttilde_norms.push_back(op_norm(t.T));
        c.ranks.push_back(numerical_rank(t.T));
        if (c.ranks.back() != rep.dim()) c.essential = false;
        if (c.defect_norms.back() <= tol) c.pure = true;
        if (n == 1) {
            c.coisometry_residual = op_norm(t.defect - CMatrix::Identity(rep.dim(), rep.dim()));
            Eigen::SelfAdjointEigenSolver<CMatrix> es(t.defect, Eigen::EigenvaluesOnly);
            for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) c.defect_spectrum.push_back(es.eigenvalues()(i));
        }
    }
    c.fully_coisometric = c.coisometry_residual <= tol;
    if (rep.dim() == 0) c.pure = c.fully_coisometric = c.essential = true;
    return c;
}

// ---------------------------------------------------------------------------
// Evaluating expressions inside a representation
// ---------------------------------------------------------------------------

inline CMatrix evaluate_in_rep(const Expr& e, const CovariantRep& rep) {
    const auto I = CMatrix::Identity(rep.dim(), rep.dim());
    auto tail = [&](int n) -> CMatrix {
        if (n > rep.N())
            throw std::invalid_argument("evaluate_in_rep: projection needs level " + std::to_string(n) + " > N = " +
                                        std::to_string(rep.N()));
        return represented_tail(rep, n);
    };
    switch (e.kind) {
        case Expr::Kind::shift: return rep.apply(e.level, fiber_vector(rep.system, e.level, e.fvec));
        case Expr::Kind::Rp: return tail(e.level);
        case Expr::Kind::Q: return tail(e.level) - tail(e.level + 1);
        case Expr::Kind::R: return I - tail(e.level + 1);
        case Expr::Kind::identity: return I;
        case Expr::Kind::scalar: return e.value * I;
        case Expr::Kind::adjoint: return evaluate_in_rep(*e.lhs, rep).adjoint();
        case Expr::Kind::neg: return -evaluate_in_rep(*e.lhs, rep);
        case Expr::Kind::add: return evaluate_in_rep(*e.lhs, rep) + evaluate_in_rep(*e.rhs, rep);
        case Expr::Kind::sub: return evaluate_in_rep(*e.lhs, rep) - evaluate_in_rep(*e.rhs, rep);
        case Expr::Kind::mul: return evaluate_in_rep(*e.lhs, rep) * evaluate_in_rep(*e.rhs, rep);
    }
    throw std::logic_error("evaluate_in_rep: unknown node");
}

struct KernelCheck {
    struct Sample {
        std::string op;
        double norm = 0.0;
    };
    std::vector<Sample> samples;
    double max_norm = 0.0;
};

/// ‖π(S)‖ for each sample; an essential representation annihilates the ideal.
inline KernelCheck kernel_ideal_check(const CovariantRep& rep, const std::vector<ExprPtr>& samples) {
    KernelCheck k;
    for (const auto& s : samples) {
        const double v = op_norm(evaluate_in_rep(*s, rep));
        k.samples.push_back({print_expr(*s), v});
        k.max_norm = std::max(k.max_norm, v);
    }
    return k;
}

// ---------------------------------------------------------------------------
// Wold decomposition
// ---------------------------------------------------------------------------

struct WoldSplit {
    CMatrix induced;      // orthonormal basis of H′
    CMatrix coisometric;  // orthonormal basis of H′^⊥
    double hypothesis_residual = 0.0;  // max_n ‖T̃_nT̃_n* − π(R_n′)‖
    double invariance_residual = 0.0;  // max over T_n(e_κ), adjoints, both subspaces
    double pure_residual = 0.0;        // min_n ‖T̃_nT̃_n*‖ restricted to H′
    double coisometric_residual = 0.0; // ‖T̃_1T̃_1* − I‖ restricted to H′^⊥
    int closure_iterations = 0;
};

class WoldHypothesisError : public std::runtime_error {
public:
    WoldHypothesisError(int n, double residual)
        : std::runtime_error("wold_decompose: hypothesis fails at n = " + std::to_string(n) + " (residual " +
                             std::to_string(residual) + ")"),
          n_(n) {}
    int level() const { return n_; }

private:
    int n_;
};

inline WoldSplit wold_decompose(const CovariantRep& rep, int horizon = -1, double tol = 1e-10) {
    if (horizon < 0 || horizon > rep.N()) horizon = rep.N();
    WoldSplit w;
    const Eigen::Index dimH = rep.dim();
    const CMatrix I = CMatrix::Identity(dimH, dimH);
    std::vector<CMatrix> tails{I};
    for (int n = 1; n <= horizon; ++n) {
        const CMatrix pi = represented_tail(rep, n);
        const double r = op_norm(ttilde(rep, n).defect - pi);
        w.hypothesis_residual = std::max(w.hypothesis_residual, r);
        if (r > tol) throw WoldHypothesisError(n, r);
        tails.push_back(pi);
    }

    CMatrix seed(dimH, 0);
    for (int n = 0; n < horizon; ++n) {
        const CMatrix Qn = tails[static_cast<std::size_t>(n)] - tails[static_cast<std::size_t>(n + 1)];
        CMatrix grown(dimH, seed.cols() + dimH);
        grown << seed, Qn;
        seed = grown;
    }
    CMatrix V = seed.cols() ? orthonormal_range(seed) : CMatrix(dimH, 0);
    if (seed.cols() && op_norm(seed) <= tol) V = CMatrix(dimH, 0);

    std::vector<CMatrix> gens;
    for (const auto& t : rep.T[1]) {
        gens.push_back(t);
        gens.push_back(t.adjoint());
    }
    for (int it = 0; it < dimH && V.cols() > 0 && V.cols() < dimH; ++it) {
        ++w.closure_iterations;
        CMatrix grown(dimH, V.cols() * static_cast<Eigen::Index>(gens.size() + 1));
        grown.leftCols(V.cols()) = V;
        for (std::size_t g = 0; g < gens.size(); ++g) grown.middleCols(V.cols() * static_cast<Eigen::Index>(g + 1), V.cols()) = gens[g] * V;
        const CMatrix next = orthonormal_range(grown);
        const bool stable = next.cols() == V.cols();
        V = next;
        if (stable) break;
    }
    w.induced = V;
    w.coisometric = orthogonal_complement(V);

    const CMatrix P = V.cols() ? CMatrix(V * V.adjoint()) : CMatrix(CMatrix::Zero(dimH, dimH));
    const CMatrix Pc = I - P;
    for (int n = 0; n <= horizon; ++n)
        for (const auto& t : rep.T[static_cast<std::size_t>(n)]) {
            w.invariance_residual = std::max({w.invariance_residual, op_norm(Pc * t * P), op_norm(Pc * t.adjoint() * P),
                                              op_norm(P * t * Pc), op_norm(P * t.adjoint() * Pc)});
        }
    w.pure_residual = 0.0;
    if (V.cols() > 0) {
        w.pure_residual = std::numeric_limits<double>::infinity();
        for (int n = 1; n <= horizon; ++n)
            w.pure_residual = std::min(w.pure_residual, op_norm(V.adjoint() * tails[static_cast<std::size_t>(n)] * V));
    }
    const CMatrix& W = w.coisometric;
    if (W.cols() > 0)
        w.coisometric_residual = op_norm(W.adjoint() * tails[1] * W - CMatrix::Identity(W.cols(), W.cols()));
    return w;
}

}  // namespace subprod
