// support.hpp — independent oracles and seeded generators shared by the tests.
//
// The oracles avoid the library's decompositions: eigenvalues come from a
// cyclic Jacobi sweep on the real embedding of a Hermitian matrix, singular
// values from those eigenvalues, and combinatorial counts from enumeration.

#pragma once

#include "subprod/expr.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using subprod::CMatrix;
using subprod::CVector;
using subprod::cplx;

/// Eigenvalues of a Hermitian matrix, ascending. Each eigenvalue of
/// A = B + iC appears twice in the real symmetric [[B, -C], [C, B]].
inline std::vector<double> hermitian_eigenvalues(const CMatrix& A) {
    const Eigen::Index n = A.rows();
    if (n == 0) return {};
    const Eigen::Index m = 2 * n;
    std::vector<double> a(static_cast<std::size_t>(m * m));
    auto at = [&](Eigen::Index i, Eigen::Index j) -> double& { return a[static_cast<std::size_t>(i * m + j)]; };
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const cplx z = 0.5 * (A(i, j) + std::conj(A(j, i)));
            at(i, j) = z.real();
            at(i + n, j + n) = z.real();
            at(i, j + n) = -z.imag();
            at(i + n, j) = z.imag();
        }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0, total = 0.0;
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < m; ++j) {
                total += at(i, j) * at(i, j);
                if (i != j) off += at(i, j) * at(i, j);
            }
        if (off <= 1e-30 * std::max(total, 1e-300)) break;
        for (Eigen::Index p = 0; p < m - 1; ++p)
            for (Eigen::Index q = p + 1; q < m; ++q) {
                const double apq = at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (Eigen::Index k = 0; k < m; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < m; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> all;
    for (Eigen::Index i = 0; i < m; ++i) all.push_back(at(i, i));
    std::sort(all.begin(), all.end());
    std::vector<double> out;
    for (std::size_t i = 0; i < all.size(); i += 2) out.push_back(all[i]);
    return out;
}

/// Singular values, descending.
inline std::vector<double> singular_values(const CMatrix& A) {
    if (A.size() == 0) return {};
    const CMatrix G = A.cols() <= A.rows() ? CMatrix(A.adjoint() * A) : CMatrix(A * A.adjoint());
    std::vector<double> ev = hermitian_eigenvalues(G);
    std::vector<double> out;
    for (auto it = ev.rbegin(); it != ev.rend(); ++it) out.push_back(std::sqrt(std::max(*it, 0.0)));
    return out;
}

inline double op_norm(const CMatrix& A) {
    const auto s = singular_values(A);
    return s.empty() ? 0.0 : s.front();
}

inline std::size_t rank(const CMatrix& A, double rel = 1e-8) {
    const auto s = singular_values(A);
    if (s.empty() || s.front() == 0.0) return 0;
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [&](double v) { return v > rel * s.front(); }));
}

/// Words of length n over d letters ('0', '1', …) avoiding every forbidden factor.
inline std::vector<std::string> allowed_words(int d, const std::vector<std::string>& forbidden, int n) {
    std::vector<std::string> words{""};
    for (int i = 0; i < n; ++i) {
        std::vector<std::string> next;
        for (const auto& w : words)
            for (int l = 0; l < d; ++l) next.push_back(w + static_cast<char>('0' + l));
        words = std::move(next);
    }
    std::vector<std::string> out;
    for (const auto& w : words)
        if (std::none_of(forbidden.begin(), forbidden.end(), [&](const std::string& f) { return w.find(f) != std::string::npos; }))
            out.push_back(w);
    return out;
}

/// Number of nonzero entries of the boolean n-th power of supp(P).
inline std::size_t boolean_power_popcount(const std::vector<std::vector<double>>& P, int n) {
    const std::size_t d = P.size();
    std::vector<std::vector<bool>> acc(d, std::vector<bool>(d, false));
    for (std::size_t i = 0; i < d; ++i) acc[i][i] = true;
    for (int k = 0; k < n; ++k) {
        std::vector<std::vector<bool>> next(d, std::vector<bool>(d, false));
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                for (std::size_t l = 0; l < d; ++l)
                    if (acc[i][l] && P[l][j] > 0) next[i][j] = true;
        acc = std::move(next);
    }
    std::size_t c = 0;
    for (const auto& row : acc) c += static_cast<std::size_t>(std::count(row.begin(), row.end(), true));
    return c;
}

inline std::size_t binomial(std::size_t n, std::size_t k) {
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace oracle

namespace gen {

using subprod::cplx;
using subprod::Expr;
using subprod::ExprPtr;

inline cplx random_scalar(std::mt19937_64& rng) {
    // mix short decimals with full-precision doubles so printing must round-trip
    std::uniform_int_distribution<int> kind(0, 2), small(-9, 9);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    switch (kind(rng)) {
        case 0: return {small(rng) * 0.5, small(rng) * 0.25};
        case 1: return {u(rng), 0.0};
        default: return {u(rng), u(rng) * 1e-3};
    }
}

/// Random AST over the labels of X, of depth at most `depth`.
inline ExprPtr random_expr(const subprod::SubproductSystem& X, std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> node(0, depth > 0 ? 9 : 4);
    const int top = std::min(2, X.N);
    std::uniform_int_distribution<int> lvl(0, top), plvl(0, X.N - 1), terms(1, 2), coin(0, 1);
    switch (node(rng)) {
        case 0:
        case 1: {
            const int n = lvl(rng);
            const auto& basis = X.fiber[static_cast<std::size_t>(n)];
            std::uniform_int_distribution<std::size_t> pick(0, basis.size() - 1);
            std::vector<std::pair<cplx, std::string>> fvec;
            const int t = terms(rng);
            for (int i = 0; i < t; ++i) fvec.emplace_back(coin(rng) ? cplx(1.0, 0.0) : random_scalar(rng), basis[pick(rng)].label);
            return subprod::make_shift(n, std::move(fvec));
        }
        case 2: {
            static const Expr::Kind kinds[] = {Expr::Kind::Q, Expr::Kind::R, Expr::Kind::Rp};
            std::uniform_int_distribution<int> k(0, 2);
            const Expr::Kind kind = kinds[k(rng)];
            return subprod::make_leaf(kind, kind == Expr::Kind::Rp ? plvl(rng) + 1 : plvl(rng));
        }
        case 3: return subprod::make_leaf(Expr::Kind::identity);
        case 4: return subprod::make_scalar(random_scalar(rng));
        case 5: return subprod::make_unary(Expr::Kind::adjoint, random_expr(X, rng, depth - 1));
        case 6: return subprod::make_unary(Expr::Kind::neg, random_expr(X, rng, depth - 1));
        case 7: return subprod::make_binary(Expr::Kind::add, random_expr(X, rng, depth - 1), random_expr(X, rng, depth - 1));
        case 8: return subprod::make_binary(Expr::Kind::sub, random_expr(X, rng, depth - 1), random_expr(X, rng, depth - 1));
        default: return subprod::make_binary(Expr::Kind::mul, random_expr(X, rng, depth - 1), random_expr(X, rng, depth - 1));
    }
}

inline subprod::CVector random_vector(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    subprod::CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
    return v;
}

}  // namespace gen
