// systems.hpp — finite-dimensional subproduct systems over the algebra ℂ^q.
//
// A system is stored through its ambient "word spaces": level 0 is ℂ^q (one
// coordinate per vertex), level n ≥ 1 is the Kronecker power (ℂ^{dim E})^{⊗n}
// with words ordered lexicographically. Non-composable words are zero in the
// balanced tensor power E^{⊗n}; fibers X(n) never have components on them.

#pragma once

#include "subprod/linalg.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace subprod {

/// Raised for inputs outside the supported class (non-faithful, malformed).
class InvalidSystem : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Family { product, symmetric, subshift, quiver, induced };

inline std::string to_string(Family f) {
    switch (f) {
        case Family::product: return "product";
        case Family::symmetric: return "symmetric";
        case Family::subshift: return "subshift";
        case Family::quiver: return "quiver";
        case Family::induced: return "induced";
    }
    return "?";
}

/// One orthonormal basis vector of a vertex-graded correspondence. Its rigging
/// is the unit of ℂ^q at `right`; the left action of e_a fixes it iff a == left.
struct BasisVector {
    int left = 0;
    int right = 0;
    std::string label;
};

struct GradedCorrespondence {
    int q = 1;
    std::vector<BasisVector> basis;

    std::size_t total_dim() const { return basis.size(); }
    std::size_t block_dim(int a, int b) const {
        return static_cast<std::size_t>(std::count_if(basis.begin(), basis.end(),
                                                      [&](const BasisVector& v) { return v.left == a && v.right == b; }));
    }
};

struct QuiverData {
    RMatrix P;
    std::vector<Eigen::MatrixXi> support_powers;  // [n] = supp(P^n) via boolean products, n = 0..N
    std::vector<RMatrix> powers;                  // [n] = P^n
};

struct SubproductSystem {
    GradedCorrespondence E;
    int N = 0;
    std::vector<CMatrix> J;                          // J[n] : X(n) → word space n, n = 0..N
    std::vector<std::vector<BasisVector>> fiber;     // graded basis of X(n)
    Family family = Family::product;
    std::optional<QuiverData> quiver;
    std::vector<std::string> forbidden;              // subshift only

    int q() const { return E.q; }
    std::size_t letters() const { return E.total_dim(); }
    std::size_t fiber_dim(int n) const { return fiber.at(static_cast<std::size_t>(n)).size(); }
    std::vector<std::size_t> fiber_dims() const {
        std::vector<std::size_t> out;
        for (const auto& f : fiber) out.push_back(f.size());
        return out;
    }

    std::size_t word_dim(int n) const {
        if (n == 0) return static_cast<std::size_t>(q());
        std::size_t w = 1;
        for (int i = 0; i < n; ++i) w *= letters();
        return w;
    }

    /// Letters of word index w at level n ≥ 1, most significant first.
    std::vector<std::size_t> word_letters(int n, std::size_t w) const {
        std::vector<std::size_t> out(static_cast<std::size_t>(n));
        for (int i = n - 1; i >= 0; --i) {
            out[static_cast<std::size_t>(i)] = w % letters();
            w /= letters();
        }
        return out;
    }

    int word_left(int n, std::size_t w) const {
        if (n == 0) return static_cast<int>(w);
        return E.basis[word_letters(n, w).front()].left;
    }
    int word_right(int n, std::size_t w) const {
        if (n == 0) return static_cast<int>(w);
        return E.basis[word_letters(n, w).back()].right;
    }
    bool word_composable(int n, std::size_t w) const {
        if (n <= 1) return true;
        const auto l = word_letters(n, w);
        for (std::size_t i = 0; i + 1 < l.size(); ++i)
            if (E.basis[l[i]].right != E.basis[l[i + 1]].left) return false;
        return true;
    }

    std::string word_label(int n, std::size_t w) const {
        if (n == 0) return q() == 1 ? "1" : "f" + std::to_string(w + 1);
        std::string s;
        for (auto l : word_letters(n, w)) s += E.basis[l].label;
        return s;
    }

    CMatrix projection(int n) const { return projector(J.at(static_cast<std::size_t>(n))); }

    /// Index of a fiber basis label at level n, if present.
    std::optional<std::size_t> fiber_index(int n, const std::string& label) const {
        const auto& f = fiber.at(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < f.size(); ++i)
            if (f[i].label == label) return i;
        return std::nullopt;
    }
    /// Index of a word label at level n (e.g. "e1e2"), if present.
    std::optional<std::size_t> word_index(int n, const std::string& label) const {
        for (std::size_t w = 0; w < word_dim(n); ++w)
            if (word_label(n, w) == label) return w;
        return std::nullopt;
    }
};

// ---------------------------------------------------------------------------
// Tensor concatenation of word spaces.
//
// Maps rows of (word space n) ⊗ (word space m), Kronecker-ordered, into word
// space n+m. For n, m ≥ 1 this is the identity on coordinates. A level-0 factor
// is a vertex unit and acts by the balanced product: e_a ⊗ w = δ(a, left w) w.
// ---------------------------------------------------------------------------
inline CMatrix concat_rows(const SubproductSystem& X, int n, int m, const CMatrix& rows) {
    if ((n > 0 && m > 0) || X.q() == 1) return rows;
    const std::size_t wn = X.word_dim(n), wm = X.word_dim(m), wt = X.word_dim(n + m);
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(wt), rows.cols());
    for (std::size_t a = 0; a < wn; ++a)
        for (std::size_t b = 0; b < wm; ++b) {
            const auto src = static_cast<Eigen::Index>(a * wm + b);
            if (n == 0 && m == 0) {
                if (a == b) out.row(static_cast<Eigen::Index>(a)) += rows.row(src);
            } else if (n == 0) {
                if (X.word_left(m, b) == static_cast<int>(a)) out.row(static_cast<Eigen::Index>(b)) += rows.row(src);
            } else {
                if (X.word_right(n, a) == static_cast<int>(b)) out.row(static_cast<Eigen::Index>(a)) += rows.row(src);
            }
        }
    return out;
}

/// Adjoint of concat_rows: word space n+m → (word space n) ⊗ (word space m).
inline CMatrix split_rows(const SubproductSystem& X, int n, int m, const CMatrix& rows) {
    if ((n > 0 && m > 0) || X.q() == 1) return rows;
    const std::size_t wn = X.word_dim(n), wm = X.word_dim(m);
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(wn * wm), rows.cols());
    for (std::size_t a = 0; a < wn; ++a)
        for (std::size_t b = 0; b < wm; ++b) {
            const auto dst = static_cast<Eigen::Index>(a * wm + b);
            if (n == 0 && m == 0) {
                if (a == b) out.row(dst) = rows.row(static_cast<Eigen::Index>(a));
            } else if (n == 0) {
                if (X.word_left(m, b) == static_cast<int>(a)) out.row(dst) = rows.row(static_cast<Eigen::Index>(b));
            } else {
                if (X.word_right(n, a) == static_cast<int>(b)) out.row(dst) = rows.row(static_cast<Eigen::Index>(a));
            }
        }
    return out;
}

namespace detail {

inline std::string letter_label(std::size_t i) { return "e" + std::to_string(i + 1); }

inline GradedCorrespondence scalar_alphabet(int d) {
    GradedCorrespondence E;
    E.q = 1;
    for (int i = 0; i < d; ++i) E.basis.push_back({0, 0, letter_label(static_cast<std::size_t>(i))});
    return E;
}

inline std::vector<BasisVector> scalar_unit_fiber() { return {BasisVector{0, 0, "1"}}; }

inline void check_level(int d, int N, const char* who) {
    if (d < 1) throw InvalidSystem(std::string(who) + ": alphabet size must be >= 1");
    if (N < 1) throw InvalidSystem(std::string(who) + ": truncation level must be >= 1");
}

}  // namespace detail

inline SubproductSystem build_product(int d, int N) {
    detail::check_level(d, N, "build_product");
    SubproductSystem X;
    X.E = detail::scalar_alphabet(d);
    X.N = N;
    X.family = Family::product;
    X.J.push_back(CMatrix::Identity(1, 1));
    X.fiber.push_back(detail::scalar_unit_fiber());
    for (int n = 1; n <= N; ++n) {
        const auto w = static_cast<Eigen::Index>(X.word_dim(n));
        X.J.push_back(CMatrix::Identity(w, w));
        std::vector<BasisVector> f;
        for (std::size_t i = 0; i < X.word_dim(n); ++i) f.push_back({0, 0, X.word_label(n, i)});
        X.fiber.push_back(std::move(f));
    }
    return X;
}

/// (1/n!) Σ_σ U_σ on (ℂ^d)^{⊗n}.
inline CMatrix symmetrizer(int d, int n) {
    std::size_t dim = 1;
    for (int i = 0; i < n; ++i) dim *= static_cast<std::size_t>(d);
    CMatrix S = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::size_t> digits(static_cast<std::size_t>(n)), permuted(static_cast<std::size_t>(n));
    double count = 0;
    do {
        count += 1;
        for (std::size_t w = 0; w < dim; ++w) {
            std::size_t t = w;
            for (int i = n - 1; i >= 0; --i) {
                digits[static_cast<std::size_t>(i)] = t % static_cast<std::size_t>(d);
                t /= static_cast<std::size_t>(d);
            }
            std::size_t img = 0;
            for (int i = 0; i < n; ++i) img = img * static_cast<std::size_t>(d) + digits[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
            S(static_cast<Eigen::Index>(img), static_cast<Eigen::Index>(w)) += 1.0;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return S / count;
}

inline SubproductSystem build_symmetric(int d, int N) {
    detail::check_level(d, N, "build_symmetric");
    SubproductSystem X;
    X.E = detail::scalar_alphabet(d);
    X.N = N;
    X.family = Family::symmetric;
    X.J.push_back(CMatrix::Identity(1, 1));
    X.fiber.push_back(detail::scalar_unit_fiber());
    for (int n = 1; n <= N; ++n) {
        const CMatrix sym = symmetrizer(d, n);
        const CMatrix range = orthonormal_range(sym);
        // Basis: normalized symmetrizations of nondecreasing words (one per multiset).
        std::vector<Eigen::Index> reps;
        for (std::size_t w = 0; w < X.word_dim(n); ++w) {
            const auto l = X.word_letters(n, w);
            if (std::is_sorted(l.begin(), l.end())) reps.push_back(static_cast<Eigen::Index>(w));
        }
        CMatrix Jn(sym.rows(), static_cast<Eigen::Index>(reps.size()));
        std::vector<BasisVector> f;
        for (std::size_t c = 0; c < reps.size(); ++c) {
            const CVector v = sym.col(reps[c]);
            Jn.col(static_cast<Eigen::Index>(c)) = v / v.norm();
            f.push_back({0, 0, X.word_label(n, static_cast<std::size_t>(reps[c]))});
        }
        if (range.cols() != Jn.cols() || subspace_distance(range, Jn) > 1e-10)
            throw std::logic_error("build_symmetric: monomial basis does not span the symmetrizer range");
        X.J.push_back(std::move(Jn));
        X.fiber.push_back(std::move(f));
    }
    return X;
}

/// Words over [d] (as digit strings) with no factor in `forbidden`.
inline bool word_allowed(const std::string& word, const std::vector<std::string>& forbidden) {
    for (const auto& f : forbidden)
        if (!f.empty() && word.find(f) != std::string::npos) return false;
    return true;
}

inline SubproductSystem build_subshift(int d, const std::vector<std::string>& forbidden, int N) {
    detail::check_level(d, N, "build_subshift");
    if (d > 10) throw InvalidSystem("build_subshift: alphabets larger than 10 letters are not supported");
    for (const auto& f : forbidden) {
        if (f.empty()) throw InvalidSystem("build_subshift: forbidden words must be nonempty");
        for (char c : f)
            if (c < '0' || c >= static_cast<char>('0' + d))
                throw InvalidSystem("build_subshift: forbidden word '" + f + "' uses a letter outside [0," +
                                    std::to_string(d - 1) + "]");
    }
    SubproductSystem X;
    X.E = detail::scalar_alphabet(d);
    X.N = N;
    X.family = Family::subshift;
    X.forbidden = forbidden;
    X.J.push_back(CMatrix::Identity(1, 1));
    X.fiber.push_back(detail::scalar_unit_fiber());
    for (int n = 1; n <= N; ++n) {
        std::vector<Eigen::Index> allowed;
        for (std::size_t w = 0; w < X.word_dim(n); ++w) {
            std::string s;
            for (auto l : X.word_letters(n, w)) s += static_cast<char>('0' + l);
            if (word_allowed(s, forbidden)) allowed.push_back(static_cast<Eigen::Index>(w));
        }
        if (allowed.empty())
            throw InvalidSystem("build_subshift: no allowed word of length " + std::to_string(n) +
                                "; the system would not be faithful at that level");
        CMatrix Jn = CMatrix::Zero(static_cast<Eigen::Index>(X.word_dim(n)), static_cast<Eigen::Index>(allowed.size()));
        std::vector<BasisVector> f;
        for (std::size_t c = 0; c < allowed.size(); ++c) {
            Jn(allowed[c], static_cast<Eigen::Index>(c)) = 1.0;
            f.push_back({0, 0, X.word_label(n, static_cast<std::size_t>(allowed[c]))});
        }
        X.J.push_back(std::move(Jn));
        X.fiber.push_back(std::move(f));
    }
    return X;
}

/// supp(A·B) for 0/1 matrices.
inline Eigen::MatrixXi boolean_product(const Eigen::MatrixXi& a, const Eigen::MatrixXi& b) {
    Eigen::MatrixXi out = Eigen::MatrixXi::Zero(a.rows(), b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.cols(); ++j)
            for (Eigen::Index k = 0; k < a.cols(); ++k)
                if (a(i, k) && b(k, j)) {
                    out(i, j) = 1;
                    break;
                }
    return out;
}

inline QuiverData quiver_data(const RMatrix& P, int N) {
    QuiverData q;
    q.P = P;
    const auto d = P.rows();
    Eigen::MatrixXi supp1(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) supp1(i, j) = P(i, j) > 0 ? 1 : 0;
    q.support_powers.push_back(Eigen::MatrixXi::Identity(d, d));
    q.powers.push_back(RMatrix::Identity(d, d));
    for (int n = 1; n <= N; ++n) {
        q.support_powers.push_back(boolean_product(q.support_powers.back(), supp1));
        q.powers.push_back(q.powers.back() * P);
    }
    return q;
}

inline void check_quiver_matrix(const RMatrix& P) {
    if (P.rows() == 0 || P.rows() != P.cols()) throw InvalidSystem("build_quiver: P must be a nonempty square matrix");
    for (Eigen::Index i = 0; i < P.rows(); ++i)
        for (Eigen::Index j = 0; j < P.cols(); ++j)
            if (!std::isfinite(P(i, j)) || P(i, j) < 0)
                throw InvalidSystem("build_quiver: P entries must be finite and nonnegative");
    for (Eigen::Index j = 0; j < P.cols(); ++j) {
        bool positive = false;
        for (Eigen::Index i = 0; i < P.rows(); ++i) positive = positive || P(i, j) > 0;
        if (!positive)
            throw InvalidSystem("build_quiver: column " + std::to_string(j + 1) +
                                " of P is zero; the correspondence would not be faithful");
    }
}

/// Subproduct system of a nonnegative matrix, in the unit-rigging basis f_ij.
/// Edge f_ij (left vertex i, right vertex j) exists iff P_ji > 0.
inline SubproductSystem build_quiver(const RMatrix& P, int N) {
    check_quiver_matrix(P);
    if (N < 1) throw InvalidSystem("build_quiver: truncation level must be >= 1");
    const int d = static_cast<int>(P.rows());
    SubproductSystem X;
    X.family = Family::quiver;
    X.N = N;
    X.quiver = quiver_data(P, N);
    X.E.q = d;
    auto fl = [](int i, int j) { return "f" + std::to_string(i + 1) + std::to_string(j + 1); };
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (P(j, i) > 0) X.E.basis.push_back({i, j, fl(i, j)});

    X.J.push_back(CMatrix::Identity(d, d));
    std::vector<BasisVector> f0;
    for (int a = 0; a < d; ++a) f0.push_back({a, a, "f" + std::to_string(a + 1)});
    X.fiber.push_back(std::move(f0));

    const auto& qd = *X.quiver;
    for (int n = 1; n <= N; ++n) {
        const Eigen::MatrixXi& supp = qd.support_powers[static_cast<std::size_t>(n)];
        const RMatrix& Pn = qd.powers[static_cast<std::size_t>(n)];
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (supp(j, i)) pairs.emplace_back(i, j);
        CMatrix Jn = CMatrix::Zero(static_cast<Eigen::Index>(X.word_dim(n)), static_cast<Eigen::Index>(pairs.size()));
        std::map<std::pair<int, int>, Eigen::Index> col;
        for (std::size_t c = 0; c < pairs.size(); ++c) col[pairs[c]] = static_cast<Eigen::Index>(c);
        for (std::size_t w = 0; w < X.word_dim(n); ++w) {
            if (!X.word_composable(n, w)) continue;
            double weight = 1.0;
            for (auto l : X.word_letters(n, w)) {
                const auto& e = X.E.basis[l];
                weight *= P(e.right, e.left);
            }
            const int i = X.word_left(n, w), j = X.word_right(n, w);
            Jn(static_cast<Eigen::Index>(w), col.at({i, j})) = std::sqrt(weight / Pn(j, i));
        }
        std::vector<BasisVector> f;
        for (auto [i, j] : pairs) f.push_back({i, j, fl(i, j)});
        X.J.push_back(std::move(Jn));
        X.fiber.push_back(std::move(f));
    }
    return X;
}

/// Replace J_n by J_n U_n for n ≥ 2 (isometric re-choice of fiber bases).
inline SubproductSystem rebase(SubproductSystem X, const std::vector<CMatrix>& unitaries) {
    for (std::size_t n = 2; n < X.J.size() && n < unitaries.size(); ++n)
        if (unitaries[n].size() > 0) {
            if (X.q() != 1) throw InvalidSystem("rebase: only scalar-coefficient systems can mix basis vectors");
            X.J[n] = X.J[n] * unitaries[n];
            for (std::size_t c = 0; c < X.fiber[n].size(); ++c) X.fiber[n][c].label = "b" + std::to_string(c);
        }
    return X;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct AxiomFailure {
    int n = 0;
    int m = 0;
    double residual = 0.0;
};

struct ValidationReport {
    double max_subproduct_residual = 0.0;
    int worst_n = 0, worst_m = 0;
    double max_isometry_residual = 0.0;
    int worst_isometry_level = 0;
    std::vector<AxiomFailure> failures;  // subproduct violations above tol (n, m), isometry ones as (n, 0)
    bool pass = true;
};

/// ‖(p_n ⊗ p_m) p_{n+m} − p_{n+m}‖, computed as ‖(K K* − I) J_{n+m}‖ with K = J_n ⊗ J_m.
inline double subproduct_residual(const SubproductSystem& X, int n, int m) {
    const CMatrix& Jt = X.J.at(static_cast<std::size_t>(n + m));
    if (Jt.cols() == 0) return 0.0;
    const CMatrix K = concat_rows(X, n, m, kron(X.J.at(static_cast<std::size_t>(n)), X.J.at(static_cast<std::size_t>(m))));
    return op_norm(K * (K.adjoint() * Jt) - Jt);
}

inline ValidationReport validate_system(const SubproductSystem& X, double tol = 1e-10) {
    ValidationReport r;
    for (int n = 0; n <= X.N; ++n) {
        const double iso = isometry_residual(X.J[static_cast<std::size_t>(n)]);
        if (iso > r.max_isometry_residual) {
            r.max_isometry_residual = iso;
            r.worst_isometry_level = n;
        }
        if (iso > tol) r.failures.push_back({n, 0, iso});
    }
    for (int n = 1; n <= X.N; ++n)
        for (int m = 1; n + m <= X.N; ++m) {
            const double res = subproduct_residual(X, n, m);
            if (res > r.max_subproduct_residual) {
                r.max_subproduct_residual = res;
                r.worst_n = n;
                r.worst_m = m;
            }
            if (res > tol) r.failures.push_back({n, m, res});
        }
    r.pass = r.max_subproduct_residual <= tol && r.max_isometry_residual <= tol;
    return r;
}

/// Every vertex unit acts nontrivially on each fiber X(n), n ≥ 1.
inline bool is_faithful(const SubproductSystem& X) {
    for (int n = 1; n <= X.N; ++n)
        for (int a = 0; a < X.q(); ++a) {
            const auto& f = X.fiber[static_cast<std::size_t>(n)];
            if (std::none_of(f.begin(), f.end(), [&](const BasisVector& v) { return v.left == a; })) return false;
        }
    return true;
}

// ---------------------------------------------------------------------------
// JSON system description
// ---------------------------------------------------------------------------

struct SystemDescription {
    std::string kind;
    int d = 0;
    int N = 0;
    std::vector<std::string> forbidden;
    std::vector<std::vector<double>> P;
};

inline int default_level(const std::string& kind, int d) {
    if (kind == "quiver") return 6;
    if (d <= 2) return 8;
    if (d == 3) return 6;
    return 4;
}

inline SystemDescription parse_system_description(const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidSystem("system description must be a JSON object");
    static const std::set<std::string> known{"kind", "d", "N", "forbidden", "P"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw InvalidSystem("system description: unknown key '" + key + "'");
    SystemDescription s;
    if (!j.contains("kind") || !j["kind"].is_string()) throw InvalidSystem("system description: missing string 'kind'");
    s.kind = j["kind"].get<std::string>();
    static const std::set<std::string> kinds{"product", "symmetric", "subshift", "quiver"};
    if (!kinds.count(s.kind)) throw InvalidSystem("system description: unknown kind '" + s.kind + "'");
    if (j.contains("P")) {
        if (!j["P"].is_array()) throw InvalidSystem("system description: 'P' must be an array of rows");
        for (const auto& row : j["P"]) {
            if (!row.is_array()) throw InvalidSystem("system description: 'P' must be an array of rows");
            std::vector<double> r;
            for (const auto& v : row) {
                if (!v.is_number()) throw InvalidSystem("system description: 'P' entries must be numbers");
                r.push_back(v.get<double>());
            }
            s.P.push_back(std::move(r));
        }
    }
    if (j.contains("d")) {
        if (!j["d"].is_number_integer()) throw InvalidSystem("system description: 'd' must be an integer");
        s.d = j["d"].get<int>();
    } else if (s.kind == "quiver") {
        s.d = static_cast<int>(s.P.size());
    } else {
        throw InvalidSystem("system description: missing 'd'");
    }
    if (j.contains("N")) {
        if (!j["N"].is_number_integer()) throw InvalidSystem("system description: 'N' must be an integer");
        s.N = j["N"].get<int>();
    } else {
        s.N = default_level(s.kind, s.d);
    }
    if (j.contains("forbidden")) {
        if (!j["forbidden"].is_array()) throw InvalidSystem("system description: 'forbidden' must be an array");
        for (const auto& w : j["forbidden"]) {
            if (!w.is_string()) throw InvalidSystem("system description: forbidden words must be strings");
            s.forbidden.push_back(w.get<std::string>());
        }
    }
    if (s.kind == "quiver" && s.P.empty()) throw InvalidSystem("system description: quiver requires 'P'");
    if (s.kind != "quiver" && !s.P.empty()) throw InvalidSystem("system description: 'P' only applies to quivers");
    if (s.kind != "subshift" && !s.forbidden.empty())
        throw InvalidSystem("system description: 'forbidden' only applies to subshifts");
    return s;
}

inline nlohmann::json to_json(const SystemDescription& s) {
    nlohmann::json j;
    j["kind"] = s.kind;
    j["d"] = s.d;
    j["N"] = s.N;
    if (s.kind == "subshift") j["forbidden"] = s.forbidden;
    if (s.kind == "quiver") j["P"] = s.P;
    return j;
}

inline SubproductSystem build_system(const SystemDescription& s) {
    if (s.kind == "product") return build_product(s.d, s.N);
    if (s.kind == "symmetric") return build_symmetric(s.d, s.N);
    if (s.kind == "subshift") return build_subshift(s.d, s.forbidden, s.N);
    if (s.kind == "quiver") {
        const auto d = static_cast<Eigen::Index>(s.P.size());
        RMatrix P(d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
            if (static_cast<Eigen::Index>(s.P[static_cast<std::size_t>(i)].size()) != d)
                throw InvalidSystem("build_quiver: P must be square");
            for (Eigen::Index j = 0; j < d; ++j) P(i, j) = s.P[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        if (s.d != d) throw InvalidSystem("system description: 'd' does not match the size of 'P'");
        return build_quiver(P, s.N);
    }
    throw InvalidSystem("unknown system kind '" + s.kind + "'");
}

}  // namespace subprod
