// ideal.hpp — finite-scale diagnostics for the ideal {S : ‖S Q_n‖ → 0}.
//
// Nothing here decides a limit. Scans report the norm sequences on exact
// columns together with a verdict heuristic; the sequences are the evidence.

#pragma once

#include "subprod/fock.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace subprod {

inline constexpr double kIdealTol = 1e-6;

enum class Verdict { in_ideal, not_in_ideal, inconclusive };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::in_ideal: return "in_ideal";
        case Verdict::not_in_ideal: return "not_in_ideal";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

struct NormEntry {
    int n = 0;
    double value = 0.0;
    bool exact = false;
};

struct DecayReport {
    std::string op;
    std::vector<NormEntry> norms;  // ‖S Q_n‖
    std::vector<NormEntry> tails;  // ‖S R_n′‖ over exact columns of levels ≥ n
    Verdict verdict = Verdict::inconclusive;
    std::optional<double> rate;    // power-law exponent fitted to the last exact points
};

/// Least-squares slope of log(value) against log(n+1), negated. Needs two
/// positive points.
inline std::optional<double> fit_decay_rate(const std::vector<NormEntry>& pts) {
    std::vector<std::pair<double, double>> xy;
    for (const auto& p : pts)
        if (p.value > 0) xy.emplace_back(std::log(p.n + 1.0), std::log(p.value));
    if (xy.size() < 2) return std::nullopt;
    double mx = 0, my = 0;
    for (auto [x, y] : xy) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(xy.size());
    my /= static_cast<double>(xy.size());
    double sxx = 0, sxy = 0;
    for (auto [x, y] : xy) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (sxx == 0) return std::nullopt;
    return -sxy / sxx;
}

inline constexpr std::size_t kTrendWindow = 4;
inline constexpr double kMinDecayRate = 0.5;
inline constexpr double kPlateauRate = 0.05;

/// in_ideal: last exact value ≤ tol, or the last exact points strictly decrease
/// with fitted rate ≥ kMinDecayRate. not_in_ideal: the window stays ≥ 10·tol and
/// is flat. Anything else is inconclusive.
inline Verdict decide(const std::vector<NormEntry>& norms, double tol, std::optional<double>& rate) {
    std::vector<NormEntry> exact;
    for (const auto& e : norms)
        if (e.exact) exact.push_back(e);
    if (exact.empty()) throw std::invalid_argument("decay_scan: no exact columns; raise the truncation level N");
    const std::size_t w = std::min(kTrendWindow, exact.size());
    const std::vector<NormEntry> window(exact.end() - static_cast<std::ptrdiff_t>(w), exact.end());
    rate = fit_decay_rate(window);
    if (window.back().value <= tol) return Verdict::in_ideal;
    bool decreasing = w >= 2;
    for (std::size_t i = 1; i < w; ++i) decreasing = decreasing && window[i].value < window[i - 1].value;
    if (decreasing && rate && *rate >= kMinDecayRate) return Verdict::in_ideal;
    double lo = window.front().value;
    for (const auto& e : window) lo = std::min(lo, e.value);
    if (lo >= 10 * tol && (!rate || *rate < kPlateauRate)) return Verdict::not_in_ideal;
    return Verdict::inconclusive;
}

inline DecayReport decay_scan(const FockOperator& S, int n_max = -1, double tol = kIdealTol, std::string op = {}) {
    if (n_max < 0 || n_max > S.N()) n_max = S.N();
    DecayReport r;
    r.op = std::move(op);
    for (int n = 0; n <= n_max; ++n) {
        r.norms.push_back({n, norm_on_level(S, n), S.column_exact(n)});
        r.tails.push_back({n, tail_norm_exact(S, n), S.column_exact(n)});
    }
    r.verdict = decide(r.norms, tol, r.rate);
    return r;
}

struct SeminormEstimate {
    double estimate = 0.0;
    int n_star = -1;
    std::vector<NormEntry> certificate;  // the tail sequence up to n_star
};

/// ‖S R′_{n*}‖ at the largest exact n* (or the requested one). An upper-bound
/// estimator of the quotient norm.
inline SeminormEstimate cp_seminorm(const FockOperator& S, std::optional<int> n_star = std::nullopt) {
    SeminormEstimate out;
    const int last = S.last_exact();
    if (last < 0) throw std::invalid_argument("cp_seminorm: no exact columns; raise the truncation level N");
    int ns = n_star.value_or(last);
    if (ns < 0 || ns > S.N()) throw std::invalid_argument("cp_seminorm: n* outside [0, N]");
    if (!S.column_exact(ns)) throw std::invalid_argument("cp_seminorm: column " + std::to_string(ns) + " is not exact");
    for (int n = 0; n <= ns; ++n) out.certificate.push_back({n, tail_norm_exact(S, n), S.column_exact(n)});
    out.n_star = ns;
    out.estimate = out.certificate.back().value;
    return out;
}

// ---------------------------------------------------------------------------
// Sphere comparison for f(S) = Σ α_i S_1(e_i)S_1(e_i)* + γ I on symmetric systems
// ---------------------------------------------------------------------------

inline FockOperator diagonal_polynomial(const FockPtr& f, const std::vector<double>& alpha, double gamma) {
    const auto d = static_cast<std::size_t>(f->system.letters());
    if (f->system.q() != 1 || alpha.size() != d)
        throw std::invalid_argument("diagonal_polynomial: need one coefficient per letter of a scalar system");
    FockOperator out = FockOperator::identity(f) * cplx(gamma, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        const FockOperator s = shift_basis(f, 1, i);
        out += (s * s.adjoint()) * cplx(alpha[i], 0.0);
    }
    return out;
}

/// |Σ α_i t_i + γ| with t_i = |z_i|².
inline double sphere_symbol(const std::vector<double>& alpha, double gamma, const std::vector<double>& moduli_sq) {
    double v = gamma;
    for (std::size_t i = 0; i < alpha.size(); ++i) v += alpha[i] * moduli_sq[i];
    return std::abs(v);
}

struct SphereReport {
    int d = 0;
    int N = 0;
    std::vector<double> alpha;
    double gamma = 0.0;
    SeminormEstimate estimate;
    double sphere_sup = 0.0;
    std::size_t lattice_points = 0;
    std::size_t random_points = 0;
    double gap = 0.0;
};

/// Sup of the symbol over ∂B_d. The symbol only depends on (|z_1|²,…,|z_d|²),
/// a point of the standard simplex, so a simplex lattice is exhaustive up to
/// its spacing; seeded random sphere points are added on top.
inline double sphere_sup(const std::vector<double>& alpha, double gamma, std::size_t random_points, std::uint64_t seed,
                         std::size_t* lattice_count = nullptr) {
    const std::size_t d = alpha.size();
    int L = 1;
    auto count = [&](int l) {
        double c = 1;
        for (std::size_t i = 1; i < d; ++i) c = c * (l + static_cast<double>(i)) / static_cast<double>(i);
        return c;
    };
    while (L < 256 && count(L * 2) <= 4096) L *= 2;
    double best = 0.0;
    std::size_t visited = 0;
    std::vector<int> parts(d, 0);
    // enumerate compositions of L into d nonnegative parts
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
        if (i + 1 == d) {
            parts[i] = left;
            std::vector<double> t(d);
            for (std::size_t j = 0; j < d; ++j) t[j] = static_cast<double>(parts[j]) / L;
            best = std::max(best, sphere_symbol(alpha, gamma, t));
            ++visited;
            return;
        }
        for (int p = 0; p <= left; ++p) {
            parts[i] = p;
            rec(i + 1, left - p);
        }
    };
    if (d > 0) rec(0, L);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    for (std::size_t s = 0; s < random_points; ++s) {
        std::vector<double> t(d);
        double tot = 0;
        for (auto& x : t) {
            const double re = g(rng), im = g(rng);
            x = re * re + im * im;
            tot += x;
        }
        for (auto& x : t) x /= tot;
        best = std::max(best, sphere_symbol(alpha, gamma, t));
    }
    if (lattice_count) *lattice_count = visited;
    return best;
}

inline SphereReport sphere_compare(int d, const std::vector<double>& alpha, double gamma, int N,
                                   std::size_t samples = 1000, std::uint64_t seed = 1,
                                   std::optional<int> n_star = std::nullopt) {
    if (static_cast<int>(alpha.size()) != d) throw std::invalid_argument("sphere_compare: need d coefficients plus gamma");
    SphereReport r;
    r.d = d;
    r.N = N;
    r.alpha = alpha;
    r.gamma = gamma;
    const FockPtr f = make_fock(build_symmetric(d, N));
    r.estimate = cp_seminorm(diagonal_polynomial(f, alpha, gamma), n_star);
    r.random_points = samples;
    r.sphere_sup = sphere_sup(alpha, gamma, samples, seed, &r.lattice_points);
    r.gap = std::abs(r.estimate.estimate - r.sphere_sup);
    return r;
}

// ---------------------------------------------------------------------------
// Approximation by the ideal generated by the level projections
// ---------------------------------------------------------------------------

/// Σ_κ S_n(e_κ) S_n(e_κ)* over the fiber basis of X(n).
inline FockOperator tail_witness(const FockPtr& f, int n) {
    const Eigen::Index D = f->total_dim();
    // S_n(e_κ) vanishes on the columns of levels above N − n
    const Eigen::Index live = f->offset(std::max(f->N() - n + 1, 0));
    CMatrix acc = CMatrix::Zero(D, D);
    std::vector<bool> ex = all_exact(f);
    for (std::size_t k = 0; k < f->system.fiber_dim(n); ++k) {
        const FockOperator s = shift_basis(f, n, k);
        if (k == 0) ex = FockOperator::product_exactness(s, s.adjoint());
        acc.noalias() += s.matrix().leftCols(live) * s.matrix().leftCols(live).adjoint();
    }
    return {f, std::move(acc), std::move(ex), {0}};
}

struct GeneratedByQnReport {
    bool applicable = true;
    std::string reason;
    std::vector<double> witness_residuals;  // [n-1] = ‖witness(n) − R_n′‖, n = 1..N
    double max_witness_residual = 0.0;
    struct Sample {
        std::string op;
        Verdict verdict = Verdict::inconclusive;
        std::vector<NormEntry> approximation;  // (m, ‖S − S R_m‖) with R_m = I − witness(m+1)
        bool decays = false;
    };
    std::vector<Sample> samples;
};

inline GeneratedByQnReport generated_by_Qn_check(const FockPtr& f, const std::vector<std::pair<std::string, FockOperator>>& ops,
                                                 double tol = kIdealTol) {
    GeneratedByQnReport r;
    // Every builder here has finite-dimensional fibers, so the witness always exists.
    std::vector<FockOperator> witness;
    for (int n = 1; n <= f->N(); ++n) {
        witness.push_back(tail_witness(f, n));
        const double res = exact_difference(witness.back(), tail_projection(f, n));
        r.witness_residuals.push_back(res);
        r.max_witness_residual = std::max(r.max_witness_residual, res);
    }
    for (const auto& [name, S] : ops) {
        GeneratedByQnReport::Sample s;
        s.op = name;
        s.verdict = decay_scan(S, -1, tol).verdict;
        if (s.verdict == Verdict::in_ideal) {
            for (int m = 0; m + 1 <= f->N(); ++m) {
                const FockOperator Rm = FockOperator::identity(f) - witness[static_cast<std::size_t>(m)];
                const FockOperator diff = S - S * Rm;
                if (diff.last_exact() < 0) break;
                s.approximation.push_back({m, tail_norm_exact(diff, 0), S.column_exact(m + 1)});
            }
            std::vector<NormEntry> ex;
            for (const auto& e : s.approximation)
                if (e.exact) ex.push_back(e);
            s.decays = !ex.empty();
            for (std::size_t i = 1; i < ex.size(); ++i) s.decays = s.decays && ex[i].value <= ex[i - 1].value + 1e-12;
        }
        r.samples.push_back(std::move(s));
    }
    return r;
}

}  // namespace subprod
