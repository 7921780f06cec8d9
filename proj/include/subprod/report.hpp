// report.hpp — run configuration, suite orchestration and report emission.
//
// Reports are nlohmann::json objects (std::map storage, so keys come out
// sorted). Every double goes through num(), which rounds to 15 significant
// digits; together with seeded generators this makes reports byte-identical
// across runs.

#pragma once

#include "subprod/morita.hpp"
#include "subprod/reps.hpp"

#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifndef SUBPROD_VERSION
#define SUBPROD_VERSION "0.0.0"
#endif

namespace subprod {

inline constexpr const char* kVersion = SUBPROD_VERSION;

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using json = nlohmann::json;

inline double round15(double v) {
    if (!std::isfinite(v)) return v;
    if (v == 0.0) return 0.0;  // drops the sign of -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return std::strtod(buf, nullptr);
}

/// Rounded number; non-finite values become null.
inline json num(double v) {
    if (!std::isfinite(v)) return nullptr;
    return round15(v);
}

inline json num(cplx z) { return json::array({num(z.real()), num(z.imag())}); }

inline json norms_json(const std::vector<NormEntry>& v) {
    json a = json::array();
    for (const auto& e : v) a.push_back({{"n", e.n}, {"value", num(e.value)}, {"exact", e.exact}});
    return a;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ConfigError("'" + path + "' is not valid JSON (byte " + std::to_string(e.byte) + ")");
    }
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& all_suites() {
    static const std::vector<std::string> s{"axioms", "shifts", "gauge", "ideal", "sphere", "reps", "wold", "morita"};
    return s;
}

struct RunConfig {
    json raw;  // the configuration as given, embedded in reports
    SystemDescription system;
    double tol = 1e-10;
    double tol_ideal = kIdealTol;
    std::vector<std::string> suites = all_suites();
    std::string out;
    std::uint64_t seed = 1;
};

/// Either a bare system description or {"system", "N", "tol", "tol_ideal",
/// "suites", "out", "seed"}. "N" overrides the level inside "system".
inline RunConfig parse_run_config(const json& j) {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    RunConfig c;
    c.raw = j;
    if (j.contains("kind")) {
        c.system = parse_system_description(j);
        return c;
    }
    static const std::set<std::string> known{"system", "N", "tol", "tol_ideal", "suites", "out", "seed"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw ConfigError("configuration: unknown key '" + key + "'");
    if (!j.contains("system")) throw ConfigError("configuration: missing 'system'");
    json sys = j["system"];
    if (j.contains("N")) {
        if (!j["N"].is_number_integer()) throw ConfigError("configuration: 'N' must be an integer");
        if (sys.is_object()) sys["N"] = j["N"];
    }
    c.system = parse_system_description(sys);
    auto positive = [&](const char* key, double& dst) {
        if (!j.contains(key)) return;
        if (!j[key].is_number() || !(j[key].get<double>() > 0))
            throw ConfigError(std::string("configuration: '") + key + "' must be a positive number");
        dst = j[key].get<double>();
    };
    positive("tol", c.tol);
    positive("tol_ideal", c.tol_ideal);
    if (j.contains("suites")) {
        if (!j["suites"].is_array()) throw ConfigError("configuration: 'suites' must be an array of names");
        c.suites.clear();
        for (const auto& s : j["suites"]) {
            if (!s.is_string()) throw ConfigError("configuration: 'suites' must be an array of names");
            const auto name = s.get<std::string>();
            if (std::find(all_suites().begin(), all_suites().end(), name) == all_suites().end())
                throw ConfigError("configuration: unknown suite '" + name + "'");
            c.suites.push_back(name);
        }
    }
    if (j.contains("out")) {
        if (!j["out"].is_string()) throw ConfigError("configuration: 'out' must be a path string");
        c.out = j["out"].get<std::string>();
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw ConfigError("configuration: 'seed' must be a nonnegative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    return c;
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

namespace detail {

inline json finish(json r, const std::vector<std::string>& failures) {
    r["failures"] = failures;
    r["status"] = failures.empty() ? "pass" : "fail";
    return r;
}

inline json skipped(const std::string& reason) { return {{"status", "skipped"}, {"reason", reason}}; }

inline void check(std::vector<std::string>& failures, bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
}

/// Largest level L ≤ cap_level whose truncated Fock space has dimension ≤ cap_dim.
inline int level_within(const SubproductSystem& X, int cap_level, std::size_t cap_dim) {
    std::size_t total = 0;
    int L = 0;
    for (int n = 0; n <= std::min(cap_level, X.N); ++n) {
        total += X.fiber_dim(n);
        if (total > cap_dim) break;
        L = n;
    }
    return L;
}

/// A uniformly distributed point of the unit sphere of ℂ^d.
inline CVector sphere_point(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    CVector z(d);
    for (int i = 0; i < d; ++i) z(i) = cplx(g(rng), g(rng));
    return z / z.norm();
}

inline std::vector<int> dims_of(const SubproductSystem& X) {
    std::vector<int> d;
    for (auto v : X.fiber_dims()) d.push_back(static_cast<int>(v));
    return d;
}

}  // namespace detail

inline json suite_axioms(const RunConfig& c, const SubproductSystem& X) {
    std::vector<std::string> fails;
    const ValidationReport v = validate_system(X, c.tol);
    json r;
    r["dims"] = detail::dims_of(X);
    r["max_subproduct_residual"] = num(v.max_subproduct_residual);
    r["worst_pair"] = {v.worst_n, v.worst_m};
    r["max_isometry_residual"] = num(v.max_isometry_residual);
    r["faithful"] = is_faithful(X);
    json table = json::array();
    for (int n = 1; n <= X.N; ++n)
        for (int m = 1; n + m <= X.N; ++m) table.push_back({{"n", n}, {"m", m}, {"residual", num(subproduct_residual(X, n, m))}});
    r["residuals"] = table;
    detail::check(fails, v.max_subproduct_residual <= c.tol, "subproduct residual above tol");
    detail::check(fails, v.max_isometry_residual <= c.tol, "an embedding J_n is not isometric");
    return detail::finish(r, fails);
}

inline json suite_shifts(const RunConfig& c, const FockPtr& f) {
    const auto& X = f->system;
    std::vector<std::string> fails;
    json r;
    // full basis sweep of the semigroup law on exact columns
    double semigroup = 0.0;
    std::size_t pairs = 0;
    for (int n = 0; n <= X.N; ++n)
        for (int m = 0; n + m <= X.N; ++m)
            for (std::size_t a = 0; a < X.fiber_dim(n); ++a)
                for (std::size_t b = 0; b < X.fiber_dim(m); ++b) {
                    CVector z = CVector::Zero(static_cast<Eigen::Index>(X.fiber_dim(n)));
                    CVector e = CVector::Zero(static_cast<Eigen::Index>(X.fiber_dim(m)));
                    z(static_cast<Eigen::Index>(a)) = 1.0;
                    e(static_cast<Eigen::Index>(b)) = 1.0;
                    semigroup = std::max(semigroup, semigroup_residual(X, n, m, z, e));
                    ++pairs;
                }
    r["semigroup_max_residual"] = num(semigroup);
    r["semigroup_pairs"] = pairs;
    detail::check(fails, semigroup <= c.tol, "semigroup law fails on exact columns");

    // adjoint formula on seeded vectors
    std::mt19937_64 rng(c.seed);
    double adj = 0.0;
    for (int n = 1; n <= X.N; ++n)
        for (int s = 0; s < 2; ++s) {
            CVector z = random_cmatrix(static_cast<Eigen::Index>(X.fiber_dim(n)), 1, rng);
            adj = std::max(adj, adjoint_action_check(f, n, z));
        }
    r["adjoint_max_residual"] = num(adj);
    detail::check(fails, adj <= c.tol, "adjoint formula fails");

    // Σ_κ S_n(e_κ)S_n(e_κ)* = R_n′
    json tails = json::array();
    double worst = 0.0;
    for (int n = 1; n <= std::min(4, X.N); ++n) {
        const double res = exact_difference(tail_witness(f, n), tail_projection(f, n));
        worst = std::max(worst, res);
        tails.push_back({{"n", n}, {"residual", num(res)}});
    }
    r["tail_identity"] = tails;
    r["tail_identity_max_residual"] = num(worst);
    detail::check(fails, worst <= c.tol, "sum of S_n S_n* differs from the tail projection");
    return detail::finish(r, fails);
}

/// A random monomial of one degree: a product of 1..3 basis shifts or their adjoints.
inline FockOperator random_monomial(const FockPtr& f, std::mt19937_64& rng) {
    const int top = std::min(2, f->N());
    std::uniform_int_distribution<int> len(1, 3), lvl(1, top), coin(0, 1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FockOperator out = FockOperator::identity(f);
    const int L = len(rng);
    for (int i = 0; i < L; ++i) {
        const int n = lvl(rng);
        std::uniform_int_distribution<std::size_t> pick(0, f->system.fiber_dim(n) - 1);
        FockOperator s = shift_basis(f, n, pick(rng));
        if (coin(rng)) s = s.adjoint();
        out = i == 0 ? s : out * s;
    }
    return out * cplx(u(rng), u(rng));
}

inline json suite_gauge(const RunConfig& c, const FockPtr& f, std::size_t samples = 20) {
    std::vector<std::string> fails;
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    double mono = 0.0, bands = 0.0, fejer_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < samples; ++s) {
        FockOperator S = FockOperator::zero(f);
        for (int t = 0; t < 3; ++t) {
            const FockOperator M = random_monomial(f, rng);
            const int k = *M.degrees().begin();
            const cplx lambda = std::polar(1.0, angle(rng));
            mono = std::max(mono, op_norm(gauge_conjugate(M, lambda).matrix() - std::pow(lambda, k) * M.matrix()));
            S += M;
        }
        FockOperator sum = FockOperator::zero(f);
        for (int k = -f->N(); k <= f->N(); ++k) sum += spectral_component(S, k);
        bands = std::max(bands, op_norm(sum.matrix() - S.matrix()));
        const double nS = S.norm();
        for (int n = 0; n <= f->N(); ++n) fejer_excess = std::max(fejer_excess, fejer(S, n).norm() - nS);
    }
    json r;
    r["samples"] = samples;
    r["monomial_residual"] = num(mono);
    r["band_sum_residual"] = num(bands);
    r["fejer_max_excess"] = num(fejer_excess);
    detail::check(fails, mono <= std::max(c.tol, 1e-12), "gauge action does not scale monomials by lambda^k");
    detail::check(fails, bands == 0.0, "spectral components do not sum to the operator");
    detail::check(fails, fejer_excess <= 1e-10, "a Cesaro mean exceeds the operator norm");
    return detail::finish(r, fails);
}

/// Default operator sample for ideal scans, written in the expression grammar.
inline std::vector<std::string> ideal_sample_ops(const SubproductSystem& X) {
    std::vector<std::string> ops{"Q0", "I"};
    if (X.q() == 1) {
        ops.push_back("S0[1]");
        const auto& a = X.E.basis[0].label;
        ops.push_back("S1[" + a + "]*S1[" + a + "]~ - S1[" + a + "]~*S1[" + a + "]");
        if (X.letters() >= 2) {
            const auto& b = X.E.basis[1].label;
            ops.push_back("S1[" + a + "]*S1[" + b + "]~ - S1[" + b + "]~*S1[" + a + "]");
        }
    } else {
        ops.push_back("S0[" + X.fiber[0][0].label + "]");
        const auto& a = X.E.basis[0].label;
        ops.push_back("S1[" + a + "]*S1[" + a + "]~ - S1[" + a + "]~*S1[" + a + "]");
    }
    return ops;
}

inline json scan_json(const DecayReport& d) {
    json r;
    r["op"] = d.op;
    r["norms"] = norms_json(d.norms);
    r["tails"] = norms_json(d.tails);
    r["verdict"] = to_string(d.verdict);
    r["rate"] = d.rate ? num(*d.rate) : json(nullptr);
    return r;
}

inline json suite_ideal(const RunConfig& c, const FockPtr& f) {
    const auto& X = f->system;
    std::vector<std::string> fails;
    json scans = json::array();
    std::vector<std::pair<std::string, FockOperator>> ops;
    for (const auto& text : ideal_sample_ops(X)) {
        const ExprPtr e = parse_expr(text, X);
        const FockOperator S = evaluate(*e, f);
        scans.push_back(scan_json(decay_scan(S, -1, c.tol_ideal, print_expr(*e))));
        ops.emplace_back(print_expr(*e), S);
    }
    json r;
    r["scans"] = scans;
    // ‖φ_∞(1)Q_n‖ = 1 for scalar systems; Q_0 is compact
    double unit = 0.0, q0 = 0.0;
    const FockOperator one = X.q() == 1 ? left_action(f, CVector::Ones(1)) : FockOperator::identity(f);
    const FockOperator Q0 = level_projection(f, 0);
    for (int n = 0; n <= X.N; ++n) {
        unit = std::max(unit, std::abs(norm_on_level(one, n) - 1.0));
        q0 = std::max(q0, std::abs(norm_on_level(Q0, n) - (n == 0 ? 1.0 : 0.0)));
    }
    r["unit_level_norm_residual"] = num(unit);
    r["q0_residual"] = num(q0);
    detail::check(fails, unit <= c.tol, "left action of 1 does not have norm 1 on every level");
    detail::check(fails, q0 <= c.tol, "Q0 norms are not delta_{n,0}");
    const GeneratedByQnReport g = generated_by_Qn_check(f, ops, c.tol_ideal);
    json gj;
    gj["witness_residuals"] = json::array();
    for (double v : g.witness_residuals) gj["witness_residuals"].push_back(num(v));
    gj["max_witness_residual"] = num(g.max_witness_residual);
    gj["samples"] = json::array();
    for (const auto& s : g.samples)
        gj["samples"].push_back({{"op", s.op}, {"verdict", to_string(s.verdict)}, {"approximation", norms_json(s.approximation)}, {"decays", s.decays}});
    r["generated_by_Qn"] = gj;
    detail::check(fails, g.max_witness_residual <= c.tol, "tail witness differs from R_n'");
    return detail::finish(r, fails);
}

inline json sphere_json(const SphereReport& s) {
    json r;
    r["d"] = s.d;
    r["N"] = s.N;
    json a = json::array();
    for (double v : s.alpha) a.push_back(num(v));
    r["alpha"] = a;
    r["gamma"] = num(s.gamma);
    r["estimate"] = num(s.estimate.estimate);
    r["n_star"] = s.estimate.n_star;
    r["certificate"] = norms_json(s.estimate.certificate);
    r["sphere_sup"] = num(s.sphere_sup);
    r["lattice_points"] = s.lattice_points;
    r["random_points"] = s.random_points;
    r["gap"] = num(s.gap);
    return r;
}

/// Coefficient families for f(S) = Σ α_i S_1(e_i)S_1(e_i)* + γ I.
inline std::vector<std::pair<std::vector<double>, double>> sphere_families(int d) {
    std::vector<double> e1(static_cast<std::size_t>(d), 0.0), alt(static_cast<std::size_t>(d)), ones(static_cast<std::size_t>(d), 1.0);
    e1[0] = 1.0;
    for (int i = 0; i < d; ++i) alt[static_cast<std::size_t>(i)] = i % 2 ? -1.0 : 1.0;
    return {{e1, 0.0}, {alt, 0.0}, {ones, -1.0}};
}

/// The sup of the symbol bounds the quotient norm from below, and the tail
/// estimate bounds it from above; the lattice sup never exceeds the true sup.
inline json suite_sphere(const RunConfig& c, const SubproductSystem& X) {
    if (X.family != Family::symmetric) return detail::skipped("sphere comparison needs a symmetric system");
    std::vector<std::string> fails;
    json rows = json::array();
    for (const auto& [alpha, gamma] : sphere_families(X.letters())) {
        const SphereReport s = sphere_compare(static_cast<int>(X.letters()), alpha, gamma, X.N, 1000, c.seed);
        detail::check(fails, s.sphere_sup <= s.estimate.estimate + 1e-9, "tail estimate below the sphere sup");
        rows.push_back(sphere_json(s));
    }
    return detail::finish({{"comparisons", rows}}, fails);
}

inline json classification_json(const Classification& cl) {
    json r;
    r["pure"] = cl.pure;
    r["fully_coisometric"] = cl.fully_coisometric;
    r["essential"] = cl.essential;
    r["coisometry_residual"] = num(cl.coisometry_residual);
    json dn = json::array(), tn = json::array(), sp = json::array();
    for (double v : cl.defect_norms) dn.push_back(num(v));
    for (double v : cl.ttilde_norms) tn.push_back(num(v));
    for (double v : cl.defect_spectrum) sp.push_back(num(v));
    r["defect_norms"] = dn;
    r["ttilde_norms"] = tn;
    r["defect_spectrum"] = sp;
    r["ranks"] = cl.ranks;
    return r;
}

inline constexpr std::size_t kRepFockCap = 64;
inline constexpr std::size_t kMoritaFockCap = 32;

inline json suite_reps(const RunConfig& c, const SubproductSystem& X) {
    std::vector<std::string> fails;
    json r;
    const int L = detail::level_within(X, X.N - 1, kRepFockCap);
    const CovariantRep fr = fock_representation(X, L);
    const Classification fc = classify(fr, -1, c.tol);
    const double fmult = multiplicativity_residual(fr);
    r["fock"] = {{"level", L}, {"dim", fr.dim()}, {"classification", classification_json(fc)}, {"multiplicativity", num(fmult)}};
    detail::check(fails, fmult <= c.tol, "Fock representation is not multiplicative");
    detail::check(fails, fc.pure, "Fock representation is not pure");

    if (X.family == Family::symmetric || X.family == Family::product) {
        // point evaluations: on the sphere they are coisometric and kill the ideal
        std::mt19937_64 rng(c.seed);
        const int d = static_cast<int>(X.letters());
        std::vector<ExprPtr> vanishing;
        {
            std::string text;
            for (const auto& b : X.E.basis) text += "S1[" + b.label + "]*S1[" + b.label + "]~ + ";
            vanishing.push_back(parse_expr(text.substr(0, text.size() - 3) + " - I", X));
        }
        json pts = json::array();
        double norm_id = 0.0;
        for (int s = 0; s < 10; ++s) {
            const CVector z = detail::sphere_point(d, rng);
            const CovariantRep ev = evaluation_rep(X, z, c.tol);
            const Classification cl = classify(ev, -1, c.tol);
            const KernelCheck k = kernel_ideal_check(ev, vanishing);
            pts.push_back({{"fully_coisometric", cl.fully_coisometric}, {"essential", cl.essential}, {"kernel", num(k.max_norm)}});
            detail::check(fails, cl.fully_coisometric && cl.essential, "evaluation at a sphere point is not coisometric and essential");
            detail::check(fails, k.max_norm <= 1e-9, "evaluation does not annihilate a vanishing-symbol element");
        }
        // T̃_1T̃_1* = ‖z‖² at interior points, including the origin
        for (double radius : {0.0, 0.5}) {
            const CVector z = radius * detail::sphere_point(d, rng);
            const TTilde t = ttilde(evaluation_rep(X, z, c.tol), 1);
            norm_id = std::max(norm_id, std::abs(t.defect(0, 0) - cplx(z.squaredNorm(), 0.0)));
        }
        r["evaluation"] = {{"points", pts}, {"defect_identity_residual", num(norm_id)}};
        detail::check(fails, norm_id <= 1e-12, "T1~T1~* differs from |z|^2");
    }
    if (X.quiver) {
        const CovariantRep co = perron_coisometric_rep(X, c.tol);
        const Classification cl = classify(co, -1, c.tol);
        r["perron"] = {{"classification", classification_json(cl)}, {"multiplicativity", num(multiplicativity_residual(co))}};
        detail::check(fails, cl.fully_coisometric, "Perron representation is not fully coisometric");
    }
    return detail::finish(r, fails);
}

inline json wold_json(const WoldSplit& w) {
    return {{"induced_dim", w.induced.cols()},
            {"coisometric_dim", w.coisometric.cols()},
            {"hypothesis_residual", num(w.hypothesis_residual)},
            {"invariance_residual", num(w.invariance_residual)},
            {"pure_residual", num(w.pure_residual)},
            {"coisometric_residual", num(w.coisometric_residual)},
            {"closure_iterations", w.closure_iterations}};
}

/// A known direct sum (Fock ⊕ coisometric) where one is available, else the
/// Fock representation alone; the split must recover the known summands.
inline json suite_wold(const RunConfig& c, const SubproductSystem& X) {
    std::vector<std::string> fails;
    const int L = detail::level_within(X, X.N - 1, kRepFockCap / 2);
    const CovariantRep fr = fock_representation(X, L);
    CovariantRep rep = fr;
    std::string summand = "none";
    if (X.quiver) {
        rep = direct_sum(fr, perron_coisometric_rep(X, c.tol));
        summand = "perron";
    } else if (X.family == Family::symmetric || X.family == Family::product) {
        std::mt19937_64 rng(c.seed);
        rep = direct_sum(fr, evaluation_rep(X, detail::sphere_point(static_cast<int>(X.letters()), rng), c.tol));
        summand = "evaluation";
    }
    json r;
    r["coisometric_summand"] = summand;
    try {
        const WoldSplit w = wold_decompose(rep, -1, c.tol);
        CMatrix expected = CMatrix::Zero(rep.dim(), fr.dim());
        expected.topRows(fr.dim()).setIdentity();
        const double err = w.induced.cols() == fr.dim() ? subspace_distance(w.induced, expected) : 1.0;
        r["split"] = wold_json(w);
        r["induced_error"] = num(err);
        detail::check(fails, err <= 1e-8, "induced part differs from the Fock summand");
    } catch (const WoldHypothesisError& e) {
        r["hypothesis_failure"] = {{"level", e.level()}, {"message", e.what()}};
        fails.push_back("Wold hypothesis fails");
    }
    return detail::finish(r, fails);
}

inline json morita_json(const MoritaContext& ctx, std::size_t samples, std::uint64_t seed, double tol) {
    std::vector<std::string> fails;
    const ContextReport cr = check_context(ctx, samples, seed);
    const CompressionReport cc = compression_check(ctx, samples, seed);
    // T1 = q·(unit at slot (1,0)), T2 = (unit at slot (0,1))·q, S = [S_1(e_1), S_1(e_1)*]
    LinkingElement t1 = linking_zero(ctx, 0), t2 = linking_zero(ctx, 0);
    t1.set_slot(1, 0, CVector::Ones(1));
    t2.set_slot(0, 1, CVector::Ones(1));
    const FockOperator A = shift_basis(ctx.FY, 1, 0);
    const FockOperator S = A * A.adjoint() - A.adjoint() * A;
    const IdealTransferReport it = ideal_transfer_check(ctx, t1, t2, S, tol);
    json r;
    r["k"] = ctx.k;
    r["N"] = ctx.N();
    r["context"] = {{"imprimitivity_residual", num(cr.imprimitivity_residual)},
                    {"w_identity_residual", num(cr.w_identity_residual)},
                    {"composition_residual", num(cr.composition_residual)},
                    {"intertwining_residual", num(cr.intertwining_residual)},
                    {"x_subproduct_residual", num(cr.x_subproduct_residual)},
                    {"z_subproduct_residual", num(cr.z_subproduct_residual)},
                    {"dims_Y", cr.dims_Y},
                    {"dims_X", cr.dims_X},
                    {"dims_Z", cr.dims_Z},
                    {"z_dims_exact", cr.z_dims_exact}};
    r["compression"] = {{"words", cc.words},
                        {"generator_residual", num(cc.generator_residual)},
                        {"p_corner_residual", num(cc.p_corner_residual)},
                        {"q_corner_residual", num(cc.q_corner_residual)},
                        {"norm_preservation", num(cc.norm_preservation)},
                        {"y_slot_homomorphism", num(cc.y_slot_homomorphism)},
                        {"invariance_residual", num(cc.invariance_residual)},
                        {"adjoint_lemma", num(cc.adjoint_lemma)}};
    json bound = json::array();
    for (double b : it.bound) bound.push_back(num(b));
    r["transfer"] = {{"degree", it.degree},  {"dominated", norms_json(it.dominated)}, {"bound", bound},
                     {"violations", it.violations}, {"terminal", num(it.terminal)}, {"y_terminal", num(it.y_terminal)},
                     {"decays", it.decays}};
    const double comp = std::max({cc.generator_residual, cc.p_corner_residual, cc.q_corner_residual, cc.y_slot_homomorphism,
                                  cc.invariance_residual});
    detail::check(fails, comp <= tol, "compression residual above tol");
    detail::check(fails, ctx.k != 1 || (cc.generator_residual == 0.0 && cc.p_corner_residual == 0.0 && cc.q_corner_residual == 0.0),
                  "k = 1 compression residuals are not exactly 0");
    detail::check(fails, std::max({cr.imprimitivity_residual, cr.w_identity_residual, cr.composition_residual, cr.intertwining_residual,
                                   cr.x_subproduct_residual, cr.z_subproduct_residual}) <= tol,
                  "context residual above tol");
    detail::check(fails, cr.z_dims_exact, "dim Z(n) differs from (1+k)^2 dim Y(n)");
    detail::check(fails, it.violations == 0, "dominated bound violated");
    detail::check(fails, it.terminal <= 2.0 * it.y_terminal + tol, "terminal decay value above twice the Y-side value");
    return detail::finish(r, fails);
}

inline json suite_morita(const RunConfig& c, const SubproductSystem& X, std::size_t samples = 20) {
    if (X.q() != 1) return detail::skipped("the Morita context is built over a scalar-coefficient system");
    const int L = detail::level_within(X, 5, kMoritaFockCap);
    if (L < 2) return detail::skipped("fibers too large for a Morita run");
    json runs = json::array();
    std::vector<std::string> fails;
    for (int k = 1; k <= 3; ++k) {
        const MoritaContext ctx = build_context(k, truncate_system(X, L));
        json one = morita_json(ctx, samples, c.seed, c.tol);
        if (one["status"] != "pass") fails.push_back("k = " + std::to_string(k) + " failed");
        runs.push_back(std::move(one));
    }
    return detail::finish({{"level", L}, {"runs", runs}}, fails);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline json report_header(const std::string& command, const json& config) {
    return {{"command", command}, {"version", kVersion}, {"config", config}};
}

inline json system_json(const SubproductSystem& X, const SystemDescription& d) {
    json labels = json::array();
    for (const auto& lvl : X.fiber) {
        json l = json::array();
        for (const auto& b : lvl) l.push_back(b.label);
        labels.push_back(l);
    }
    return {{"description", to_json(d)}, {"family", to_string(X.family)}, {"dims", detail::dims_of(X)}, {"labels", labels},
            {"q", X.q()}, {"letters", X.letters()}};
}

/// Any suite that failed or errored makes the run fail.
inline std::string overall_status(const json& suites) {
    for (const auto& [_, s] : suites.items())
        if (s["status"] != "pass" && s["status"] != "skipped") return "fail";
    return "pass";
}

inline json run_suite(const RunConfig& c) {
    json report = report_header("verify", c.raw);
    const SubproductSystem X = build_system(c.system);
    const FockPtr f = make_fock(X);
    report["system"] = system_json(X, c.system);
    json suites = json::object();
    for (const auto& name : c.suites) {
        try {
            if (name == "axioms") suites[name] = suite_axioms(c, X);
            else if (name == "shifts") suites[name] = suite_shifts(c, f);
            else if (name == "gauge") suites[name] = suite_gauge(c, f);
            else if (name == "ideal") suites[name] = suite_ideal(c, f);
            else if (name == "sphere") suites[name] = suite_sphere(c, X);
            else if (name == "reps") suites[name] = suite_reps(c, X);
            else if (name == "wold") suites[name] = suite_wold(c, X);
            else if (name == "morita") suites[name] = suite_morita(c, X);
        } catch (const std::exception& e) {
            suites[name] = {{"status", "error"}, {"error", e.what()}};
        }
    }
    report["suites"] = suites;
    report["status"] = overall_status(suites);
    return report;
}

inline json build_report(const RunConfig& c) {
    json report = report_header("build", c.raw);
    const SubproductSystem X = build_system(c.system);
    report["system"] = system_json(X, c.system);
    json axioms = suite_axioms(c, X);
    report["status"] = axioms["status"];
    report["suites"] = {{"axioms", axioms}};
    return report;
}

inline json scan_report(const RunConfig& c, const std::string& op) {
    json report = report_header("scan", c.raw);
    const SubproductSystem X = build_system(c.system);
    const ExprPtr e = parse_expr(op, X);
    const FockOperator S = evaluate(*e, make_fock(X));
    report["scan"] = scan_json(decay_scan(S, -1, c.tol_ideal, print_expr(*e)));
    report["degrees"] = std::vector<int>(e->degrees.begin(), e->degrees.end());
    report["status"] = "pass";
    return report;
}

inline json cpnorm_report(const RunConfig& c, const std::string& op, std::optional<int> n_star) {
    json report = report_header("cpnorm", c.raw);
    const SubproductSystem X = build_system(c.system);
    const ExprPtr e = parse_expr(op, X);
    const SeminormEstimate s = cp_seminorm(evaluate(*e, make_fock(X)), n_star);
    report["op"] = print_expr(*e);
    report["estimate"] = num(s.estimate);
    report["n_star"] = s.n_star;
    report["certificate"] = norms_json(s.certificate);
    report["status"] = "pass";
    return report;
}

/// coeffs = α_1, …, α_d, γ for the system's d.
inline json sphere_report(const RunConfig& c, const std::vector<double>& coeffs, std::optional<int> n_star) {
    json report = report_header("sphere", c.raw);
    if (c.system.kind != "symmetric") throw ConfigError("sphere: the system must be symmetric");
    if (static_cast<int>(coeffs.size()) != c.system.d + 1)
        throw ConfigError("sphere: need " + std::to_string(c.system.d + 1) + " coefficients (one per letter, then gamma)");
    const std::vector<double> alpha(coeffs.begin(), coeffs.end() - 1);
    const SphereReport s = sphere_compare(c.system.d, alpha, coeffs.back(), c.system.N, 1000, c.seed, n_star);
    report["sphere"] = sphere_json(s);
    report["status"] = s.sphere_sup <= s.estimate.estimate + 1e-9 ? "pass" : "fail";
    return report;
}

/// {"system"?, "dims": [per-vertex dimension], "T1": {label: matrix}}, matrix
/// entries a number or [re, im].
inline CovariantRep parse_rep(const json& j, const SubproductSystem& X, const SystemDescription& d, double tol) {
    if (!j.is_object()) throw ConfigError("representation must be a JSON object");
    static const std::set<std::string> known{"system", "dims", "T1"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw ConfigError("representation: unknown key '" + key + "'");
    if (j.contains("system")) {
        const SystemDescription s = parse_system_description(j["system"]);
        if (to_json(s) != to_json(d)) throw ConfigError("representation: 'system' does not match the configuration");
    }
    if (!j.contains("dims") || !j["dims"].is_array() || j["dims"].size() != static_cast<std::size_t>(X.q()))
        throw ConfigError("representation: 'dims' must list one dimension per vertex");
    std::vector<int> dims;
    for (const auto& v : j["dims"]) {
        if (!v.is_number_unsigned()) throw ConfigError("representation: dimensions must be nonnegative integers");
        dims.push_back(v.get<int>());
    }
    const std::vector<int> vertex = contiguous_vertices(dims);
    const auto H = static_cast<Eigen::Index>(vertex.size());
    if (!j.contains("T1") || !j["T1"].is_object()) throw ConfigError("representation: missing object 'T1'");
    std::vector<CMatrix> T1;
    for (const auto& b : X.E.basis) {
        if (!j["T1"].contains(b.label)) throw ConfigError("representation: T1 has no entry for '" + b.label + "'");
        const json& m = j["T1"][b.label];
        if (!m.is_array() || static_cast<Eigen::Index>(m.size()) != H)
            throw ConfigError("representation: T1['" + b.label + "'] must have " + std::to_string(H) + " rows");
        CMatrix t(H, H);
        for (Eigen::Index r = 0; r < H; ++r) {
            const json& row = m[static_cast<std::size_t>(r)];
            if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != H)
                throw ConfigError("representation: T1['" + b.label + "'] must be square");
            for (Eigen::Index col = 0; col < H; ++col) {
                const json& v = row[static_cast<std::size_t>(col)];
                if (v.is_number()) t(r, col) = cplx(v.get<double>(), 0.0);
                else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
                    t(r, col) = cplx(v[0].get<double>(), v[1].get<double>());
                else throw ConfigError("representation: entries must be numbers or [re, im]");
            }
        }
        T1.push_back(std::move(t));
    }
    for (const auto& [label, _] : j["T1"].items())
        if (std::none_of(X.E.basis.begin(), X.E.basis.end(), [&](const BasisVector& b) { return b.label == label; }))
            throw ConfigError("representation: unknown label '" + label + "' in T1");
    return rep_from_generators(X, vertex, T1, tol);
}

inline json rep_report(const RunConfig& c, const json& rep_json) {
    json report = report_header("rep", c.raw);
    const SubproductSystem X = build_system(c.system);
    const CovariantRep rep = parse_rep(rep_json, X, c.system, c.tol);
    const double mult = multiplicativity_residual(rep);
    report["representation"] = rep_json;
    report["dim"] = rep.dim();
    report["consistency_residual"] = num(rep.consistency_residual);
    report["multiplicativity"] = num(mult);
    report["classification"] = classification_json(classify(rep, -1, c.tol));
    report["status"] = mult <= c.tol ? "pass" : "fail";
    return report;
}

inline json wold_report(const RunConfig& c, const json& rep_json) {
    json report = report_header("wold", c.raw);
    const SubproductSystem X = build_system(c.system);
    const CovariantRep rep = parse_rep(rep_json, X, c.system, c.tol);
    report["representation"] = rep_json;
    try {
        const WoldSplit w = wold_decompose(rep, -1, c.tol);
        report["split"] = wold_json(w);
        report["status"] = "pass";
    } catch (const WoldHypothesisError& e) {
        report["hypothesis_failure"] = {{"level", e.level()}, {"message", e.what()}};
        report["status"] = "fail";
    }
    return report;
}

/// {"k": int or [int], "system", "N", "samples", "seed"}.
inline json morita_report(const json& cfg, std::optional<std::uint64_t> seed_override, std::optional<double> tol_override) {
    if (!cfg.is_object()) throw ConfigError("morita configuration must be a JSON object");
    static const std::set<std::string> known{"k", "system", "N", "samples", "seed"};
    for (const auto& [key, _] : cfg.items())
        if (!known.count(key)) throw ConfigError("morita configuration: unknown key '" + key + "'");
    if (!cfg.contains("system")) throw ConfigError("morita configuration: missing 'system'");
    json sys = cfg["system"];
    if (cfg.contains("N")) {
        if (!cfg["N"].is_number_integer()) throw ConfigError("morita configuration: 'N' must be an integer");
        if (sys.is_object()) sys["N"] = cfg["N"];
    }
    const SystemDescription d = parse_system_description(sys);
    std::vector<int> ks{1, 2, 3};
    if (cfg.contains("k")) {
        ks.clear();
        const json kj = cfg["k"].is_array() ? cfg["k"] : json::array({cfg["k"]});
        for (const auto& k : kj) {
            if (!k.is_number_integer() || k.get<int>() < 1) throw ConfigError("morita configuration: 'k' must be positive integers");
            ks.push_back(k.get<int>());
        }
    }
    std::size_t samples = 20;
    if (cfg.contains("samples")) {
        if (!cfg["samples"].is_number_unsigned()) throw ConfigError("morita configuration: 'samples' must be a nonnegative integer");
        samples = cfg["samples"].get<std::size_t>();
    }
    std::uint64_t seed = 1;
    if (cfg.contains("seed")) {
        if (!cfg["seed"].is_number_unsigned()) throw ConfigError("morita configuration: 'seed' must be a nonnegative integer");
        seed = cfg["seed"].get<std::uint64_t>();
    }
    if (seed_override) seed = *seed_override;
    const double tol = tol_override.value_or(1e-10);
    const SubproductSystem Y = build_system(d);
    if (Y.q() != 1) throw ConfigError("morita: the system must have scalar coefficients");
    json report = report_header("morita", cfg);
    json runs = json::array();
    bool ok = true;
    for (int k : ks) {
        json one = morita_json(build_context(k, Y), samples, seed, tol);
        ok = ok && one["status"] == "pass";
        runs.push_back(std::move(one));
    }
    report["runs"] = runs;
    report["status"] = ok ? "pass" : "fail";
    return report;
}

inline json error_report(const std::string& command, const std::string& kind, const std::string& message,
                         std::optional<std::size_t> offset = std::nullopt) {
    json report = report_header(command, nullptr);
    report["status"] = "error";
    report["error"] = {{"kind", kind}, {"message", message}};
    if (offset) report["error"]["offset"] = *offset;
    return report;
}

inline int exit_code(const json& report) {
    const auto s = report.value("status", std::string("error"));
    return s == "pass" ? 0 : s == "fail" ? 1 : 2;
}

inline std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

namespace detail {

inline std::string csv_value(const json& v) {
    if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
    if (v.is_null()) return "";
    return v.dump();
}

inline void collect_csv(const json& j, const std::string& path, std::ostringstream& out) {
    if (j.is_array() && !j.empty() && j.front().is_object() && j.front().contains("n") && j.front().contains("value")) {
        for (const auto& e : j)
            out << path << ',' << e["n"].get<int>() << ',' << csv_value(e["value"]) << ',' << csv_value(e.value("exact", json(true)))
                << '\n';
        return;
    }
    if (j.is_object())
        for (const auto& [k, v] : j.items())
            if (k != "config" && k != "representation") collect_csv(v, path.empty() ? k : path + "/" + k, out);
    if (j.is_array())
        for (std::size_t i = 0; i < j.size(); ++i) collect_csv(j[i], path + "/" + std::to_string(i), out);
}

}  // namespace detail

/// Every norm table in the report as rows "table,n,value,exact".
inline std::string report_csv(const json& report) {
    std::ostringstream out;
    out << "table,n,value,exact\n";
    detail::collect_csv(report, "", out);
    return out.str();
}

}  // namespace subprod
