#include "catch_amalgamated.hpp"

#include "support.hpp"

#include "subprod/ideal.hpp"

#include <random>

using namespace subprod;

namespace {

FockOperator eval(const std::string& text, const FockPtr& f) { return evaluate(*parse_expr(text, f->system), f); }

/// ‖[S_1(e_1), S_1(e_2)*] Q_n‖ on the symmetric Fock space in two letters.
/// On the normalised monomial basis |a,b⟩ of level n the commutator sends
/// |a,b⟩ to √(b(a+1))/(n(n+1)) |a+1,b−1⟩, injectively, so the norm is the
/// largest coefficient.
double commutator_norm_oracle(int n) {
    if (n == 0) return 0.0;
    double best = 0.0;
    for (int b = 0; b <= n; ++b) best = std::max(best, std::sqrt(static_cast<double>(b) * (n - b + 1)) / (n * (n + 1.0)));
    return best;
}

std::vector<NormEntry> entries(const std::vector<double>& v) {
    std::vector<NormEntry> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back({static_cast<int>(i), v[i], true});
    return out;
}

}  // namespace

TEST_CASE("unit of the product system has norm one on every level", "[ideal]") {
    const FockPtr f = make_fock(build_product(2, 8));
    const FockOperator one = left_action(f, CVector::Ones(1));
    for (int n = 0; n <= 8; ++n) CHECK(std::abs(norm_on_level(one, n) - 1.0) <= 1e-12);
    CHECK(decay_scan(one).verdict == Verdict::not_in_ideal);
}

TEST_CASE("commutator decay on the two-letter symmetric system", "[ideal][oracle]") {
    const FockPtr f = make_fock(build_symmetric(2, 8));
    const FockOperator C = eval("S1[e1]*S1[e2]~ - S1[e2]~*S1[e1]", f);
    const DecayReport r = decay_scan(C);
    for (const auto& e : r.norms) {
        if (!e.exact) continue;
        INFO("level " << e.n);
        CHECK(std::abs(e.value - commutator_norm_oracle(e.n)) <= 1e-12);
    }
    for (int n = 3; n <= 7; ++n) CHECK(r.norms[static_cast<std::size_t>(n)].value < r.norms[static_cast<std::size_t>(n - 1)].value);
    CHECK(r.norms[7].exact);
    CHECK_FALSE(r.norms[8].exact);
    CHECK(r.norms[7].value <= 0.2);
    CHECK(r.verdict == Verdict::in_ideal);
}

TEST_CASE("one-letter commutator is minus the vacuum projection", "[ideal]") {
    const FockPtr f = make_fock(build_symmetric(1, 6));
    const FockOperator C = eval("S1[e1]*S1[e1]~ - S1[e1]~*S1[e1]", f);
    for (int n = 0; n <= 5; ++n) {
        REQUIRE(C.column_exact(n));
        CHECK(std::abs(norm_on_level(C, n) - (n == 0 ? 1.0 : 0.0)) <= 1e-15);
    }
    CHECK(exact_difference(C, eval("-Q0", f)) == 0.0);
    CHECK(decay_scan(C).verdict == Verdict::in_ideal);
}

TEST_CASE("decay verdict rules", "[ideal]") {
    std::optional<double> rate;
    CHECK(decide(entries({1, 0.5, 0, 0, 0}), 1e-6, rate) == Verdict::in_ideal);
    CHECK(decide(entries({1, 1, 1, 1, 1}), 1e-6, rate) == Verdict::not_in_ideal);
    CHECK(*rate == 0.0);
    CHECK(decide(entries({1, 0.5, 1.0 / 3, 0.25, 0.2}), 1e-6, rate) == Verdict::in_ideal);
    CHECK(std::abs(*rate - 1.0) < 1e-12);
    CHECK(decide(entries({1, 0.5, 0.6, 0.3, 0.35}), 1e-6, rate) == Verdict::inconclusive);
    // slow monotone decay below the rate threshold
    std::vector<double> slow;
    for (int n = 0; n < 5; ++n) slow.push_back(std::pow(n + 1.0, -0.2));
    CHECK(decide(entries(slow), 1e-6, rate) == Verdict::inconclusive);
    std::vector<NormEntry> none{{0, 1.0, false}};
    CHECK_THROWS_AS(decide(none, 1e-6, rate), std::invalid_argument);
    // inexact entries are ignored
    auto mixed = entries({1, 1, 1, 1});
    mixed.push_back({4, 0.0, false});
    CHECK(decide(mixed, 1e-6, rate) == Verdict::not_in_ideal);
}

TEST_CASE("decay rate of exact power laws", "[ideal][property]") {
    for (double p : {0.5, 1.0, 2.0, 3.5}) {
        std::vector<NormEntry> pts;
        for (int n = 0; n < 6; ++n) pts.push_back({n, std::pow(n + 1.0, -p), true});
        CHECK(std::abs(*fit_decay_rate(pts) - p) < 1e-12);
    }
    CHECK_FALSE(fit_decay_rate({{0, 1.0, true}}).has_value());
}

TEST_CASE("level and tail projections in the ideal", "[ideal]") {
    const FockPtr f = make_fock(build_subshift(2, {"11"}, 7));
    CHECK(decay_scan(eval("Q0", f)).verdict == Verdict::in_ideal);
    CHECK(decay_scan(eval("R2", f)).verdict == Verdict::in_ideal);
    CHECK(decay_scan(eval("I", f)).verdict == Verdict::not_in_ideal);
    CHECK(decay_scan(eval("Rp3", f)).verdict == Verdict::not_in_ideal);
}

TEST_CASE("tail seminorm certificate is non-increasing", "[ideal][property]") {
    const auto X = build_symmetric(2, 6);
    const FockPtr f = make_fock(X);
    std::mt19937_64 rng(77);
    for (int s = 0; s < 30; ++s) {
        const FockOperator S = evaluate(*gen::random_expr(X, rng, 3), f);
        if (S.last_exact() < 0) continue;
        const SeminormEstimate e = cp_seminorm(S);
        CHECK(e.n_star == S.last_exact());
        CHECK(e.estimate <= S.norm() + 1e-10);
        for (std::size_t i = 1; i < e.certificate.size(); ++i) CHECK(e.certificate[i].value <= e.certificate[i - 1].value + 1e-12);
    }
    const FockOperator S1 = shift_basis(f, 1, 0);
    CHECK_THROWS_AS(cp_seminorm(S1, 6), std::invalid_argument);
    CHECK_THROWS_AS(cp_seminorm(S1, -1), std::invalid_argument);
    CHECK(cp_seminorm(S1, 2).n_star == 2);
}

TEST_CASE("sphere supremum matches the simplex vertices", "[ideal][sphere][oracle]") {
    // the symbol is |affine| on the simplex, so the sup sits at a vertex
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int d = 1; d <= 4; ++d)
        for (int s = 0; s < 10; ++s) {
            std::vector<double> alpha(static_cast<std::size_t>(d));
            for (auto& a : alpha) a = u(rng);
            const double gamma = u(rng);
            double want = 0;
            for (double a : alpha) want = std::max(want, std::abs(a + gamma));
            CHECK(std::abs(sphere_sup(alpha, gamma, 50, 3) - want) <= 1e-12);
        }
}

TEST_CASE("quotient-norm estimate against the sphere symbol", "[ideal][sphere]") {
    const std::vector<std::pair<std::vector<double>, double>> families{{{1, 0}, 0}, {{1, -1}, 0}, {{1, 1}, -1}};
    for (const auto& [alpha, gamma] : families) {
        const SphereReport r = sphere_compare(2, alpha, gamma, 8, 1000, 1, 7);
        INFO(alpha[0] << "," << alpha[1] << "," << gamma);
        CHECK(r.estimate.n_star == 7);
        CHECK(r.gap <= 0.1);
    }
    CHECK(sphere_compare(2, {1, 1}, -1, 8, 1000, 1, 7).estimate.estimate <= 0.05);
    CHECK_THROWS_AS(sphere_compare(2, {1}, 0, 4), std::invalid_argument);
    CHECK_THROWS_AS(diagonal_polynomial(make_fock(build_quiver(RMatrix::Ones(2, 2), 3)), {1, 1, 1, 1}, 0), std::invalid_argument);
}

TEST_CASE("the symbol vanishing on the sphere lies in the ideal", "[ideal][sphere]") {
    for (int d = 2; d <= 3; ++d) {
        const FockPtr f = make_fock(build_symmetric(d, d == 2 ? 8 : 6));
        std::vector<double> alpha(static_cast<std::size_t>(d), 1.0);
        const FockOperator S = diagonal_polynomial(f, alpha, -1.0);
        // Σ S_1 S_1* = I − Q_0, so the operator is −Q_0
        CHECK(exact_difference(S, eval("-Q0", f)) <= 1e-12);
    }
}

TEST_CASE("tail witnesses and approximation by the level-projection ideal", "[ideal]") {
    RMatrix P(2, 2);
    P << 1, 1, 1, 0;
    for (const auto& X : {build_symmetric(2, 6), build_subshift(2, {"11"}, 6), build_quiver(P, 6), build_product(2, 5)}) {
        const FockPtr f = make_fock(X);
        const GeneratedByQnReport r =
            generated_by_Qn_check(f, {{"Q0", eval("Q0", f)}, {"I", eval("I", f)}, {"R1", eval("R1", f)}});
        INFO(to_string(X.family));
        CHECK(r.max_witness_residual <= 1e-12);
        REQUIRE(r.samples.size() == 3);
        CHECK(r.samples[0].verdict == Verdict::in_ideal);
        CHECK(r.samples[0].decays);
        CHECK(r.samples[1].verdict == Verdict::not_in_ideal);
        CHECK(r.samples[1].approximation.empty());
        CHECK(r.samples[2].decays);
        // R1 R_m = R1 once m ≥ 1
        CHECK(r.samples[2].approximation.back().value <= 1e-12);
    }
}
