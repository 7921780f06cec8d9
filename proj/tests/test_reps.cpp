#include "catch_amalgamated.hpp"

#include "support.hpp"

#include "subprod/reps.hpp"

#include <random>

using namespace subprod;

namespace {

RMatrix golden() {
    RMatrix P(2, 2);
    P << 1, 1, 1, 0;
    return P;
}

CVector sphere_point(int d, double radius, std::mt19937_64& rng) {
    const CVector g = gen::random_vector(d, rng);
    return radius * g / g.norm();
}

CMatrix elementary(Eigen::Index n, Eigen::Index i, Eigen::Index j) {
    CMatrix m = CMatrix::Zero(n, n);
    m(i, j) = 1.0;
    return m;
}

}  // namespace

TEST_CASE("Fock representations are multiplicative and pure", "[reps]") {
    for (const auto& X : {build_symmetric(2, 6), build_product(2, 4), build_subshift(2, {"11"}, 6), build_quiver(golden(), 5)}) {
        const CovariantRep rep = fock_representation(X, X.N - 1);
        INFO(to_string(X.family));
        CHECK(multiplicativity_residual(rep) <= 1e-10);
        const Classification c = classify(rep);
        CHECK(c.pure);
        CHECK_FALSE(c.fully_coisometric);
        CHECK_FALSE(c.essential);
        for (double t : c.ttilde_norms) CHECK(t <= 1.0 + 1e-10);
    }
}

TEST_CASE("generators of the Fock representation extend to the shifts", "[reps]") {
    const auto X = build_symmetric(2, 5);
    const CovariantRep fock = fock_representation(X, 4);
    const CovariantRep rebuilt = rep_from_generators(X, fock.vertex, fock.T[1]);
    CHECK(rebuilt.consistency_residual <= 1e-12);
    for (int n = 1; n <= 5; ++n)
        for (std::size_t k = 0; k < X.fiber_dim(n); ++k)
            CHECK(op_norm(rebuilt.T[static_cast<std::size_t>(n)][k] - fock.T[static_cast<std::size_t>(n)][k]) <= 1e-12);
}

TEST_CASE("represented projections in the Fock representation", "[reps]") {
    const auto X = build_subshift(2, {"11"}, 6);
    const CovariantRep rep = fock_representation(X, 5);
    const FockPtr f = make_fock(truncate_system(X, 5));
    for (int n = 0; n <= 4; ++n) {
        const CMatrix q = evaluate_in_rep(*make_leaf(Expr::Kind::Q, n), rep);
        CHECK(op_norm(q - level_projection(f, n).matrix()) <= 1e-12);
    }
    CHECK_THROWS_AS(evaluate_in_rep(*make_leaf(Expr::Kind::Q, 6), rep), std::invalid_argument);
}

TEST_CASE("evaluation representations on the ball", "[reps][property]") {
    std::mt19937_64 rng(12);
    for (int d : {2, 3}) {
        const auto X = build_symmetric(d, 5);
        for (int s = 0; s < 10; ++s) {
            for (double radius : {0.0, 0.5, 1.0}) {
                const CVector z = sphere_point(d, radius, rng);
                const CovariantRep rep = evaluation_rep(X, z);
                CHECK(multiplicativity_residual(rep) <= 1e-10);
                const TTilde t = ttilde(rep, 1);
                CHECK(std::abs(t.defect(0, 0) - cplx(z.squaredNorm(), 0)) <= 1e-12);
                const Classification c = classify(rep);
                CHECK(c.fully_coisometric == (radius == 1.0));
                CHECK(c.essential == (radius > 0));
                CHECK(c.pure == (radius == 0.0));
                // T_n(e_w) is the monomial z^w scaled by the fiber normalisation
                const cplx want = z(0) * z(0);
                CHECK(std::abs(rep.T[2][0](0, 0) - want) <= 1e-12);
            }
        }
    }
}

TEST_CASE("essential evaluation representations annihilate the ideal", "[reps]") {
    const auto X = build_symmetric(2, 5);
    std::mt19937_64 rng(3);
    std::vector<ExprPtr> samples;
    for (const char* s : {"S1[e1]*S1[e1]~ + S1[e2]*S1[e2]~ - I", "S1[e1]*S1[e2]~ - S1[e2]~*S1[e1]", "Q0", "Q2*S1[e1]"})
        samples.push_back(parse_expr(s, X));
    for (int s = 0; s < 10; ++s) {
        const KernelCheck k = kernel_ideal_check(evaluation_rep(X, sphere_point(2, 1.0, rng)), samples);
        CHECK(k.max_norm <= 1e-10);
        CHECK(k.samples.size() == samples.size());
    }
    // inside the ball the vacuum projection survives
    const KernelCheck inner = kernel_ideal_check(evaluation_rep(X, sphere_point(2, 0.5, rng)), {parse_expr("Q0", X)});
    CHECK(std::abs(inner.max_norm - 0.75) <= 1e-12);
}

TEST_CASE("free generators are consistent only on the product system", "[reps][errors]") {
    const std::vector<CMatrix> T1{0.5 * elementary(2, 0, 1), 0.5 * elementary(2, 1, 0)};
    const CovariantRep free = rep_from_generators(build_product(2, 4), {0, 0}, T1);
    CHECK(multiplicativity_residual(free) <= 1e-12);
    CHECK_THROWS_WITH(rep_from_generators(build_symmetric(2, 4), {0, 0}, T1),
                      Catch::Matchers::ContainsSubstring("inconsistent extension") && Catch::Matchers::ContainsSubstring("witness (e"));
    // commuting generators are fine on the symmetric system
    CHECK_NOTHROW(rep_from_generators(build_symmetric(2, 4), {0, 0}, {0.5 * CMatrix::Identity(2, 2), 0.25 * elementary(2, 0, 1)}));
}

TEST_CASE("malformed generators are rejected", "[reps][errors]") {
    const auto X = build_symmetric(2, 3);
    CHECK_THROWS_AS(rep_from_generators(X, {0}, {CMatrix::Zero(1, 1)}), InvalidRep);
    CHECK_THROWS_AS(rep_from_generators(X, {0}, {CMatrix::Zero(2, 2), CMatrix::Zero(2, 2)}), InvalidRep);
    CHECK_THROWS_AS(rep_from_generators(X, {1}, {CMatrix::Zero(1, 1), CMatrix::Zero(1, 1)}), InvalidRep);
    CMatrix nan = CMatrix::Zero(1, 1);
    nan(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(rep_from_generators(X, {0}, {nan, CMatrix::Zero(1, 1)}), InvalidRep);
    // an edge from vertex 1 to 2 cannot act inside vertex 1
    const auto Q = build_quiver(golden(), 3);
    std::vector<CMatrix> T1(3, CMatrix::Zero(2, 2));
    T1[1] = elementary(2, 0, 0);
    CHECK_THROWS_WITH(rep_from_generators(Q, {0, 1}, T1), Catch::Matchers::ContainsSubstring("grading"));
    CHECK_THROWS_AS(evaluation_rep(X, CVector::Ones(3)), InvalidRep);
}

TEST_CASE("Perron representation of a quiver is fully coisometric", "[reps]") {
    for (const RMatrix& P : {golden(), RMatrix(RMatrix::Constant(2, 2, 1.0)), RMatrix(RMatrix::Identity(1, 1) * 3.0)}) {
        const auto X = build_quiver(P, 5);
        const CovariantRep rep = perron_coisometric_rep(X);
        CHECK(multiplicativity_residual(rep) <= 1e-10);
        CMatrix sum = CMatrix::Zero(rep.dim(), rep.dim());
        for (const auto& t : rep.T[1]) sum += t * t.adjoint();
        CHECK(op_norm(sum - CMatrix::Identity(rep.dim(), rep.dim())) <= 1e-12);
        const Classification c = classify(rep);
        CHECK(c.fully_coisometric);
        CHECK(c.essential);
        CHECK_FALSE(c.pure);
    }
    CHECK_THROWS_AS(perron_coisometric_rep(build_symmetric(2, 3)), InvalidRep);
}

TEST_CASE("Wold decomposition recovers the Fock summand", "[reps][wold]") {
    for (const RMatrix& P : {golden(), RMatrix(RMatrix::Constant(2, 2, 1.0))}) {
        const auto X = build_quiver(P, 6);
        const CovariantRep fock = fock_representation(X, 4), cois = perron_coisometric_rep(X);
        const CovariantRep rep = direct_sum(fock, cois);
        const WoldSplit w = wold_decompose(rep);
        CHECK(w.hypothesis_residual <= 1e-10);
        CHECK(w.invariance_residual <= 1e-9);
        CHECK(w.pure_residual <= 1e-10);
        CHECK(w.coisometric_residual <= 1e-10);
        CMatrix expected = CMatrix::Zero(rep.dim(), fock.dim());
        expected.topRows(fock.dim()) = CMatrix::Identity(fock.dim(), fock.dim());
        REQUIRE(w.induced.cols() == fock.dim());
        CHECK(subspace_distance(w.induced, expected) <= 1e-8);
        CHECK(op_norm(w.induced.adjoint() * w.coisometric) <= 1e-12);
        CHECK(w.induced.cols() + w.coisometric.cols() == rep.dim());
    }
}

TEST_CASE("Wold decomposition of the extreme cases", "[reps][wold]") {
    const auto X = build_symmetric(2, 5);
    std::mt19937_64 rng(8);
    const WoldSplit cois = wold_decompose(evaluation_rep(X, sphere_point(2, 1.0, rng)));
    CHECK(cois.induced.cols() == 0);
    CHECK(cois.coisometric.cols() == 1);
    const WoldSplit pure = wold_decompose(fock_representation(X, 3));
    CHECK(pure.coisometric.cols() == 0);
    CHECK(pure.invariance_residual <= 1e-12);
    // the evaluation at an interior point is pure at the horizon only up to |z|^(2N)
    const WoldSplit inner = wold_decompose(evaluation_rep(X, sphere_point(2, 0.5, rng)));
    CHECK(inner.induced.cols() == 1);
}
