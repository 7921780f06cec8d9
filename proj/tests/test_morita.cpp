#include "catch_amalgamated.hpp"

#include "support.hpp"

#include "subprod/morita.hpp"
#include "subprod/reps.hpp"

#include <random>

using namespace subprod;

namespace {

MoritaContext context(int k) { return build_context(k, build_symmetric(2, 5)); }

CMatrix matrix_unit(int r, int i, int j) {
    CMatrix m = CMatrix::Zero(r, r);
    m(i, j) = 1.0;
    return m;
}

}  // namespace

TEST_CASE("Morita context structure", "[morita]") {
    for (int k = 1; k <= 3; ++k) {
        const MoritaContext ctx = context(k);
        const ContextReport r = check_context(ctx, 20, 1);
        INFO("k = " << k);
        CHECK(r.imprimitivity_residual <= 1e-12);
        CHECK(r.w_identity_residual == 0.0);
        CHECK(r.composition_residual == 0.0);
        CHECK(r.intertwining_residual <= 1e-12);
        CHECK(r.x_subproduct_residual <= 1e-10);
        CHECK(r.z_subproduct_residual <= 1e-10);
        CHECK(r.z_dims_exact);
        for (int n = 0; n <= 5; ++n) {
            CHECK(r.dims_Y[static_cast<std::size_t>(n)] == static_cast<std::size_t>(n + 1));
            CHECK(r.dims_X[static_cast<std::size_t>(n)] == static_cast<std::size_t>(k * k * (n + 1)));
            CHECK(r.dims_Z[static_cast<std::size_t>(n)] == static_cast<std::size_t>((k + 1) * (k + 1) * (n + 1)));
        }
    }
}

TEST_CASE("degree-zero linking generators are matrix units", "[morita][oracle]") {
    for (int k = 1; k <= 2; ++k) {
        const MoritaContext ctx = context(k);
        const int r = k + 1;
        const CMatrix I = CMatrix::Identity(ctx.fock_dim(), ctx.fock_dim());
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) {
                LinkingElement a = linking_zero(ctx, 0);
                a.set_slot(i, j, CVector::Ones(1));
                CHECK(op_norm(linking_shift(ctx, a) - kron(matrix_unit(r, i, j), I)) <= 1e-14);
                CHECK(op_norm(corner_shift(ctx, a).assemble() - kron(matrix_unit(r, i, j), I)) <= 1e-14);
            }
    }
}

TEST_CASE("upper-left slot reproduces the Y shifts", "[morita]") {
    const MoritaContext ctx = context(2);
    std::mt19937_64 rng(6);
    const Eigen::Index dF = ctx.fock_dim();
    for (int n = 0; n <= 3; ++n) {
        LinkingElement a = linking_zero(ctx, n);
        const CVector eta = gen::random_vector(static_cast<Eigen::Index>(ctx.dimY(n)), rng);
        a.set_slot(0, 0, eta);
        const CMatrix S = linking_shift(ctx, a);
        CHECK(op_norm(S.topLeftCorner(dF, dF) - shift(ctx.FY, n, eta).matrix()) <= 1e-14);
        CHECK(op_norm(S.bottomRows(2 * dF)) == 0.0);
        CHECK(prime_invariance_residual(ctx, a) == 0.0);
    }
}

TEST_CASE("the two compression routes agree", "[morita]") {
    for (int k = 1; k <= 3; ++k) {
        const CompressionReport r = compression_check(context(k), 20, 1);
        INFO("k = " << k);
        CHECK(r.words == 20);
        CHECK(r.generator_residual <= 1e-10);
        CHECK(r.p_corner_residual <= 1e-10);
        CHECK(r.q_corner_residual <= 1e-10);
        CHECK(r.y_slot_homomorphism <= 1e-10);
        CHECK(r.invariance_residual <= 1e-12);
        CHECK(r.adjoint_lemma <= 1e-12);
        CHECK(r.norm_preservation <= 1e-10);
        if (k == 1) {
            CHECK(r.generator_residual == 0.0);
            CHECK(r.p_corner_residual == 0.0);
            CHECK(r.q_corner_residual == 0.0);
        }
    }
}

TEST_CASE("ordered product is an ordinary product", "[morita][property]") {
    std::mt19937_64 rng(2);
    for (int s = 0; s < 10; ++s) {
        const CMatrix a = random_cmatrix(5, 7, rng), b = random_cmatrix(7, 3, rng);
        CHECK(op_norm(ordered_product(a, b) - a * b) <= 1e-12);
    }
    CHECK_THROWS_AS(ordered_product(CMatrix::Zero(2, 3), CMatrix::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("ideal transfer to the X side", "[morita]") {
    for (int k = 1; k <= 3; ++k) {
        const MoritaContext ctx = context(k);
        LinkingElement t1 = linking_zero(ctx, 0), t2 = linking_zero(ctx, 0);
        t1.set_slot(1, 0, CVector::Ones(1));
        t2.set_slot(0, 1, CVector::Ones(1));
        const FockOperator A = shift_basis(ctx.FY, 1, 0);
        const FockOperator S = A * A.adjoint() - A.adjoint() * A;
        const IdealTransferReport r = ideal_transfer_check(ctx, t1, t2, S);
        INFO("k = " << k);
        CHECK(r.degree == 0);
        CHECK(r.violations == 0);
        CHECK(r.terminal <= 2.0 * r.y_terminal + 1e-10);
        CHECK(r.decays);
        // only the (1,1) block of D is nonzero, and it is S itself
        for (const auto& e : r.dominated)
            if (e.exact) CHECK(std::abs(e.value - norm_on_level(S, e.n)) <= 1e-12);

        // degree-one T2 shifts the dominating level
        LinkingElement t2b = linking_zero(ctx, 1);
        t2b.set_slot(0, 1, CVector::Unit(2, 0));
        const IdealTransferReport rb = ideal_transfer_check(ctx, t1, t2b, S);
        CHECK(rb.degree == 1);
        CHECK(rb.violations == 0);
    }
}

TEST_CASE("ideal transfer rejects unsuitable T2", "[morita][errors]") {
    const MoritaContext ctx = context(1);
    LinkingElement t1 = linking_zero(ctx, 0);
    t1.set_slot(1, 0, CVector::Ones(1));
    const FockOperator S = FockOperator::identity(ctx.FY);
    LinkingElement t2 = linking_zero(ctx, 1);
    t2.set_slot(0, 1, CVector::Unit(2, 1));
    CornerOp adj = corner_shift(ctx, t2).adjoint();
    CHECK_THROWS_AS(ideal_transfer_check(ctx, corner_shift(ctx, t1), adj, S), std::invalid_argument);
    CornerOp mixed = corner_shift(ctx, t2);
    LinkingElement t0 = linking_zero(ctx, 0);
    t0.set_slot(0, 1, CVector::Ones(1));
    mixed.at(0, 1) += corner_shift(ctx, t0).at(0, 1);
    CHECK_THROWS_AS(ideal_transfer_check(ctx, corner_shift(ctx, t1), mixed, S), std::invalid_argument);
}

TEST_CASE("context construction errors", "[morita][errors]") {
    RMatrix P(2, 2);
    P << 1, 1, 1, 0;
    CHECK_THROWS_AS(build_context(1, build_quiver(P, 3)), InvalidSystem);
    CHECK_THROWS_AS(build_context(0, build_symmetric(2, 3)), InvalidSystem);
}
