#include "catch_amalgamated.hpp"

#include "support.hpp"

#include "subprod/ideal.hpp"

#include <random>

using namespace subprod;

namespace {

RMatrix golden() {
    RMatrix P(2, 2);
    P << 1, 1, 1, 0;
    return P;
}

RMatrix two_one() {
    RMatrix P(2, 2);
    P << 2, 1, 1, 1;
    return P;
}

CVector unit(std::size_t n, std::size_t i) {
    CVector v = CVector::Zero(static_cast<Eigen::Index>(n));
    v(static_cast<Eigen::Index>(i)) = 1.0;
    return v;
}

/// p_{n+m}(ζ⊗η) for n, m ≥ 1, from the embeddings directly.
CVector product_vector(const SubproductSystem& X, int n, int m, const CVector& z, const CVector& e) {
    return X.J[n + m].adjoint() * kron_vec(X.J[n] * z, X.J[m] * e);
}

}  // namespace

TEST_CASE("shift columns follow the defining formula", "[fock][oracle]") {
    std::mt19937_64 rng(4);
    for (const auto& X : {build_symmetric(2, 5), build_subshift(2, {"11"}, 5), build_product(2, 4), build_quiver(two_one(), 4)}) {
        const FockPtr f = make_fock(X);
        for (int n = 1; n <= X.N; ++n) {
            const CVector z = gen::random_vector(static_cast<Eigen::Index>(X.fiber_dim(n)), rng);
            const FockOperator S = shift(f, n, z);
            for (int m = 1; n + m <= X.N; ++m) {
                const CVector e = gen::random_vector(static_cast<Eigen::Index>(X.fiber_dim(m)), rng);
                const CVector got = S.block(n + m, m) * e;
                CHECK((got - product_vector(X, n, m, z, e)).norm() <= 1e-12 * (1 + z.norm() * e.norm()));
            }
            for (int m = 0; m <= X.N; ++m) CHECK(S.column_exact(m) == (n + m <= X.N));
        }
    }
}

TEST_CASE("shift semigroup on full basis sweeps", "[fock]") {
    for (const auto& X : {build_product(2, 6), build_symmetric(2, 8), build_symmetric(3, 6), build_subshift(2, {"11"}, 8),
                          build_quiver(golden(), 6)}) {
        double worst = 0;
        for (int n = 0; n <= X.N; ++n)
            for (int m = 0; n + m <= X.N; ++m)
                for (std::size_t a = 0; a < X.fiber_dim(n); ++a)
                    for (std::size_t b = 0; b < X.fiber_dim(m); ++b)
                        worst = std::max(worst, semigroup_residual(X, n, m, unit(X.fiber_dim(n), a), unit(X.fiber_dim(m), b)));
        INFO(to_string(X.family));
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("blockwise semigroup residual matches dense operator products", "[fock][property]") {
    std::mt19937_64 rng(9);
    const auto X = build_symmetric(2, 5);
    const FockPtr f = make_fock(X);
    for (int n = 1; n <= 3; ++n)
        for (int m = 1; n + m <= 5; ++m) {
            const CVector z = gen::random_vector(static_cast<Eigen::Index>(X.fiber_dim(n)), rng);
            const CVector e = gen::random_vector(static_cast<Eigen::Index>(X.fiber_dim(m)), rng);
            const FockOperator lhs = shift(f, n, z) * shift(f, m, e);
            const FockOperator rhs = shift(f, n + m, fiber_product(X, n, m, z, e));
            CHECK(exact_difference(lhs, rhs) <= 1e-10);
            CHECK(semigroup_residual(X, n, m, z, e) <= 1e-10);
        }
}

TEST_CASE("exact columns agree with a deeper truncation", "[fock][property]") {
    // column m exact on the shallow truncation must be the untruncated column
    const auto small = build_symmetric(2, 4), big = build_symmetric(2, 8);
    const FockPtr fs = make_fock(small), fb = make_fock(big);
    std::mt19937_64 rng(17);
    for (int s = 0; s < 40; ++s) {
        const ExprPtr e = gen::random_expr(small, rng, 3);
        const FockOperator A = evaluate(*e, fs), B = evaluate(*e, fb);
        for (int m = 0; m <= small.N; ++m) {
            if (!A.column_exact(m)) continue;
            INFO(print_expr(*e) << " column " << m);
            CHECK(B.column_exact(m));
            for (int l = 0; l <= big.N; ++l) {
                const CMatrix want = l <= small.N ? A.block(l, m) : CMatrix::Zero(fb->dim(l), fb->dim(m));
                CHECK(op_norm(B.block(l, m) - want) <= 1e-10);
            }
        }
    }
}

TEST_CASE("exactness rules of products and adjoints", "[fock]") {
    const FockPtr f = make_fock(build_symmetric(2, 4));
    const FockOperator S = shift_basis(f, 1, 0);
    const FockOperator SS = S * S.adjoint(), StS = S.adjoint() * S;
    for (int m = 0; m <= 4; ++m) {
        CHECK(SS.column_exact(m));
        CHECK(StS.column_exact(m) == (m < 4));
        CHECK(S.adjoint().column_exact(m));
    }
    CHECK(SS.degrees() == std::set<int>{0});
    CHECK((S + S.adjoint()).degrees() == std::set<int>{-1, 1});
    CHECK(S.last_exact() == 3);
}

TEST_CASE("adjoint action formula", "[fock]") {
    std::mt19937_64 rng(2);
    for (const auto& X : {build_symmetric(3, 4), build_quiver(golden(), 5), build_subshift(2, {"11"}, 6)}) {
        const FockPtr f = make_fock(X);
        for (int n = 0; n <= X.N; ++n)
            CHECK(adjoint_action_check(f, n, gen::random_vector(static_cast<Eigen::Index>(X.fiber_dim(n)), rng)) <= 1e-12);
    }
}

TEST_CASE("quiver shift coefficients", "[fock]") {
    const auto X = build_quiver(golden(), 3);
    const FockPtr f = make_fock(X);
    const FockOperator S = shift_basis(f, 1, *X.fiber_index(1, "f11"));
    // f11 ⊗ f12 is the only path from 1 to 2 of length two: coefficient 1
    const auto f12 = *X.fiber_index(1, "f12"), f12_2 = *X.fiber_index(2, "f12");
    CHECK(std::abs(S.block(2, 1)(static_cast<Eigen::Index>(f12_2), static_cast<Eigen::Index>(f12)) - cplx(1, 0)) < 1e-14);
    // two paths 1→1 of length two (P²_11 = 2), each of weight 1
    const auto f11 = *X.fiber_index(1, "f11"), f11_2 = *X.fiber_index(2, "f11");
    CHECK(std::abs(S.block(2, 1)(static_cast<Eigen::Index>(f11_2), static_cast<Eigen::Index>(f11)) - cplx(std::sqrt(0.5), 0)) < 1e-14);
}

TEST_CASE("sum of S_n S_n* reconstructs the tail projection on quivers", "[fock][ideal]") {
    for (const RMatrix& P : {golden(), two_one()}) {
        const FockPtr f = make_fock(build_quiver(P, 6));
        for (int n = 1; n <= 4; ++n) {
            const FockOperator w = tail_witness(f, n);
            CHECK(exact_difference(w, tail_projection(f, n)) <= 1e-12);
            // dense sum as a cross-check of the restricted accumulation
            CMatrix dense = CMatrix::Zero(f->total_dim(), f->total_dim());
            for (std::size_t k = 0; k < f->system.fiber_dim(n); ++k) {
                const FockOperator s = shift_basis(f, n, k);
                dense += s.matrix() * s.matrix().adjoint();
            }
            CHECK(op_norm(dense - w.matrix()) <= 1e-13);
        }
    }
}

TEST_CASE("left action of vertex units", "[fock]") {
    const auto X = build_quiver(golden(), 3);
    const FockPtr f = make_fock(X);
    for (int a = 0; a < 2; ++a) {
        const FockOperator L = left_action(f, unit(2, static_cast<std::size_t>(a)));
        for (int n = 0; n <= 3; ++n)
            for (std::size_t c = 0; c < X.fiber_dim(n); ++c) {
                const auto i = f->offset(n) + static_cast<Eigen::Index>(c);
                CHECK(std::abs(L.matrix()(i, i) - cplx(X.fiber[n][c].left == a ? 1.0 : 0.0, 0.0)) <= 1e-15);
            }
        CHECK(op_norm(L.matrix() * L.matrix() - L.matrix()) < 1e-14);
    }
}

TEST_CASE("level projections", "[fock]") {
    const FockPtr f = make_fock(build_symmetric(2, 5));
    FockOperator sum = FockOperator::zero(f);
    for (int n = 0; n <= 5; ++n) sum += level_projection(f, n);
    CHECK(sum.matrix() == CMatrix::Identity(f->total_dim(), f->total_dim()));
    CHECK((tail_projection(f, 3) + partial_projection(f, 2)).matrix() == CMatrix::Identity(f->total_dim(), f->total_dim()));
    CHECK(tail_projection(f, 0).matrix() == CMatrix::Identity(f->total_dim(), f->total_dim()));
}

TEST_CASE("gauge action scales degree-k monomials by lambda^k", "[fock][gauge][property]") {
    const auto X = build_symmetric(2, 5);
    const FockPtr f = make_fock(X);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> angle(0, 6.283185307179586);
    // W_λ = diag(λ^n) on level n, formed independently
    auto W = [&](cplx lambda) {
        CMatrix w = CMatrix::Zero(f->total_dim(), f->total_dim());
        for (int n = 0; n <= X.N; ++n)
            for (Eigen::Index i = 0; i < f->dim(n); ++i) w(f->offset(n) + i, f->offset(n) + i) = std::pow(lambda, n);
        return w;
    };
    for (int s = 0; s < 20; ++s) {
        const ExprPtr e = gen::random_expr(X, rng, 3);
        const FockOperator S = evaluate(*e, f);
        const cplx lambda = std::polar(1.0, angle(rng));
        const CMatrix Wl = W(lambda);
        CHECK(op_norm(gauge_conjugate(S, lambda).matrix() - Wl * S.matrix() * Wl.adjoint()) <= 1e-12);
        if (e->degrees.size() == 1) {
            const int k = *e->degrees.begin();
            CHECK(op_norm(gauge_conjugate(S, lambda).matrix() - std::pow(lambda, k) * S.matrix()) <= 1e-12);
        }
    }
    CHECK_THROWS_AS(gauge_conjugate(FockOperator::identity(f), cplx(1.1, 0)), std::invalid_argument);
}

TEST_CASE("spectral components and Cesaro means", "[fock][gauge][property]") {
    const auto X = build_symmetric(2, 4);
    const FockPtr f = make_fock(X);
    std::mt19937_64 rng(13);
    for (int s = 0; s < 20; ++s) {
        const FockOperator S = evaluate(*gen::random_expr(X, rng, 3), f);
        FockOperator sum = FockOperator::zero(f);
        for (int k = -4; k <= 4; ++k) sum += spectral_component(S, k);
        CHECK(sum.matrix() == S.matrix());
        for (int n = 0; n <= 6; ++n) CHECK(fejer(S, n).norm() <= S.norm() + 1e-10);
        // σ_n → S at rate N/(n+1)
        double bands = 0;
        for (int k = -4; k <= 4; ++k) bands += spectral_component(S, k).norm();
        CHECK(op_norm(fejer(S, 999).matrix() - S.matrix()) <= 4.0 / 1000.0 * bands + 1e-12);
    }
    CHECK_THROWS_AS(spectral_component(FockOperator::identity(f), 5), std::invalid_argument);
    CHECK_THROWS_AS(fejer(FockOperator::identity(f), -1), std::invalid_argument);
}

TEST_CASE("shift argument errors", "[fock][errors]") {
    const FockPtr f = make_fock(build_symmetric(2, 3));
    CHECK_THROWS_AS(shift(f, 4, CVector::Ones(5)), std::invalid_argument);
    CHECK_THROWS_AS(shift(f, 1, CVector::Ones(3)), std::invalid_argument);
}
