// linalg.hpp — dense complex matrix kernel shared by every other module.
//
// All operators in the library are stored as Eigen::MatrixXcd. Tensor products
// follow one ordering everywhere: the LEFT factor indexes the outer blocks, so
// (A ⊗ B)(e_i ⊗ e_j) lands at row-block i of A's image, position j inside it.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

namespace subprod {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kDefaultRankTol = 1e-8;

inline CMatrix adjoint(const CMatrix& a) { return a.adjoint(); }

inline bool all_finite(const CMatrix& a) {
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
    return true;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Kronecker product of column vectors, same ordering as kron().
inline CVector kron_vec(const CVector& x, const CVector& y) {
    CVector out(x.size() * y.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) out.segment(i * y.size(), y.size()) = x(i) * y;
    return out;
}

/// Singular values in descending order.
// JacobiSVD rather than BDCSVD: Eigen 3.4's divide-and-conquer path loses
// accuracy on the heavily degenerate spectra of symmetrizers (64x64 and up).
inline Eigen::VectorXd singular_values(const CMatrix& a) {
    if (a.size() == 0) return Eigen::VectorXd();
    Eigen::JacobiSVD<CMatrix> svd(a);
    return svd.singularValues();
}

/// Largest singular value. An empty matrix has norm 0.
inline double op_norm(const CMatrix& a) {
    if (a.size() == 0) return 0.0;
    if (a.cols() == 1) return a.col(0).norm();
    if (a.rows() == 1) return a.row(0).norm();
    if (a.isZero(0.0)) return 0.0;
    // sqrt of the top eigenvalue of the smaller Gram matrix
    const CMatrix g = a.rows() < a.cols() ? CMatrix(a * a.adjoint()) : CMatrix(a.adjoint() * a);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(g, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

/// Number of singular values above tol * sigma_max.
inline Eigen::Index numerical_rank(const CMatrix& a, double tol = kDefaultRankTol) {
    if (a.size() == 0) return 0;
    const Eigen::VectorXd s = singular_values(a);
    if (s.size() == 0 || s(0) == 0.0) return 0;
    const double cut = tol * s(0);
    return static_cast<Eigen::Index>(std::count_if(s.data(), s.data() + s.size(), [&](double v) { return v > cut; }));
}

/// Isometry whose columns span range(A), truncated at tol * sigma_max.
/// A zero matrix yields a rows x 0 isometry.
inline CMatrix orthonormal_range(const CMatrix& a, double tol = kDefaultRankTol) {
    if (!(tol > 0.0)) throw std::invalid_argument("orthonormal_range: tol must be positive");
    if (a.size() == 0) return CMatrix(a.rows(), 0);
    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU);
    const Eigen::VectorXd& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return CMatrix(a.rows(), 0);
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > tol * s(0)) ++r;
    return svd.matrixU().leftCols(r);
}

/// Orthogonal projection onto the column span of an isometry.
inline CMatrix projector(const CMatrix& isometry) { return isometry * isometry.adjoint(); }

/// ‖J*J − I‖ for a candidate isometry.
inline double isometry_residual(const CMatrix& j) {
    if (j.cols() == 0) return 0.0;
    return op_norm(j.adjoint() * j - CMatrix::Identity(j.cols(), j.cols()));
}

/// Cosines of the principal angles between the spans of two isometries.
inline Eigen::VectorXd principal_cosines(const CMatrix& u, const CMatrix& v) {
    if (u.cols() == 0 || v.cols() == 0) return Eigen::VectorXd();
    return singular_values(u.adjoint() * v);
}

/// ‖P_U − P_V‖: the sine of the largest principal angle when dimensions agree,
/// and 1 when they do not.
inline double subspace_distance(const CMatrix& u, const CMatrix& v) {
    if (u.rows() != v.rows()) throw std::invalid_argument("subspace_distance: ambient dimensions differ");
    if (u.cols() == 0 && v.cols() == 0) return 0.0;
    return op_norm(projector(u) - projector(v));
}

/// Orthonormal basis of the orthogonal complement of span(J) in ℂ^rows.
inline CMatrix orthogonal_complement(const CMatrix& j, double tol = kDefaultRankTol) {
    const Eigen::Index n = j.rows();
    CMatrix resid = CMatrix::Identity(n, n);
    if (j.cols() > 0) resid -= projector(j);
    if (resid.norm() < tol) return CMatrix(n, 0);
    // resid is a projector, so its singular values are 0 or 1.
    return orthonormal_range(resid, 0.5);
}

/// Random complex Gaussian matrix from a caller-owned engine.
template <class Engine>
CMatrix random_cmatrix(Eigen::Index rows, Eigen::Index cols, Engine& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    CMatrix out(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = cplx(g(rng), g(rng));
    return out;
}

/// Haar-ish random unitary (QR of a Gaussian matrix with phase fix).
template <class Engine>
CMatrix random_unitary(Eigen::Index n, Engine& rng) {
    const CMatrix g = random_cmatrix(n, n, rng);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double m = std::abs(r(i, i));
        if (m > 0) q.col(i) *= r(i, i) / m;
    }
    return q;
}

}  // namespace subprod
