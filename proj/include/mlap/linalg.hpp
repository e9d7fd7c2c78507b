#pragma once

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <memory>
#include <variant>

#include "mlap/types.hpp"

namespace mlap::linalg {

/// Systems up to this size are factored densely; larger ones go through CG.
inline constexpr Index kDenseLimit = 512;

/// Symmetric positive definite solver. Dense Cholesky for small systems, a
/// sparse conjugate-gradient solve above kDenseLimit. One factorization serves
/// many right-hand sides.
class SpdSolver {
public:
    explicit SpdSolver(const Matrix& A) : n_(A.rows()) {
        if (A.rows() != A.cols()) throw Error(ErrorKind::DimensionMismatch, "SPD solver needs a square matrix");
        if (n_ <= kDenseLimit) {
            Eigen::LLT<Matrix> llt(A);
            if (llt.info() != Eigen::Success) {
                throw Error(ErrorKind::SingularSystem, "matrix is not positive definite");
            }
            // LLT succeeds on some indefinite inputs; the pivots of L must be positive.
            const Matrix L = llt.matrixL();
            for (Index i = 0; i < n_; ++i)
                if (!(L(i, i) > 0.0)) throw Error(ErrorKind::SingularSystem, "non-positive pivot");
            impl_ = std::move(llt);
        } else {
            auto state = std::make_shared<CgState>();
            state->A = A.sparseView();
            state->cg.setTolerance(1e-14);
            state->cg.setMaxIterations(20 * n_);
            state->cg.compute(state->A);
            if (state->cg.info() != Eigen::Success) throw Error(ErrorKind::SingularSystem, "CG setup failed");
            impl_ = std::move(state);
        }
    }

    [[nodiscard]] Vector solve(const Vector& b) const {
        check_dim(n_, b.size(), "rhs");
        if (const auto* llt = std::get_if<Eigen::LLT<Matrix>>(&impl_)) return llt->solve(b);
        const auto& state = std::get<std::shared_ptr<CgState>>(impl_);
        Vector x = state->cg.solve(b);
        if (state->cg.info() != Eigen::Success) throw Error(ErrorKind::SingularSystem, "CG did not converge");
        return x;
    }

    [[nodiscard]] Matrix solve(const Matrix& B) const {
        Matrix X(B.rows(), B.cols());
        for (Index k = 0; k < B.cols(); ++k) X.col(k) = solve(Vector(B.col(k)));
        return X;
    }

private:
    // The CG solver keeps a reference to its matrix, so both live together on the heap.
    struct CgState {
        Eigen::SparseMatrix<double> A;
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    };
    Index n_;
    std::variant<Eigen::LLT<Matrix>, std::shared_ptr<CgState>> impl_;
};

/// Eigenvalues of a symmetric matrix, ascending.
inline Vector symmetric_eigenvalues(const Matrix& S) {
    if (S.rows() == 0) return Vector();
    Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

/// f(S) for symmetric S through its eigendecomposition.
template <typename Fn>
Matrix symmetric_function(const Matrix& S, Fn&& fn) {
    if (S.rows() == 0) return Matrix(0, 0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    Vector mapped = es.eigenvalues().unaryExpr(fn);
    return es.eigenvectors() * mapped.asDiagonal() * es.eigenvectors().transpose();
}

/// Moore-Penrose pseudoinverse of a symmetric PSD matrix. Eigenvalues below
/// rel_tol * (largest eigenvalue) are treated as zero.
inline Matrix psd_pseudoinverse(const Matrix& S, double rel_tol = 1e-10) {
    if (S.rows() == 0) return Matrix(0, 0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    const double top = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 0.0);
    const double cut = rel_tol * std::max(top, 1e-300);
    Vector inv = es.eigenvalues().unaryExpr([cut](double v) { return v > cut ? 1.0 / v : 0.0; });
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

inline double spectral_radius(const Matrix& A) {
    if (A.rows() == 0) return 0.0;
    Eigen::EigenSolver<Matrix> es(A, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline double max_asymmetry(const Matrix& A) { return (A - A.transpose()).cwiseAbs().maxCoeff(); }

inline Matrix submatrix(const Matrix& A, const StateSet& rows, const StateSet& cols) {
    Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c) out(static_cast<Index>(r), static_cast<Index>(c)) = A(rows[r], cols[c]);
    return out;
}

inline Vector gather(const Vector& v, const StateSet& idx) {
    Vector out(static_cast<Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) out(static_cast<Index>(k)) = v(idx[k]);
    return out;
}

}  // namespace mlap::linalg
