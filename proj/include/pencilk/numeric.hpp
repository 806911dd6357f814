#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pencilk/errors.hpp"

namespace pencilk {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Shared tolerance knobs.  rank < 0 selects the default SVD cutoff
// max(rows, cols) * eps * sigma_max; a non-negative value is an absolute
// cutoff on singular values.
struct Tolerances {
    double rank = -1.0;
    double residual = 1e-8;
    double zero = 1e-10;
    double consistency = 1e-8;
    double stability_margin = 1e-9;
    double condition_bound = 1e12;
    // External scale reference for zero tests.  A matrix derived from
    // another one (a compound, say) can consist entirely of rounding dirt;
    // its own norm is then meaningless as a scale.  Callers that know the
    // natural scale (base norm to the k-th power) pass it here; 0 defers to
    // the operand's own norm.
    double scale_hint = 0.0;
};

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
    if (!m.allFinite())
        throw ShapeError(std::string(what) + ": non-finite entry");
}

inline double rank_cutoff(const Eigen::VectorXd& sigma, Eigen::Index rows,
                          Eigen::Index cols, double tol) {
    if (tol >= 0.0) return tol;
    const double smax = sigma.size() ? sigma(0) : 0.0;
    return static_cast<double>(std::max(rows, cols)) *
           std::numeric_limits<double>::epsilon() * smax;
}

inline Eigen::Index rank_from_values(const Eigen::VectorXd& sigma, Eigen::Index rows,
                                     Eigen::Index cols, double tol) {
    const double cut = rank_cutoff(sigma, rows, cols, tol);
    Eigen::Index r = 0;
    while (r < sigma.size() && sigma(r) > cut) ++r;
    return r;
}

inline Eigen::Index numerical_rank(const Matrix& m, double tol = -1.0) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return rank_from_values(svd.singularValues(), m.rows(), m.cols(), tol);
}

// Orthonormal basis of range(m): left singular vectors above the rank cutoff.
inline Matrix orthonormal_range(const Matrix& m, double tol = -1.0) {
    if (m.size() == 0) return Matrix(m.rows(), 0);
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
    const Eigen::Index r = rank_from_values(svd.singularValues(), m.rows(), m.cols(), tol);
    return svd.matrixU().leftCols(r);
}

// Right singular vector for the smallest singular value, with that value.
inline std::pair<double, Vector> smallest_singular_pair(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    const Eigen::Index last = svd.matrixV().cols() - 1;
    const double s = (sigma.size() > last) ? sigma(last) : 0.0;
    return {s, svd.matrixV().col(last)};
}

struct PinvResult {
    Matrix pinv;
    Eigen::Index retained = 0;  // singular values kept
    double condition = 1.0;     // sigma_max / sigma_min over the kept part
};

// Moore-Penrose pseudoinverse by SVD truncation at the shared rank cutoff.
inline PinvResult pinv(const Matrix& m, double tol = -1.0) {
    PinvResult out;
    if (m.size() == 0) {
        out.pinv = Matrix(m.cols(), m.rows());
        return out;
    }
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sigma = svd.singularValues();
    const Eigen::Index r = rank_from_values(sigma, m.rows(), m.cols(), tol);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sigma.size());
    for (Eigen::Index i = 0; i < r; ++i) inv(i) = 1.0 / sigma(i);
    out.pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
    out.retained = r;
    out.condition = (r > 0) ? sigma(0) / sigma(r - 1) : 1.0;
    return out;
}

// Unitary matrix whose first column equals the given unit vector.
inline Matrix unitary_with_first_column(const Vector& v) {
    const Eigen::Index n = v.size();
    Eigen::HouseholderQR<Matrix> qr(v);
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    // householderQ's first column is v up to a unit-modulus factor; undo it.
    Complex c = v.dot(q.col(0));
    const double a = std::abs(c);
    if (a > 0) q.col(0) *= std::conj(c) / a;
    return q;
}

// Deterministic shift ladder 0, 1, -1, 2, -2, ...
inline std::vector<Complex> shift_ladder(int count) {
    std::vector<Complex> out;
    out.reserve(count);
    for (int i = 0; static_cast<int>(out.size()) < count; ++i) {
        if (i == 0) {
            out.emplace_back(0.0, 0.0);
        } else {
            out.emplace_back(static_cast<double>(i), 0.0);
            if (static_cast<int>(out.size()) < count)
                out.emplace_back(static_cast<double>(-i), 0.0);
        }
    }
    return out;
}

// Complex Schur form m = Q R Q* with eigenvalues satisfying `first` moved to
// the leading diagonal positions (adjacent swaps by Givens rotations).
inline std::pair<Matrix, Matrix> ordered_schur(const Matrix& m,
                                               const std::function<bool(Complex)>& first) {
    Eigen::ComplexSchur<Matrix> schur(m, true);
    if (schur.info() != Eigen::Success)
        throw ConvergenceError("complex Schur iteration failed");
    Matrix q = schur.matrixU();
    Matrix r = schur.matrixT();
    const Eigen::Index n = m.rows();
    // selection sort on the diagonal: bubble each selected eigenvalue upward
    for (Eigen::Index target = 0; target < n; ++target) {
        Eigen::Index src = target;
        while (src < n && !first(r(src, src))) ++src;
        if (src == n) break;  // nothing selected remains
        for (Eigen::Index i = src; i > target; --i) {
            // swap diagonal entries (i-1, i) of the triangular factor
            const Complex a = r(i - 1, i - 1), b = r(i - 1, i), d = r(i, i);
            Complex w0 = b, w1 = d - a;
            const double nw = std::sqrt(std::norm(w0) + std::norm(w1));
            if (nw == 0.0) continue;  // equal eigenvalues, swap is a no-op
            w0 /= nw;
            w1 /= nw;
            // unitary G = [[w0, -conj(w1)], [w1, conj(w0)]] has first column
            // the eigenvector of [[a,b],[0,d]] for eigenvalue d
            Matrix g(2, 2);
            g << w0, -std::conj(w1), w1, std::conj(w0);
            r.block(i - 1, 0, 2, n) = g.adjoint() * r.block(i - 1, 0, 2, n);
            r.block(0, i - 1, n, 2) = r.block(0, i - 1, n, 2) * g;
            q.block(0, i - 1, n, 2) = q.block(0, i - 1, n, 2) * g;
            r(i, i - 1) = 0.0;
        }
    }
    return {q, r};
}

} // namespace pencilk
