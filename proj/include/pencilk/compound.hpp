#pragma once

#include <Eigen/Dense>
#include <Eigen/LU>
#include <string>

#include "pencilk/combinat.hpp"
#include "pencilk/errors.hpp"
#include "pencilk/numeric.hpp"

namespace pencilk {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// k-multiplicative compound together with the tuple indexing that labels its
// rows and columns.
template <typename Scalar>
struct CompoundMatrix {
    Eigen::Index base_rows;
    Eigen::Index base_cols;
    int order;
    DenseMatrix<Scalar> matrix;  // C(base_rows, k) x C(base_cols, k)
    KIndexer row_index;
    KIndexer col_index;
};

// Determinant of the square submatrix selected by 1-based strictly increasing
// row/column tuples.  (Named minor_of: <sys/types.h> claims `minor`.)
template <typename Derived>
typename Derived::Scalar minor_of(const Eigen::MatrixBase<Derived>& a,
                                  const KTuple& rows, const KTuple& cols) {
    if (rows.size() != cols.size() || rows.empty())
        throw ShapeError("minor_of: row tuple " + tuple_to_string(rows) +
                         " and column tuple " + tuple_to_string(cols) +
                         " must select a square nonempty block");
    auto check = [&](const KTuple& t, Eigen::Index bound, const char* which) {
        for (std::size_t i = 0; i < t.size(); ++i)
            if (t[i] < 1 || t[i] > bound || (i > 0 && t[i] <= t[i - 1]))
                throw NotAMemberError(std::string("minor_of: ") + which + " tuple " +
                                      tuple_to_string(t) +
                                      " is not strictly increasing over 1.." +
                                      std::to_string(bound));
    };
    check(rows, a.rows(), "row");
    check(cols, a.cols(), "column");
    const int k = static_cast<int>(rows.size());
    DenseMatrix<typename Derived::Scalar> sub(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            sub(i, j) = a(rows[i] - 1, cols[j] - 1);
    if (k == 1) return sub(0, 0);
    return sub.determinant();  // partial-pivot LU underneath
}

// k-th multiplicative compound: entry (I, J) is the minor of a picked by the
// I-th row tuple and J-th column tuple in lexicographic order.
template <typename Derived>
CompoundMatrix<typename Derived::Scalar>
kcompound(const Eigen::MatrixBase<Derived>& a, int k) {
    using Scalar = typename Derived::Scalar;
    require_finite(a, "kcompound");
    if (k < 1 || k > std::min(a.rows(), a.cols()))
        throw InvalidOrderError("kcompound: order k=" + std::to_string(k) +
                                " out of range for " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()));
    KIndexer ri(static_cast<int>(a.rows()), k);
    KIndexer ci(static_cast<int>(a.cols()), k);
    DenseMatrix<Scalar> c(ri.size(), ci.size());
    if (k == 1) {
        c = a;  // 1x1 minors are the entries themselves
    } else {
        for (std::int64_t i = 0; i < ri.size(); ++i)
            for (std::int64_t j = 0; j < ci.size(); ++j)
                c(i, j) = minor_of(a, ri.tuple_at(i), ci.tuple_at(j));
    }
    return {a.rows(), a.cols(), k, std::move(c), std::move(ri), std::move(ci)};
}

template <typename Derived>
DenseMatrix<typename Derived::Scalar>
kcompound_matrix(const Eigen::MatrixBase<Derived>& a, int k) {
    return kcompound(a, k).matrix;
}

// Volume of the k-parallelotope spanned by the columns of x: the 2-norm of
// the k-compound of the n x k edge matrix.
template <typename Derived>
double volume(const Eigen::MatrixBase<Derived>& x) {
    if (x.cols() < 1 || x.cols() > x.rows())
        throw ShapeError("volume: need an n x k edge matrix with 1 <= k <= n, got " +
                         std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
    return kcompound(x, static_cast<int>(x.cols())).matrix.norm();
}

template <typename Derived>
DenseMatrix<typename Derived::Scalar>
conjugate_transpose(const Eigen::MatrixBase<Derived>& a) {
    return a.adjoint();
}

} // namespace pencilk
