#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "pencilk/compound.hpp"
#include "pencilk/errors.hpp"
#include "pencilk/numeric.hpp"

namespace pencilk {

// Matrix pencil A - lambda*B over square matrices of equal dimension.
struct Pencil {
    Matrix a, b;

    Pencil(Matrix a_, Matrix b_) : a(std::move(a_)), b(std::move(b_)) {
        if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
            throw ShapeError("pencil requires square matrices of equal dimension, got " +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                             " and " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()));
        require_finite(a, "pencil");
        require_finite(b, "pencil");
    }

    Eigen::Index dim() const { return a.rows(); }
    double scale() const { return std::max(a.norm(), b.norm()); }
};

// Generalized eigenvalue in homogeneous (alpha, beta) form, canonicalized so
// that |alpha|^2 + |beta|^2 = 1 and the dominant component is positive real.
// Infinite eigenvalues carry beta == 0 exactly; no floating Inf is stored.
struct GenEig {
    Complex alpha{1.0, 0.0};
    Complex beta{0.0, 0.0};

    bool is_infinite() const { return beta == 0.0; }
    bool is_finite() const { return beta != 0.0; }

    // alpha/beta; only meaningful for finite eigenvalues
    Complex value() const {
        if (is_infinite())
            throw std::domain_error("GenEig::value() called on an infinite eigenvalue");
        return alpha / beta;
    }

    // |alpha|/|beta| compared against r*|beta| without dividing
    bool modulus_less_than(double r) const { return std::abs(alpha) < r * std::abs(beta); }

    // Canonical form of a raw diagonal pair (t, s).  Components with modulus
    // <= zero_floor are snapped to an exact zero first.
    static GenEig canonical(Complex t, Complex s, double zero_floor = 0.0) {
        if (std::abs(s) <= zero_floor) s = 0.0;
        if (std::abs(t) <= zero_floor) t = 0.0;
        if (s == 0.0) return {Complex(1.0, 0.0), Complex(0.0, 0.0)};
        if (t == 0.0) return {Complex(0.0, 0.0), Complex(1.0, 0.0)};
        const double h = std::hypot(std::abs(t), std::abs(s));
        Complex alpha = t / h, beta = s / h;
        const Complex dom = (std::abs(beta) >= std::abs(alpha)) ? beta : alpha;
        const Complex phase = std::conj(dom) / std::abs(dom);
        return {alpha * phase, beta * phase};
    }
};

// Chordal metric on the homogeneous eigenvalue pairs (bounded by 1, treats
// infinity as an ordinary point).
inline double chordal_distance(const GenEig& x, const GenEig& y) {
    const double nx = std::hypot(std::abs(x.alpha), std::abs(x.beta));
    const double ny = std::hypot(std::abs(y.alpha), std::abs(y.beta));
    if (nx == 0.0 || ny == 0.0) return std::numeric_limits<double>::infinity();
    return std::abs(x.alpha * y.beta - y.alpha * x.beta) / (nx * ny);
}

// Greedy multiset pairing; returns the worst pairing distance, or infinity
// when the multiset sizes differ.
inline double spectra_match_distance(const std::vector<GenEig>& a, std::vector<GenEig> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (const GenEig& x : a) {
        std::size_t best = b.size();
        double bestd = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < b.size(); ++j) {
            const double d = chordal_distance(x, b[j]);
            if (d < bestd) {
                bestd = d;
                best = j;
            }
        }
        if (best == b.size()) return std::numeric_limits<double>::infinity();
        worst = std::max(worst, bestd);
        b.erase(b.begin() + static_cast<std::ptrdiff_t>(best));
    }
    return worst;
}

// Generalized Schur decomposition U A V = T, U B V = S with U, V unitary and
// T, S upper triangular.
struct GsdResult {
    Matrix u, v, t, s;
};

namespace detail {

struct GsdParts {
    Matrix u, v, t, s;
};

// Full rank at the resolution of the singularity test: sigma_min must clear
// both the SVD rank cutoff and the zero floor tied to the original pencil
// scale, so the ladder and the (0,0) diagonal test cannot disagree.
inline std::pair<bool, double> full_rank_ratio(const Matrix& f, const Tolerances& tol,
                                               double floor_scale) {
    const Eigen::Index n = f.rows();
    if (n == 0) return {true, 1.0};
    Eigen::JacobiSVD<Matrix> svd(f);
    const auto& sv = svd.singularValues();
    const double smin = sv(n - 1), smax = sv(0);
    if (smax == 0.0) return {false, 0.0};
    const double gate = std::max(rank_cutoff(sv, n, n, tol.rank), tol.zero * floor_scale);
    return {smin > gate, smin / smax};
}

inline GsdParts gsd_recurse(const Matrix& a, const Matrix& b, const Tolerances& tol,
                            double floor_scale) {
    const Eigen::Index n = a.rows();
    GsdParts out;
    if (n <= 1) {
        out.u = Matrix::Identity(n, n);
        out.v = Matrix::Identity(n, n);
        out.t = a;
        out.s = b;
        return out;
    }
    const double scale = std::max(a.norm(), b.norm());
    if (scale == 0.0) {
        out.u = Matrix::Identity(n, n);
        out.v = Matrix::Identity(n, n);
        out.t = a;
        out.s = b;
        return out;
    }

    // Regular route: triangularize via the best-conditioned ladder shift.
    // A - sigma*B regular gives A = F(I + sigma*F^{-1}B); Schur-triangularize
    // F^{-1}B and re-orthogonalize the image of F.
    std::optional<Complex> shift;
    double best_ratio = 0.0;
    for (const Complex& cand : shift_ladder(static_cast<int>(n) + 1)) {
        auto [full, ratio] = full_rank_ratio(a - cand * b, tol, floor_scale);
        if (full && ratio > best_ratio) {
            best_ratio = ratio;
            shift = cand;
        }
    }

    if (shift) {
        const Complex sigma = *shift;
        Matrix f = a - sigma * b;
        Matrix m = f.colPivHouseholderQr().solve(b);
        Eigen::ComplexSchur<Matrix> schur(m, true);
        if (schur.info() != Eigen::Success)
            throw ConvergenceError("gsd: complex Schur iteration did not converge");
        Matrix q = schur.matrixU();
        Matrix r = Matrix(schur.matrixT().triangularView<Eigen::Upper>());
        Eigen::HouseholderQR<Matrix> qr(Matrix(f * q));
        Matrix qw = qr.householderQ() * Matrix::Identity(n, n);
        Matrix rw = Matrix(qr.matrixQR().triangularView<Eigen::Upper>());
        out.u = qw.adjoint();
        out.v = q;
        out.s = rw * r;               // product of uppers stays exactly upper
        out.t = rw + sigma * out.s;
        return out;
    }

    // Singular route: every ladder shift is rank deficient, so the pencil is
    // singular and in particular det(A) = 0.  Deflate one diagonal pair and
    // recurse.  A common kernel vector of [A; B] yields a (0, 0) pair; else a
    // kernel vector of A yields a (0, ||Bv||) pair.
    Matrix stacked(2 * n, n);
    stacked << a, b;
    auto [smin_c, v_common] = smallest_singular_pair(stacked);
    Vector v;
    if (smin_c <= tol.zero * floor_scale) {
        v = v_common;
    } else {
        v = smallest_singular_pair(a).second;
    }
    Vector bv = b * v;
    Vector u1col;
    if (bv.norm() > tol.zero * floor_scale)
        u1col = bv / bv.norm();
    else
        u1col = v;  // both images vanish; any unit vector deflates
    Matrix v1 = unitary_with_first_column(v);
    Matrix u1 = unitary_with_first_column(u1col);
    Matrix a1 = u1.adjoint() * a * v1;
    Matrix b1 = u1.adjoint() * b * v1;
    a1.col(0).tail(n - 1).setZero();
    b1.col(0).tail(n - 1).setZero();

    GsdParts sub = gsd_recurse(a1.bottomRightCorner(n - 1, n - 1),
                               b1.bottomRightCorner(n - 1, n - 1), tol, floor_scale);
    Matrix ublk = Matrix::Zero(n, n);
    ublk(0, 0) = 1.0;
    ublk.bottomRightCorner(n - 1, n - 1) = sub.u;
    Matrix vblk = Matrix::Zero(n, n);
    vblk(0, 0) = 1.0;
    vblk.bottomRightCorner(n - 1, n - 1) = sub.v;
    out.u = ublk * u1.adjoint();
    out.v = v1 * vblk;
    out.t = Matrix::Zero(n, n);
    out.s = Matrix::Zero(n, n);
    out.t(0, 0) = a1(0, 0);
    out.s(0, 0) = b1(0, 0);
    out.t.block(0, 1, 1, n - 1) = a1.block(0, 1, 1, n - 1) * sub.v;
    out.s.block(0, 1, 1, n - 1) = b1.block(0, 1, 1, n - 1) * sub.v;
    out.t.bottomRightCorner(n - 1, n - 1) = sub.t;
    out.s.bottomRightCorner(n - 1, n - 1) = sub.s;
    return out;
}

} // namespace detail

inline GsdResult gsd(const Pencil& p, const Tolerances& tol = {}) {
    detail::GsdParts parts = detail::gsd_recurse(
        p.a, p.b, tol, std::max({p.scale(), tol.scale_hint, 1e-300}));
    GsdResult out{std::move(parts.u), std::move(parts.v), std::move(parts.t),
                  std::move(parts.s)};
    const Eigen::Index n = p.dim();
    const Matrix id = Matrix::Identity(n, n);
    const double res_a = (out.u * p.a * out.v - out.t).norm();
    const double res_b = (out.u * p.b * out.v - out.s).norm();
    const double ortho = std::max((out.u.adjoint() * out.u - id).norm(),
                                  (out.v.adjoint() * out.v - id).norm());
    const double gate_a = tol.residual * std::max(p.a.norm(), 1e-300);
    const double gate_b = tol.residual * std::max(p.b.norm(), 1e-300);
    if (res_a > gate_a || res_b > gate_b || ortho > tol.residual)
        throw ConvergenceError(
            "gsd: postcondition residuals exceed tolerance (|UAV-T|=" +
            std::to_string(res_a) + ", |UBV-S|=" + std::to_string(res_b) +
            ", orthogonality=" + std::to_string(ortho) + ")");
    return out;
}

// Full generalized spectrum from the diagonal pairs of the GSD, finite values
// first (sorted by real then imaginary part), infinite ones last.  A pair
// that is numerically (0, 0) means the pencil has no spectrum.
inline std::vector<GenEig> generalized_eigenvalues(const Pencil& p,
                                                   const Tolerances& tol = {}) {
    GsdResult g = gsd(p, tol);
    const double floor = tol.zero * std::max({p.scale(), tol.scale_hint, 1e-300});
    std::vector<GenEig> out;
    out.reserve(p.dim());
    for (Eigen::Index i = 0; i < p.dim(); ++i) {
        const Complex t = g.t(i, i), s = g.s(i, i);
        if (std::abs(t) <= floor && std::abs(s) <= floor)
            throw SingularPencilError(
                "pencil is singular: diagonal pair at position " + std::to_string(i) +
                " is numerically (0, 0)");
        out.push_back(GenEig::canonical(t, s, floor));
    }
    std::sort(out.begin(), out.end(), [](const GenEig& x, const GenEig& y) {
        if (x.is_infinite() != y.is_infinite()) return y.is_infinite();
        if (x.is_infinite()) return false;
        const Complex vx = x.value(), vy = y.value();
        if (vx.real() != vy.real()) return vx.real() < vy.real();
        return vx.imag() < vy.imag();
    });
    return out;
}

struct RegularityReport {
    bool regular = false;
    std::optional<Complex> witness_lambda;  // first ladder shift with full rank
    Complex det_a{0.0, 0.0};
    Complex det_b{0.0, 0.0};
    std::optional<Vector> common_kernel_vector;  // unit vector, when one exists
};

// Regularity probe: walk the deterministic shift ladder and accept the first
// full-rank evaluation.  n+1 failures prove det(A - lambda*B) == 0, since the
// degree is at most n.
inline RegularityReport is_regular(const Pencil& p, const Tolerances& tol = {}) {
    RegularityReport rep;
    rep.det_a = p.a.determinant();
    rep.det_b = p.b.determinant();
    const Eigen::Index n = p.dim();
    const double floor_scale = std::max({p.scale(), tol.scale_hint, 1e-300});
    for (const Complex& lambda : shift_ladder(static_cast<int>(n) + 1)) {
        if (detail::full_rank_ratio(p.a - lambda * p.b, tol, floor_scale).first) {
            rep.regular = true;
            rep.witness_lambda = lambda;
            return rep;
        }
    }
    Matrix stacked(2 * n, n);
    stacked << p.a, p.b;
    auto [smin, v] = smallest_singular_pair(stacked);
    if (n > 0 && smin <= tol.zero * floor_scale) rep.common_kernel_vector = v;
    return rep;
}

// Pencil of k-compounds (A, B)^(k) = A^(k) - lambda*B^(k).
inline Pencil kcompound_pencil(const Pencil& p, int k) {
    return Pencil(kcompound_matrix(p.a, k), kcompound_matrix(p.b, k));
}

// Natural zero-test scale of the k-compound: minors of a matrix of norm s
// carry rounding dirt at eps * s^k, so s^k is the right scale_hint when
// working with (A, B)^(k).
inline double compound_scale_hint(const Pencil& p, int k) {
    return std::pow(p.scale(), k);
}

namespace detail {

// Wedge witness for a singular compound pencil: with x in ker(A) and
// y in ker(B), the compound of [x y w_1 ... w_{k-2}] (orthonormal completion)
// is annihilated by both A^(k) and B^(k).  Nearly parallel kernels fall back
// to [x w_1 ... w_{k-1}].
inline Vector compound_kernel_witness(const Matrix& a, const Matrix& b, int k) {
    const Eigen::Index n = a.rows();
    Vector x = smallest_singular_pair(a).second;
    Vector y = smallest_singular_pair(b).second;
    Matrix seed(n, 2);
    seed << x, y;
    Eigen::JacobiSVD<Matrix> svd(seed, Eigen::ComputeFullU);
    const bool parallel = svd.singularValues()(1) <= 1e-8;
    Matrix cols(n, k);
    if (parallel) {
        cols.col(0) = x;
        Matrix comp = Eigen::JacobiSVD<Matrix>(x, Eigen::ComputeFullU).matrixU();
        cols.rightCols(k - 1) = comp.middleCols(1, k - 1);
    } else {
        cols.col(0) = x;
        cols.col(1) = y;
        if (k > 2) cols.rightCols(k - 2) = svd.matrixU().middleCols(2, k - 2);
    }
    Vector z = kcompound_matrix(cols, k).col(0);
    return z / z.norm();
}

} // namespace detail

// Regularity of the compound pencil, decided by the determinant test: for
// k >= 2, (A, B)^(k) is singular exactly when det(A) and det(B) both vanish
// (tested as numerical rank deficiency).  When singular, a common kernel
// witness z with A^(k) z = B^(k) z = 0 is attached.
inline RegularityReport compound_regularity(const Pencil& p, int k,
                                            const Tolerances& tol = {}) {
    const Eigen::Index n = p.dim();
    if (k < 2 || k > n)
        throw InvalidOrderError("compound_regularity: order k=" + std::to_string(k) +
                                " out of range 2.." + std::to_string(n));
    RegularityReport rep;
    rep.det_a = p.a.determinant();
    rep.det_b = p.b.determinant();
    const bool def_a = numerical_rank(p.a, tol.rank) < n;
    const bool def_b = numerical_rank(p.b, tol.rank) < n;
    rep.regular = !(def_a && def_b);
    if (rep.regular) {
        Pencil cp = kcompound_pencil(p, k);
        for (const Complex& lambda : shift_ladder(static_cast<int>(cp.dim()) + 1)) {
            if (numerical_rank(cp.a - lambda * cp.b, tol.rank) == cp.dim()) {
                rep.witness_lambda = lambda;
                break;
            }
        }
    } else {
        Vector z = detail::compound_kernel_witness(p.a, p.b, k);
        const double scale_k =
            std::max(std::pow(std::max(p.scale(), 1.0), k), 1e-300);
        const double res = std::max((kcompound_matrix(p.a, k) * z).norm(),
                                    (kcompound_matrix(p.b, k) * z).norm());
        if (res > tol.residual * scale_k)
            throw ConvergenceError(
                "compound_regularity: witness residual " + std::to_string(res) +
                " exceeds tolerance");
        rep.common_kernel_vector = z;
    }
    return rep;
}

// Finite eigenpair of a pencil.
struct Eigenpair {
    Complex lambda;
    Vector v;
};

// Unit eigenvector for a generalized eigenvalue: kernel direction of
// beta*A - alpha*B.
inline Vector eigenvector_for(const Pencil& p, const GenEig& e) {
    return smallest_singular_pair(e.beta * p.a - e.alpha * p.b).second;
}

// Compound eigenpair: k finite eigenpairs of (A, B) combine into the
// eigenvalue lambda_1*...*lambda_k of (A, B)^(k) with eigenvector equal to
// the k-compound of the stacked eigenvectors.
inline Eigenpair compound_eigenpair(const Pencil& p, const std::vector<Eigenpair>& pairs,
                                    const Tolerances& tol = {}) {
    const int k = static_cast<int>(pairs.size());
    const Eigen::Index n = p.dim();
    if (k < 1 || k > n)
        throw InvalidOrderError("compound_eigenpair: need 1 <= k <= " +
                                std::to_string(n) + " eigenpairs, got " +
                                std::to_string(k));
    Matrix stacked(n, k);
    for (int i = 0; i < k; ++i) {
        const auto& [lambda, v] = pairs[i];
        const double vn = v.norm();
        if (vn == 0.0) throw NotAnEigenpairError("compound_eigenpair: zero eigenvector", 0.0);
        const double res = (p.a * v - lambda * (p.b * v)).norm() /
                           (vn * std::max(p.a.norm() + std::abs(lambda) * p.b.norm(), 1e-300));
        if (res > tol.residual)
            throw NotAnEigenpairError(
                "compound_eigenpair: pair " + std::to_string(i) +
                " fails the eigenpair residual check (" + std::to_string(res) + ")",
                res);
        stacked.col(i) = v / vn;
    }
    Complex lambda = 1.0;
    for (const auto& pr : pairs) lambda *= pr.lambda;
    Vector w = kcompound_matrix(stacked, k).col(0);
    if (w.norm() <= tol.residual)
        throw HypothesisError(
            "compound_eigenpair: eigenvectors are linearly dependent, the wedge vanishes");
    return {lambda, w};
}

} // namespace pencilk
