#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <string>
#include <vector>

#include "pencilk/errors.hpp"
#include "pencilk/numeric.hpp"

namespace pencilk {

struct DrazinResult {
    int index = 0;                            // smallest q with rank A^q = rank A^{q+1}
    Matrix inverse;                           // the Drazin inverse A^D
    std::vector<Eigen::Index> rank_sequence;  // ranks of A^0, ..., A^{index+1}
};

namespace detail {

// Rank of a power of the 2-norm-normalized matrix.  Powers of a nilpotent
// part decay to pure rounding dirt, so the cutoff needs an absolute floor on
// the normalized scale in addition to the usual relative convention.
inline Eigen::Index power_rank(const Matrix& p, double user_rank_tol, double norm_pow,
                               double trust_floor) {
    const Eigen::Index n = p.rows();
    Eigen::JacobiSVD<Matrix> svd(p);
    const auto& sv = svd.singularValues();
    double cut = 16.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon();
    cut = std::max(cut, rank_cutoff(sv, n, n, -1.0));
    cut = std::max(cut, trust_floor);
    if (user_rank_tol >= 0.0 && norm_pow > 0.0)
        cut = std::max(cut, user_rank_tol / norm_pow);  // override is on the original scale
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > cut) ++r;
    return r;
}

struct DrazinCore {
    int index = 0;
    std::vector<Eigen::Index> ranks;   // ranks of hat_a^0 .. hat_a^{index+1}
    std::vector<Matrix> powers;        // hat_a^0 .. hat_a^{index+1}
    double norm2 = 0.0;                // 2-norm of the input
    Matrix hat;                        // input / norm2
};

inline DrazinCore drazin_core(const Matrix& a, const Tolerances& tol) {
    if (a.rows() != a.cols())
        throw ShapeError("drazin: matrix must be square, got " + std::to_string(a.rows()) +
                         "x" + std::to_string(a.cols()));
    require_finite(a, "drazin");
    DrazinCore core;
    const Eigen::Index n = a.rows();
    core.norm2 = (a.size() == 0 || a.norm() == 0.0)
                     ? 0.0
                     : Eigen::JacobiSVD<Matrix>(a).singularValues()(0);
    // A matrix derived from a larger object (a compound, say) can be pure
    // rounding dirt; the scale hint anchors the zero test to the source scale.
    const double zero_floor = (tol.scale_hint > 0.0) ? tol.zero * tol.scale_hint : 0.0;
    if (core.norm2 <= zero_floor) core.norm2 = 0.0;
    core.hat = (core.norm2 > 0.0) ? Matrix(a / core.norm2) : Matrix(Matrix::Zero(n, n));
    const double trust_floor = (core.norm2 > 0.0) ? zero_floor / core.norm2 : 0.0;
    core.powers.push_back(Matrix::Identity(n, n));
    core.ranks.push_back(n);
    double norm_pow = 1.0;
    while (true) {
        core.powers.push_back(core.powers.back() * core.hat);
        norm_pow *= core.norm2;
        core.ranks.push_back(power_rank(core.powers.back(), tol.rank, norm_pow, trust_floor));
        const std::size_t p = core.ranks.size() - 1;
        if (core.ranks[p] == core.ranks[p - 1]) {
            core.index = static_cast<int>(p - 1);
            return core;
        }
        // ranks strictly decrease until stagnation, so p <= n always; guard anyway
        if (p > static_cast<std::size_t>(n))
            throw ConvergenceError("drazin: rank sequence failed to stagnate");
    }
}

} // namespace detail

inline int drazin_index(const Matrix& a, const Tolerances& tol = {}) {
    return detail::drazin_core(a, tol).index;
}

// Drazin inverse via the power sandwich A^D = A^q (A^{2q+1})^+ A^q, with the
// pseudoinverse truncated to exactly the core rank.  The input is normalized
// by its 2-norm first ((cA)^D = c^{-1} A^D keeps that cheap to undo).
inline DrazinResult drazin_inverse(const Matrix& a, const Tolerances& tol = {}) {
    detail::DrazinCore core = detail::drazin_core(a, tol);
    const Eigen::Index n = a.rows();
    const int q = core.index;
    DrazinResult out;
    out.index = q;
    out.rank_sequence = core.ranks;
    const Eigen::Index r = core.ranks.back();  // core rank
    if (r == 0 || core.norm2 == 0.0) {
        out.inverse = Matrix::Zero(n, n);  // nilpotent (or zero) matrix
        return out;
    }
    const Matrix& aq = core.powers[static_cast<std::size_t>(q)];
    Matrix a2q1 = aq * aq * core.hat;
    Eigen::JacobiSVD<Matrix> svd(a2q1, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double condition = sv(0) / sv(r - 1);
    if (!(condition <= tol.condition_bound))
        throw IllConditionedError(
            "drazin: invertible core is ill-conditioned (condition " +
                std::to_string(condition) + " exceeds bound " +
                std::to_string(tol.condition_bound) + ")",
            condition);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    for (Eigen::Index i = 0; i < r; ++i) inv(i) = 1.0 / sv(i);
    Matrix pinv_a2q1 = svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
    out.inverse = (aq * pinv_a2q1 * aq) / core.norm2;
    return out;
}

} // namespace pencilk
