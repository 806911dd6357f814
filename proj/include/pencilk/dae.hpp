#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pencilk/combinat.hpp"
#include "pencilk/compound.hpp"
#include "pencilk/drazin.hpp"
#include "pencilk/errors.hpp"
#include "pencilk/numeric.hpp"
#include "pencilk/pencil.hpp"

namespace pencilk {

// The linear difference-algebraic equation B x(j+1) = A x(j).
struct DaeSystem {
    Matrix a;
    Matrix b;

    DaeSystem(Matrix a_, Matrix b_) : a(std::move(a_)), b(std::move(b_)) {
        if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
            throw ShapeError("DaeSystem: A and B must be square of equal dimension, got " +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                             " and " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()));
        require_finite(a, "DaeSystem A");
        require_finite(b, "DaeSystem B");
    }

    Eigen::Index dim() const { return a.rows(); }
    Pencil pencil() const { return Pencil(a, b); }
};

// Full solvability record of B x(j+1) = A x(j).  For untractable systems only
// `tractable` and `verdict` are meaningful; everything else stays empty.
struct DaeAnalysis {
    DaeSystem system;
    bool tractable = false;
    Complex shift_lambda{0.0, 0.0};  // ladder shift that regularized A - lambda*B
    Matrix b_hat;                    // (A - lambda*B)^{-1} B
    Matrix a_hat;                    // (A - lambda*B)^{-1} A = I + lambda*b_hat
    int drazin_index = 0;
    Matrix propagator;               // (b_hat)^D * a_hat
    Matrix consistency_basis;        // orthonormal columns spanning V^1 = range(b_hat^index)
    std::vector<GenEig> finite_eigs;
    bool stable = false;
    std::string verdict = "untractable";  // stable | marginal | unstable | untractable

    explicit DaeAnalysis(DaeSystem sys) : system(std::move(sys)) {}
    Eigen::Index consistency_dim() const { return consistency_basis.cols(); }
};

namespace detail {

// Strict classification with a guard band: eigenvalues within `margin` of the
// unit circle are "marginal" so the verdict cannot flap on rounding.
inline std::string classify_stability(const std::vector<GenEig>& finite, double margin) {
    bool unstable = false, band = false;
    for (const GenEig& e : finite) {
        const double m = std::abs(e.value());
        if (m > 1.0 + margin)
            unstable = true;
        else if (m >= 1.0 - margin)
            band = true;
    }
    if (unstable) return "unstable";
    if (band) return "marginal";
    return "stable";
}

} // namespace detail

// Tractability and shifted-system analysis.  The shift is the first
// regularizing value on the deterministic ladder unless overridden (any
// regularizing shift yields the same propagator and consistency space).
inline DaeAnalysis analyze(const DaeSystem& sys, const Tolerances& tol = {},
                           std::optional<Complex> shift_override = {}) {
    DaeAnalysis out(sys);
    const Eigen::Index n = sys.dim();
    const Pencil p = sys.pencil();
    const RegularityReport reg = is_regular(p, tol);
    if (!reg.regular) return out;
    out.tractable = true;
    Complex lambda = *reg.witness_lambda;
    if (shift_override) {
        lambda = *shift_override;
        const double floor_scale = std::max({p.scale(), tol.scale_hint, 1e-300});
        if (!detail::full_rank_ratio(p.a - lambda * p.b, tol, floor_scale).first)
            throw std::invalid_argument("analyze: override shift does not regularize the pencil");
    }
    out.shift_lambda = lambda;
    Eigen::PartialPivLU<Matrix> lu(p.a - lambda * p.b);
    out.b_hat = lu.solve(sys.b);
    out.a_hat = lu.solve(sys.a);
    const double hat_scale = std::max(1.0, out.b_hat.norm() * out.a_hat.norm());
    if ((out.b_hat * out.a_hat - out.a_hat * out.b_hat).norm() > tol.residual * hat_scale)
        throw ConvergenceError("analyze: shifted system matrices fail to commute");
    const DrazinResult dz = drazin_inverse(out.b_hat, tol);
    out.drazin_index = dz.index;
    out.propagator = dz.inverse * out.a_hat;
    const Eigen::Index s = dz.rank_sequence.back();
    Matrix power = Matrix::Identity(n, n);
    for (int i = 0; i < dz.index; ++i) power = power * out.b_hat;
    Eigen::JacobiSVD<Matrix> svd(power, Eigen::ComputeThinU);
    out.consistency_basis = svd.matrixU().leftCols(s);
    for (const GenEig& e : generalized_eigenvalues(p, tol))
        if (e.is_finite()) out.finite_eigs.push_back(e);
    if (static_cast<Eigen::Index>(out.finite_eigs.size()) != s)
        throw ConvergenceError("analyze: " + std::to_string(out.finite_eigs.size()) +
                               " finite eigenvalues disagree with consistency dimension " +
                               std::to_string(s));
    out.verdict = detail::classify_stability(out.finite_eigs, tol.stability_margin);
    out.stable = (out.verdict == "stable");
    return out;
}

struct ConsistencyCheck {
    bool consistent = false;
    double distance = 0.0;  // orthogonal distance from the consistency subspace
};

inline ConsistencyCheck is_consistent(const DaeAnalysis& an, const Vector& x0,
                                      const Tolerances& tol = {}) {
    if (!an.tractable)
        throw UntractableSystemError("is_consistent: the system is not tractable");
    if (x0.size() != an.system.dim())
        throw ShapeError("is_consistent: state has size " + std::to_string(x0.size()) +
                         ", system dimension is " + std::to_string(an.system.dim()));
    const Matrix& pi = an.consistency_basis;
    const double dist = (x0 - pi * (pi.adjoint() * x0)).norm();
    return {dist <= tol.consistency * x0.norm(), dist};
}

struct Trajectory {
    std::vector<int> times;         // 0..N
    std::vector<Vector> states;     // N+1 states
    std::vector<double> residuals;  // ||B x(j+1) - A x(j)|| for each step
};

inline Trajectory propagate(const DaeAnalysis& an, const Vector& x0, int steps,
                            const Tolerances& tol = {}) {
    if (!an.tractable)
        throw UntractableSystemError("propagate: the system is not tractable");
    if (steps < 0) throw std::invalid_argument("propagate: negative step count");
    const ConsistencyCheck chk = is_consistent(an, x0, tol);
    if (!chk.consistent)
        throw InconsistentInitialConditionError(
            "propagate: initial state lies outside the consistency subspace (distance " +
                std::to_string(chk.distance) + ")",
            chk.distance);
    Trajectory tr;
    tr.times.reserve(static_cast<std::size_t>(steps) + 1);
    tr.states.reserve(static_cast<std::size_t>(steps) + 1);
    tr.residuals.reserve(static_cast<std::size_t>(steps));
    const double mat_scale = an.system.a.norm() + an.system.b.norm();
    Vector x = x0;
    tr.times.push_back(0);
    tr.states.push_back(x);
    for (int j = 1; j <= steps; ++j) {
        Vector next = an.propagator * x;
        const double res = (an.system.b * next - an.system.a * x).norm();
        const double gate =
            tol.residual * mat_scale *
            (x.norm() + next.norm() + std::numeric_limits<double>::epsilon() * x0.norm());
        if (res > gate)
            throw ConvergenceError("propagate: step residual " + std::to_string(res) +
                                   " exceeds tolerance at step " + std::to_string(j));
        tr.residuals.push_back(res);
        tr.times.push_back(j);
        tr.states.push_back(next);
        x = std::move(next);
    }
    return tr;
}

// The induced system B^(k) y(j+1) = A^(k) y(j) on C(n,k)-dimensional states.
inline DaeSystem kcompound_dae(const DaeSystem& sys, int k) {
    return DaeSystem(kcompound_matrix(sys.a, k), kcompound_matrix(sys.b, k));
}

struct VolumeTrace {
    int k = 0;
    std::vector<Vector> compound_states;  // y(j) = X(j)^(k)
    std::vector<double> volumes;          // |y(j)|_2
};

// Propagates a frame of k consistent initial columns and tracks the compound
// vector y(j) = X(j)^(k), verifying at every step that it solves the
// k-compound system.
inline VolumeTrace volume_trace(const DaeSystem& sys, const Matrix& initial_columns,
                                int steps, const Tolerances& tol = {}) {
    const Eigen::Index n = sys.dim();
    const int k = static_cast<int>(initial_columns.cols());
    if (k < 1 || k > n)
        throw InvalidOrderError("volume_trace: column count " + std::to_string(k) +
                                " out of range 1.." + std::to_string(n));
    if (initial_columns.rows() != n)
        throw ShapeError("volume_trace: initial columns have " +
                         std::to_string(initial_columns.rows()) + " rows, expected " +
                         std::to_string(n));
    if (steps < 0) throw std::invalid_argument("volume_trace: negative step count");
    const DaeAnalysis an = analyze(sys, tol);
    if (!an.tractable)
        throw UntractableSystemError("volume_trace: the system is not tractable");
    for (Eigen::Index c = 0; c < initial_columns.cols(); ++c) {
        const ConsistencyCheck chk = is_consistent(an, initial_columns.col(c), tol);
        if (!chk.consistent)
            throw InconsistentInitialConditionError(
                "volume_trace: column " + std::to_string(c) +
                    " is not a consistent initial state (distance " +
                    std::to_string(chk.distance) + ")",
                chk.distance, static_cast<long>(c));
    }
    const Matrix ak = kcompound_matrix(sys.a, k);
    const Matrix bk = kcompound_matrix(sys.b, k);
    const double mat_scale = ak.norm() + bk.norm();
    VolumeTrace out;
    out.k = k;
    Matrix x = initial_columns;
    Vector y = kcompound_matrix(x, k).col(0);
    out.compound_states.push_back(y);
    out.volumes.push_back(y.norm());
    for (int j = 1; j <= steps; ++j) {
        Matrix xn = an.propagator * x;
        Vector yn = kcompound_matrix(xn, k).col(0);
        const double res = (bk * yn - ak * y).norm();
        // a computed wedge is only trustworthy to rounding dirt at the frame
        // scale ||X||^k, which dominates |y| when the columns degenerate
        const double frame_scale = std::pow(x.norm(), k) + std::pow(xn.norm(), k);
        const double gate = tol.residual * mat_scale * (y.norm() + yn.norm() + frame_scale);
        if (res > gate)
            throw ConvergenceError("volume_trace: compound residual " + std::to_string(res) +
                                   " exceeds tolerance at step " + std::to_string(j));
        out.compound_states.push_back(yn);
        out.volumes.push_back(yn.norm());
        x = std::move(xn);
        y = std::move(yn);
    }
    return out;
}

// dim V^k by direct analysis of the k-compound system, cross-checked against
// the binomial law C(dim V^1, k).  Requires every compound pencil regular,
// which holds exactly when the base pencil is regular and not both
// determinants vanish.
inline int compound_consistency_dim(const DaeSystem& sys, int k, const Tolerances& tol = {}) {
    const Eigen::Index n = sys.dim();
    if (k < 1 || k > n)
        throw InvalidOrderError("compound_consistency_dim: order k=" + std::to_string(k) +
                                " out of range 1.." + std::to_string(n));
    const Pencil p = sys.pencil();
    if (!is_regular(p, tol).regular)
        throw HypothesisError("compound_consistency_dim: the base pencil is singular");
    if (numerical_rank(sys.a, tol.rank) < n && numerical_rank(sys.b, tol.rank) < n)
        throw HypothesisError(
            "compound_consistency_dim: det(A) = det(B) = 0 makes every compound pencil "
            "singular; use compound_singular_witness instead");
    const DaeAnalysis base = analyze(sys, tol);
    Tolerances ctol = tol;
    ctol.scale_hint = compound_scale_hint(p, k);
    const DaeAnalysis comp = analyze(kcompound_dae(sys, k), ctol);
    if (!comp.tractable)
        throw ConvergenceError(
            "compound_consistency_dim: the compound pencil resolved as singular despite a "
            "regular base with a nonvanishing determinant");
    const std::int64_t expected = binomial(static_cast<int>(base.consistency_dim()), k);
    if (comp.consistency_dim() != static_cast<Eigen::Index>(expected))
        throw ConvergenceError("compound_consistency_dim: direct dimension " +
                               std::to_string(comp.consistency_dim()) +
                               " violates the binomial law value " + std::to_string(expected));
    return static_cast<int>(comp.consistency_dim());
}

// When the base pencil is regular but det(A) = det(B) = 0, every compound
// pencil is singular and a nonzero z with A^(k) z = B^(k) z = 0 exists; the
// constant sequence y(j) == z then solves the k-compound system, so compound
// solutions are never unique.
inline Vector compound_singular_witness(const DaeSystem& sys, int k,
                                        const Tolerances& tol = {}) {
    const Eigen::Index n = sys.dim();
    if (k < 2 || k > n)
        throw InvalidOrderError("compound_singular_witness: order k=" + std::to_string(k) +
                                " out of range 2.." + std::to_string(n));
    const Pencil p = sys.pencil();
    if (!is_regular(p, tol).regular)
        throw HypothesisError("compound_singular_witness: the base pencil must be regular");
    if (!(numerical_rank(sys.a, tol.rank) < n && numerical_rank(sys.b, tol.rank) < n))
        throw HypothesisError("compound_singular_witness: requires det(A) = det(B) = 0");
    const RegularityReport rep = compound_regularity(p, k, tol);
    return *rep.common_kernel_vector;
}

struct StableSubspaceReport {
    bool compound_stable = false;
    int guaranteed_stable_dim = 0;
    Matrix stable_basis;  // consistent initial conditions with decaying solutions
};

// Product criterion on the k-compound spectrum: when every k-fold product of
// finite eigenvalue moduli is inside the unit disk, a (dim V^1 - k + 1)-
// dimensional set of decaying consistent initial conditions is guaranteed.
inline StableSubspaceReport stable_subspace_bound(const DaeSystem& sys, int k,
                                                  const Tolerances& tol = {}) {
    const DaeAnalysis an = analyze(sys, tol);
    if (!an.tractable)
        throw UntractableSystemError("stable_subspace_bound: the system is not tractable");
    const Eigen::Index s = an.consistency_dim();
    if (k < 1 || k > s)
        throw InvalidOrderError("stable_subspace_bound: order k=" + std::to_string(k) +
                                " out of range 1..dim(V^1)=" + std::to_string(s));
    StableSubspaceReport rep;
    rep.stable_basis = Matrix(sys.dim(), 0);
    std::vector<double> moduli;
    moduli.reserve(an.finite_eigs.size());
    for (const GenEig& e : an.finite_eigs) moduli.push_back(std::abs(e.value()));
    rep.compound_stable = true;
    const KIndexer subsets(static_cast<int>(s), k);
    for (const KTuple& t : subsets.tuples()) {
        double prod = 1.0;
        for (int i : t) prod *= moduli[static_cast<std::size_t>(i - 1)];
        if (!(prod < 1.0 - tol.stability_margin)) {
            rep.compound_stable = false;
            return rep;
        }
    }
    rep.guaranteed_stable_dim = static_cast<int>(s) - k + 1;
    // invariant-subspace basis: ordered Schur of the propagator restricted to
    // V^1, stable eigenvalues leading (robust for defective eigenvalues too)
    const Matrix& pi = an.consistency_basis;
    const double margin = tol.stability_margin;
    const auto stable_first = [margin](Complex z) { return std::abs(z) < 1.0 - margin; };
    const auto [q, r] = ordered_schur(pi.adjoint() * an.propagator * pi, stable_first);
    Eigen::Index count = 0;
    while (count < s && stable_first(r(count, count))) ++count;
    if (count < rep.guaranteed_stable_dim)
        throw ConvergenceError("stable_subspace_bound: restricted spectrum yields " +
                               std::to_string(count) +
                               " stable directions, fewer than the guaranteed " +
                               std::to_string(rep.guaranteed_stable_dim));
    rep.stable_basis = pi * q.leftCols(count);
    return rep;
}

struct TimeVaryingStep {
    Vector x_next;
    double residual = 0.0;        // ||B(j+1) x_next - A(j) x_now||
    Eigen::Index freedom_dim = 0; // nullity of B(j+1); nonzero flags non-uniqueness
};

// Guarded least-squares stepper for B(j+1) x(j+1) = A(j) x(j).  There is no
// time-varying uniqueness theory here: the minimum-norm solution is returned
// and the pathologies are reported, not decided.
inline TimeVaryingStep step_time_varying(const Matrix& b_next, const Matrix& a_now,
                                         const Vector& x_now, const Tolerances& tol = {}) {
    if (a_now.cols() != x_now.size())
        throw ShapeError("step_time_varying: A(j) has " + std::to_string(a_now.cols()) +
                         " columns, state has size " + std::to_string(x_now.size()));
    if (b_next.rows() != a_now.rows())
        throw ShapeError("step_time_varying: B(j+1) and A(j) row counts differ");
    require_finite(b_next, "step_time_varying B(j+1)");
    require_finite(a_now, "step_time_varying A(j)");
    require_finite(x_now, "step_time_varying state");
    const PinvResult ps = pinv(b_next, tol.rank);
    TimeVaryingStep out;
    const Vector rhs = a_now * x_now;
    out.x_next = ps.pinv * rhs;
    out.residual = (b_next * out.x_next - rhs).norm();
    out.freedom_dim = b_next.cols() - ps.retained;
    return out;
}

} // namespace pencilk
