#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "pencilk/dae.hpp"
#include "pencilk/drazin.hpp"
#include "pencilk/io.hpp"

namespace pencilk {
namespace examples {

// --- canonical worked systems ---------------------------------------------

// Rotation on a 2D consistency subspace; every finite eigenvalue sits on the
// unit circle and 2-parallelotope areas are conserved.
inline DaeSystem periodic_system() {
    Matrix a{{0.0, 1.0, 0.0}, {-1.0, 0.0, 2.0}, {-1.0, 0.0, 1.0}};
    Matrix b{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 1.0, 0.0}};
    return {a, b};
}

constexpr double leslie_b1 = 1.1;
constexpr double leslie_b2 = 2.3;
constexpr double leslie_p1 = 0.9;
constexpr double leslie_p2 = 0.7;

inline Matrix leslie_matrix() {
    return Matrix{{leslie_b1, leslie_b2, 0.0},
                  {leslie_p1, 0.0, 0.0},
                  {0.0, leslie_p2, 0.0}};
}

// Backward-running 3-stage population model: L x(j+1) = x(j).
inline DaeSystem leslie_system() {
    return {Matrix(Matrix::Identity(3, 3)), leslie_matrix()};
}

// Group inverse of the Leslie matrix in closed form.
inline Matrix leslie_drazin_closed_form() {
    const double b1 = leslie_b1, b2 = leslie_b2, p1 = leslie_p1, p2 = leslie_p2;
    return Matrix{{0.0, 1.0 / p1, 0.0},
                  {1.0 / b2, -b1 / (b2 * p1), 0.0},
                  {-b1 * p2 / (b2 * b2 * p1),
                   p2 * (b1 * b1 + b2 * p1) / (b2 * b2 * p1 * p1), 0.0}};
}

// Decay rate of the stable mode: the finite eigenvalue inside the unit disk.
inline double leslie_stable_rate() {
    return 2.0 / (leslie_b1 +
                  std::sqrt(leslie_b1 * leslie_b1 + 4.0 * leslie_b2 * leslie_p1));
}

// diag(0, 1/2, 1) / diag(1, 1, 0): regular base pencil with both dets zero,
// so every compound pencil is singular.
inline DaeSystem singular_system() {
    return {Matrix(Vector{{0.0, 0.5, 1.0}}.asDiagonal()),
            Matrix(Vector{{1.0, 1.0, 0.0}}.asDiagonal())};
}

// --- canonical projection basis -------------------------------------------

// Orthonormal basis of range(m) with a deterministic orientation: the
// projector's columns are orthonormalized in index order and each basis
// vector's largest entry is made positive real.  Axis-aligned ranges come out
// as plain coordinate axes.
inline Matrix canonical_range_basis(const Matrix& m) {
    const Matrix u = orthonormal_range(m);
    const Matrix proj = u * u.adjoint();
    const Eigen::Index n = proj.rows(), s = u.cols();
    Matrix basis(n, s);
    Eigen::Index got = 0;
    for (Eigen::Index c = 0; c < n && got < s; ++c) {
        Vector v = proj.col(c);
        for (Eigen::Index i = 0; i < got; ++i) v -= basis.col(i).dot(v) * basis.col(i);
        const double norm = v.norm();
        if (norm <= 1e-6) continue;
        v /= norm;
        Eigen::Index pivot = 0;
        v.cwiseAbs().maxCoeff(&pivot);
        const Complex lead = v(pivot);
        basis.col(got++) = v * (std::conj(lead) / std::abs(lead));
    }
    if (got != s)
        throw ConvergenceError("canonical_range_basis: projector columns span only " +
                               std::to_string(got) + " of " + std::to_string(s) +
                               " directions");
    return basis;
}

// --- structured reproduction data ------------------------------------------

struct PeriodicData {
    DaeSystem system;
    DaeAnalysis analysis;
    Matrix projection;   // canonical basis of range(b_hat)
    Trajectory orbit1;   // from (1, 1, 0)
    Trajectory orbit2;   // from (1.5, 0.75, 0)
    Matrix projected1;   // projection-coordinates of orbit1, one column per step
    Matrix projected2;
    VolumeTrace volume;  // k = 2 trace of both initial conditions
};

inline PeriodicData periodic_data(int steps = 4) {
    DaeSystem sys = periodic_system();
    DaeAnalysis an = analyze(sys);
    Matrix projection = canonical_range_basis(an.b_hat);
    const Vector x1 = Vector{{1.0, 1.0, 0.0}};
    const Vector x2 = Vector{{1.5, 0.75, 0.0}};
    Trajectory orbit1 = propagate(an, x1, steps);
    Trajectory orbit2 = propagate(an, x2, steps);
    const auto project = [&](const Trajectory& tr) {
        Matrix p(projection.cols(), static_cast<Eigen::Index>(tr.states.size()));
        for (std::size_t j = 0; j < tr.states.size(); ++j)
            p.col(static_cast<Eigen::Index>(j)) = projection.adjoint() * tr.states[j];
        return p;
    };
    Matrix projected1 = project(orbit1);
    Matrix projected2 = project(orbit2);
    Matrix frame(3, 2);
    frame.col(0) = x2;  // column order puts the conserved area at +0.75
    frame.col(1) = x1;
    VolumeTrace volume = volume_trace(sys, frame, steps);
    return {std::move(sys), std::move(an),    std::move(projection),
            std::move(orbit1), std::move(orbit2), std::move(projected1),
            std::move(projected2), std::move(volume)};
}

struct LeslieData {
    DaeSystem system;
    DaeAnalysis analysis;
    DrazinResult drazin;          // of the Leslie matrix itself
    Matrix drazin_closed;         // reference closed form
    StableSubspaceReport bound;   // k = 2
    Trajectory stable_orbit;      // 30 steps from the stable direction
    VolumeTrace volume;           // k = 2 from the two consistency spanners
};

inline LeslieData leslie_data(int stable_steps = 30, int volume_steps = 10) {
    DaeSystem sys = leslie_system();
    DaeAnalysis an = analyze(sys);
    DrazinResult dz = drazin_inverse(leslie_matrix());
    StableSubspaceReport bound = stable_subspace_bound(sys, 2);
    Trajectory stable_orbit = propagate(an, bound.stable_basis.col(0), stable_steps);
    Matrix frame(3, 2);
    frame.col(0) = Vector{{leslie_b1, leslie_p1, 0.0}};
    frame.col(1) = Vector{{leslie_b2, 0.0, leslie_p2}};
    VolumeTrace volume = volume_trace(sys, frame, volume_steps);
    return {std::move(sys),         std::move(an),    std::move(dz),
            leslie_drazin_closed_form(), std::move(bound), std::move(stable_orbit),
            std::move(volume)};
}

struct SingularData {
    DaeSystem system;
    DaeAnalysis analysis;
    Trajectory orbit;     // from (1, 1, 0): the decaying dyadic mode
    DaeSystem compound;   // the 2-compound system
    Vector witness;       // constant nonzero solution of the compound system
};

inline SingularData singular_data(int steps = 4) {
    DaeSystem sys = singular_system();
    DaeAnalysis an = analyze(sys);
    Trajectory orbit = propagate(an, Vector{{1.0, 1.0, 0.0}}, steps);
    DaeSystem compound = kcompound_dae(sys, 2);
    Vector witness = compound_singular_witness(sys, 2);
    return {std::move(sys), std::move(an), std::move(orbit), std::move(compound),
            std::move(witness)};
}

// --- bundles: artifacts plus a reference-value comparison ------------------

struct ExampleArtifact {
    std::string filename;
    std::string content;
};

struct ExampleBundle {
    std::string name;
    std::vector<ExampleArtifact> files;
    std::string summary;
    bool all_match = true;
};

namespace detail {

inline void check_line(ExampleBundle& bundle, const std::string& label, double deviation,
                       double tolerance) {
    const bool ok = deviation <= tolerance;
    bundle.all_match = bundle.all_match && ok;
    bundle.summary += bundle.name + ": " + label + ", deviation " +
                      io::format_real(deviation, 3) + " (tol " +
                      io::format_real(tolerance, 3) + ") -- " + (ok ? "pass" : "FAIL") +
                      "\n";
}

inline std::string projected_csv(const Matrix& coords, int precision) {
    const double floor = io::imag_drop_floor(coords);
    std::vector<std::string> header{"j"};
    for (Eigen::Index i = 0; i < coords.rows(); ++i)
        header.push_back("p" + std::to_string(i + 1));
    std::string out = io::csv_row(header);
    for (Eigen::Index j = 0; j < coords.cols(); ++j) {
        std::vector<std::string> cells{std::to_string(j)};
        for (Eigen::Index i = 0; i < coords.rows(); ++i)
            cells.push_back(io::format_entry_csv(coords(i, j), precision, floor));
        out += io::csv_row(cells);
    }
    return out;
}

inline double spectrum_deviation(const std::vector<GenEig>& got,
                                 const std::vector<GenEig>& reference) {
    return spectra_match_distance(got, reference);
}

} // namespace detail

inline ExampleBundle periodic_bundle(int precision) {
    const PeriodicData data = periodic_data();
    ExampleBundle bundle;
    bundle.name = "periodic";
    bundle.files = {
        {"periodic_a.json", io::write_matrix_json(data.system.a, precision)},
        {"periodic_b.json", io::write_matrix_json(data.system.b, precision)},
        {"periodic_trajectory_1.csv", io::trajectory_csv(data.orbit1, precision)},
        {"periodic_trajectory_2.csv", io::trajectory_csv(data.orbit2, precision)},
        {"periodic_projected_1.csv", detail::projected_csv(data.projected1, precision)},
        {"periodic_projected_2.csv", detail::projected_csv(data.projected2, precision)},
        {"periodic_volume.csv", io::volume_csv(data.volume, precision)},
    };
    double vol_dev = 0.0;
    for (double v : data.volume.volumes) vol_dev = std::max(vol_dev, std::abs(v - 0.75));
    detail::check_line(bundle, "2-parallelotope area constant at 0.75", vol_dev, 1e-9);
    const double orbit_points[4][2] = {{1, 1}, {1, -1}, {-1, -1}, {-1, 1}};
    double orbit_dev = 0.0;
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 2; ++i)
            orbit_dev = std::max(orbit_dev,
                                 std::abs(data.projected1(i, j) -
                                          Complex(orbit_points[j][i])));
    detail::check_line(bundle, "projected orbit visits (1,1) (1,-1) (-1,-1) (-1,1)",
                       orbit_dev, 1e-9);
    const std::vector<GenEig> reference{GenEig::canonical(Complex(0, 1), 1.0),
                                        GenEig::canonical(Complex(0, -1), 1.0),
                                        GenEig::canonical(1.0, 0.0)};
    const auto spectrum = generalized_eigenvalues(data.system.pencil());
    detail::check_line(bundle, "pencil eigenvalues i, -i, inf",
                       detail::spectrum_deviation(spectrum, reference), 1e-8);
    Tolerances ctol;
    ctol.scale_hint = compound_scale_hint(data.system.pencil(), 2);
    const auto spectrum2 =
        generalized_eigenvalues(kcompound_pencil(data.system.pencil(), 2), ctol);
    const std::vector<GenEig> reference2{GenEig::canonical(1.0, 1.0),
                                         GenEig::canonical(1.0, 0.0),
                                         GenEig::canonical(1.0, 0.0)};
    detail::check_line(bundle, "2-compound pencil eigenvalues 1, inf, inf",
                       detail::spectrum_deviation(spectrum2, reference2), 1e-8);
    return bundle;
}

inline ExampleBundle leslie_bundle(int precision) {
    const LeslieData data = leslie_data();
    ExampleBundle bundle;
    bundle.name = "leslie";
    bundle.files = {
        {"leslie_a.json", io::write_matrix_json(data.system.a, precision)},
        {"leslie_b.json", io::write_matrix_json(data.system.b, precision)},
        {"leslie_drazin.json", io::write_matrix_json(data.drazin.inverse, precision)},
        {"leslie_stable_trajectory.csv", io::trajectory_csv(data.stable_orbit, precision)},
        {"leslie_volume.csv", io::volume_csv(data.volume, precision)},
    };
    detail::check_line(bundle, "consistency space dimension 2",
                       std::abs(static_cast<double>(data.analysis.consistency_dim()) - 2.0),
                       0.0);
    detail::check_line(bundle, "Leslie matrix group-inverse index 1",
                       std::abs(static_cast<double>(data.drazin.index) - 1.0), 0.0);
    detail::check_line(
        bundle, "Drazin inverse matches the closed form",
        (data.drazin.inverse - data.drazin_closed).cwiseAbs().maxCoeff(), 1e-10);
    double stable_dev = std::numeric_limits<double>::infinity();
    for (const GenEig& e : data.analysis.finite_eigs)
        stable_dev = std::min(stable_dev, std::abs(e.value() - Complex(leslie_stable_rate())));
    detail::check_line(bundle, "stable eigenvalue 2/(b1+sqrt(b1^2+4 b2 p1))", stable_dev,
                       1e-10);
    detail::check_line(
        bundle, "guaranteed stable dimension 1 at k=2",
        std::abs(static_cast<double>(data.bound.guaranteed_stable_dim) - 1.0), 0.0);
    const double start = data.stable_orbit.states.front().norm();
    detail::check_line(bundle, "stable trajectory decays below 1e-6 by step 30",
                       data.stable_orbit.states.back().norm() / start, 1e-6);
    return bundle;
}

inline ExampleBundle singular_bundle(int precision) {
    const SingularData data = singular_data();
    ExampleBundle bundle;
    bundle.name = "singular";
    Matrix witness_col(data.witness.size(), 1);
    witness_col.col(0) = data.witness;
    bundle.files = {
        {"singular_a.json", io::write_matrix_json(data.system.a, precision)},
        {"singular_b.json", io::write_matrix_json(data.system.b, precision)},
        {"singular_a2.json", io::write_matrix_json(data.compound.a, precision)},
        {"singular_b2.json", io::write_matrix_json(data.compound.b, precision)},
        {"singular_trajectory.csv", io::trajectory_csv(data.orbit, precision)},
        {"singular_witness.csv", io::write_matrix_csv(witness_col, precision)},
    };
    const Matrix proj =
        data.analysis.consistency_basis * data.analysis.consistency_basis.adjoint();
    detail::check_line(bundle, "consistency space spans e1, e2",
                       (proj - Matrix(Vector{{1.0, 1.0, 0.0}}.asDiagonal()))
                           .cwiseAbs()
                           .maxCoeff(),
                       1e-12);
    double dyadic_dev = 0.0;
    for (std::size_t j = 1; j < data.orbit.states.size(); ++j) {
        Vector expected = Vector::Zero(3);
        expected(1) = std::pow(2.0, -static_cast<double>(j));
        dyadic_dev =
            std::max(dyadic_dev, (data.orbit.states[j] - expected).cwiseAbs().maxCoeff());
    }
    detail::check_line(bundle, "trajectory follows x(j) = 2^-j a2 e2 exactly", dyadic_dev,
                       0.0);
    detail::check_line(bundle, "compound matrices are diag(0,0,1/2) and diag(1,0,0)",
                       std::max((data.compound.a -
                                 Matrix(Vector{{0.0, 0.0, 0.5}}.asDiagonal()))
                                    .cwiseAbs()
                                    .maxCoeff(),
                                (data.compound.b -
                                 Matrix(Vector{{1.0, 0.0, 0.0}}.asDiagonal()))
                                    .cwiseAbs()
                                    .maxCoeff()),
                       0.0);
    const double annihilation = std::max((data.compound.a * data.witness).norm(),
                                         (data.compound.b * data.witness).norm());
    detail::check_line(bundle, "witness is a constant nonzero compound solution",
                       annihilation, 1e-12);
    return bundle;
}

inline ExampleBundle bundle(const std::string& name, int precision) {
    if (name == "periodic") return periodic_bundle(precision);
    if (name == "leslie") return leslie_bundle(precision);
    if (name == "singular") return singular_bundle(precision);
    throw ParseError("examples: unknown example name '" + name +
                     "' (expected periodic, leslie, or singular)");
}

} // namespace examples
} // namespace pencilk
