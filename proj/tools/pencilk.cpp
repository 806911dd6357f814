#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <pencilk/compound.hpp>
#include <pencilk/dae.hpp>
#include <pencilk/drazin.hpp>
#include <pencilk/errors.hpp>
#include <pencilk/examples.hpp>
#include <pencilk/io.hpp>
#include <pencilk/pencil.hpp>

namespace io = pencilk::io;
using pencilk::Complex;
using pencilk::Matrix;
using pencilk::Vector;

namespace {

struct Options {
    int precision = 12;
    std::string format = "json";
    double tol_rank = -1.0;
    double tol_residual = 0.0;
    double stability_margin = 0.0;
};

pencilk::Tolerances make_tolerances(const Options& o) {
    pencilk::Tolerances t;
    if (o.tol_rank >= 0.0) t.rank = o.tol_rank;
    if (o.tol_residual > 0.0) t.residual = o.tol_residual;
    if (o.stability_margin > 0.0) t.stability_margin = o.stability_margin;
    return t;
}

// PENCILK_PRECISION seeds the default; the --precision flag wins.
int env_precision() {
    const char* env = std::getenv("PENCILK_PRECISION");
    if (!env) return 12;
    int value = 0;
    const auto [ptr, ec] = std::from_chars(env, env + std::string(env).size(), value);
    if (ec != std::errc() || *ptr != '\0' || value < 1 || value > 17)
        throw pencilk::ParseError(std::string("PENCILK_PRECISION: expected an integer "
                                              "in 1..17, got '") +
                                  env + "'");
    return value;
}

void print_matrix(const Matrix& m, const Options& o) {
    if (o.format == "csv")
        std::cout << io::write_matrix_csv(m, o.precision);
    else
        std::cout << io::write_matrix_json(m, o.precision);
}

Vector column_vector(const Matrix& m, const std::string& what) {
    if (m.cols() == 1) return m.col(0);
    if (m.rows() == 1) return m.transpose().col(0);
    throw pencilk::ShapeError(what + ": expected a single row or column, got " +
                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

// Snaps rounding dirt in either component to zero before rendering.
Complex snap_dirt(Complex v, double floor) {
    if (std::abs(v.real()) <= floor) v = Complex(0.0, v.imag());
    if (std::abs(v.imag()) <= floor) v = Complex(v.real(), 0.0);
    return v;
}

// alpha,beta,lambda table; infinite eigenvalues render as "inf".
std::string eig_table(const std::vector<pencilk::GenEig>& eigs, int precision) {
    Matrix finite(static_cast<Eigen::Index>(eigs.size()), 1);
    Eigen::Index nf = 0;
    for (const auto& e : eigs)
        if (!e.is_infinite()) finite(nf++, 0) = e.value();
    const double lam_floor = io::imag_drop_floor(finite.topRows(nf));
    std::string out = io::csv_row({"alpha", "beta", "lambda"});
    for (const auto& e : eigs) {
        const std::string lambda =
            e.is_infinite()
                ? "inf"
                : io::format_entry_csv(snap_dirt(e.value(), lam_floor), precision, 0.0);
        out += io::csv_row({io::format_entry_csv(snap_dirt(e.alpha, 1e-12), precision, 0.0),
                            io::format_entry_csv(snap_dirt(e.beta, 1e-12), precision, 0.0),
                            lambda});
    }
    return out;
}

std::string indent_block(const std::string& text, const std::string& pad) {
    std::string out;
    std::size_t start = 0;
    while (start < text.size()) {
        const std::size_t nl = text.find('\n', start);
        const std::size_t end = (nl == std::string::npos) ? text.size() : nl;
        if (start) out += pad;
        out += text.substr(start, end - start);
        if (nl == std::string::npos) break;
        out += '\n';
        start = nl + 1;
    }
    return out;
}

void run_compound(const std::string& path, int k, const Options& o) {
    print_matrix(pencilk::kcompound_matrix(io::read_matrix(path), k), o);
}

void run_pencil_eig(const std::string& a_path, const std::string& b_path, int k,
                    const Options& o) {
    const pencilk::Pencil p(io::read_matrix(a_path), io::read_matrix(b_path));
    const auto tol = make_tolerances(o);
    const auto rep = pencilk::is_regular(p, tol);
    if (!rep.regular)
        throw pencilk::SingularPencilError(
            "pencil-eig: singular pencil: det(A - lambda*B) vanishes identically");
    std::cout << "regular: true\n";
    std::cout << eig_table(pencilk::generalized_eigenvalues(p, tol), o.precision);
    if (k > 0) {
        auto ctol = tol;
        ctol.scale_hint = pencilk::compound_scale_hint(p, k);
        const auto ceigs =
            pencilk::generalized_eigenvalues(pencilk::kcompound_pencil(p, k), ctol);
        std::cout << "compound order: " << k << "\n";
        std::cout << eig_table(ceigs, o.precision);
    }
}

void run_drazin(const std::string& path, const Options& o) {
    const auto result = pencilk::drazin_inverse(io::read_matrix(path), make_tolerances(o));
    if (o.format == "csv") {
        std::cout << "index," << result.index << "\n";
        std::cout << io::write_matrix_csv(result.inverse, o.precision);
    } else {
        std::cout << "{\n  \"index\": " << result.index << ",\n  \"inverse\": "
                  << indent_block(io::write_matrix_json(result.inverse, o.precision),
                                  "  ");
    }
    if (o.format != "csv") std::cout << "}\n";
}

void run_dae_analyze(const std::string& a_path, const std::string& b_path, int k,
                     std::optional<double> shift, const Options& o) {
    const pencilk::DaeSystem sys(io::read_matrix(a_path), io::read_matrix(b_path));
    const auto tol = make_tolerances(o);
    std::optional<Complex> shift_override;
    if (shift) shift_override = Complex(*shift, 0.0);
    const auto an = pencilk::analyze(sys, tol, shift_override);
    if (!an.tractable)
        throw pencilk::UntractableSystemError(
            "dae-analyze: untractable system: the pencil A - lambda*B is singular");
    std::cout << "tractable: true\n";
    std::cout << "shift: " << io::format_entry_csv(an.shift_lambda, o.precision, 0.0)
              << "\n";
    std::cout << "drazin index: " << an.drazin_index << "\n";
    std::cout << "dim V1: " << an.consistency_dim() << "\n";
    if (k > 0) {
        try {
            const int dim = pencilk::compound_consistency_dim(sys, k, tol);
            std::cout << "dim V" << k << ": " << dim << "\n";
            std::cout << "nilpotent compound: " << (dim == 0 ? "true" : "false") << "\n";
        } catch (const pencilk::HypothesisError&) {
            // det A = det B = 0: every compound pencil is singular, but a
            // constant nonzero compound solution always exists.
            pencilk::compound_singular_witness(sys, k, tol);
            std::cout << "dim V" << k << ": undefined (singular compound pencil)\n";
            std::cout << "constant compound solution: true\n";
        }
    }
    std::cout << "verdict: " << an.verdict << "\n";
    std::cout << eig_table(an.finite_eigs, o.precision);
}

void run_dae_solve(const std::string& a_path, const std::string& b_path,
                   const std::string& x0_path, int steps, const Options& o) {
    const pencilk::DaeSystem sys(io::read_matrix(a_path), io::read_matrix(b_path));
    const Vector x0 = column_vector(io::read_matrix(x0_path), x0_path);
    const auto tol = make_tolerances(o);
    const auto an = pencilk::analyze(sys, tol);
    if (!an.tractable)
        throw pencilk::UntractableSystemError(
            "dae-solve: untractable system: the pencil A - lambda*B is singular");
    std::cout << io::trajectory_csv(pencilk::propagate(an, x0, steps, tol), o.precision);
}

void run_dae_volume(const std::string& a_path, const std::string& b_path,
                    const std::string& cols_path, int k, int steps, const Options& o) {
    const pencilk::DaeSystem sys(io::read_matrix(a_path), io::read_matrix(b_path));
    const Matrix cols = io::read_matrix(cols_path);
    if (k > 0 && k != cols.cols())
        throw pencilk::ShapeError("dae-volume: --k " + std::to_string(k) +
                                  " does not match the " + std::to_string(cols.cols()) +
                                  " initial columns");
    const auto trace = pencilk::volume_trace(sys, cols, steps, make_tolerances(o));
    std::cout << io::volume_csv(trace, o.precision);
}

void run_examples(const std::string& name, const std::string& out_dir, const Options& o) {
    const auto bundle = pencilk::examples::bundle(name, o.precision);
    std::filesystem::create_directories(out_dir);
    for (const auto& file : bundle.files) {
        const auto path = std::filesystem::path(out_dir) / file.filename;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error(path.string() + ": cannot write file");
        out << file.content;
    }
    std::cout << bundle.summary;
    std::cout << "wrote " << bundle.files.size() << " files to " << out_dir << "\n";
    if (!bundle.all_match)
        throw std::runtime_error("examples: computed values deviate from the reference "
                                 "numbers (see summary)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"k-compound matrices, pencils, and difference-algebraic systems"};
    app.require_subcommand(1);

    Options opt;
    int k = 0;
    int steps = 10;
    std::optional<double> shift;
    std::string a_path, b_path, x0_path, name;
    std::string out_dir = ".";

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--precision", opt.precision, "output digits (1..17)")
            ->check(CLI::Range(1, 17));
        sub->add_option("--format", opt.format, "matrix output format")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--tol-rank", opt.tol_rank, "absolute rank cutoff");
        sub->add_option("--tol-residual", opt.tol_residual, "relative residual gate");
        sub->add_option("--stability-margin", opt.stability_margin,
                        "unit-circle guard band");
        return sub;
    };

    auto* c_compound = add_common(app.add_subcommand("compound", "k-compound of a matrix"));
    c_compound->add_option("matrix", a_path, "matrix JSON file")->required();
    c_compound->add_option("--k", k, "compound order")->required();

    auto* c_eig = add_common(
        app.add_subcommand("pencil-eig", "generalized eigenvalues of A - lambda*B"));
    c_eig->add_option("a", a_path, "A matrix JSON file")->required();
    c_eig->add_option("b", b_path, "B matrix JSON file")->required();
    c_eig->add_option("--k", k, "also list the k-compound pencil spectrum");

    auto* c_drazin = add_common(app.add_subcommand("drazin", "Drazin index and inverse"));
    c_drazin->add_option("matrix", a_path, "matrix JSON file")->required();

    auto* c_analyze = add_common(
        app.add_subcommand("dae-analyze", "solvability analysis of B x(j+1) = A x(j)"));
    c_analyze->add_option("a", a_path, "A matrix JSON file")->required();
    c_analyze->add_option("b", b_path, "B matrix JSON file")->required();
    c_analyze->add_option("--k", k, "also analyze the k-compound system");
    c_analyze->add_option("--shift", shift, "pencil shift override (must regularize)");

    auto* c_solve = add_common(
        app.add_subcommand("dae-solve", "propagate a consistent initial condition"));
    c_solve->add_option("a", a_path, "A matrix JSON file")->required();
    c_solve->add_option("b", b_path, "B matrix JSON file")->required();
    c_solve->add_option("x0", x0_path, "initial state JSON file")->required();
    c_solve->add_option("--steps", steps, "number of steps");

    auto* c_volume = add_common(
        app.add_subcommand("dae-volume", "k-parallelotope volume trace"));
    c_volume->add_option("a", a_path, "A matrix JSON file")->required();
    c_volume->add_option("b", b_path, "B matrix JSON file")->required();
    c_volume->add_option("x0cols", x0_path, "initial columns JSON file")->required();
    c_volume->add_option("--k", k, "compound order (must match the column count)");
    c_volume->add_option("--steps", steps, "number of steps");

    auto* c_examples = add_common(
        app.add_subcommand("examples", "reproduce a worked example"));
    c_examples->add_option("name", name, "periodic | leslie | singular")->required();
    c_examples->add_option("--out", out_dir, "output directory for CSV/JSON files");

    try {
        opt.precision = env_precision();
        app.parse(argc, argv);
        if (c_compound->parsed()) run_compound(a_path, k, opt);
        if (c_eig->parsed()) run_pencil_eig(a_path, b_path, k, opt);
        if (c_drazin->parsed()) run_drazin(a_path, opt);
        if (c_analyze->parsed()) run_dae_analyze(a_path, b_path, k, shift, opt);
        if (c_solve->parsed()) run_dae_solve(a_path, b_path, x0_path, steps, opt);
        if (c_volume->parsed()) run_dae_volume(a_path, b_path, x0_path, k, steps, opt);
        if (c_examples->parsed()) run_examples(name, out_dir, opt);
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const pencilk::InconsistentInitialConditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::cerr << "orthogonal distance: " << io::format_real(e.distance, opt.precision)
                  << "\n";
        return 6;
    } catch (const pencilk::IllConditionedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const pencilk::SingularPencilError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const pencilk::UntractableSystemError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const pencilk::InvalidOrderError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const pencilk::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const pencilk::ShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
