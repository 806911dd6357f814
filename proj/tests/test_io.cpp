#include <doctest.h>

#include <cstdio>
#include <string>
#include <vector>

#include <pencilk/examples.hpp>
#include <pencilk/io.hpp>

#include "test_support.hpp"

using pencilk::Complex;
using pencilk::Matrix;
using pencilk::Vector;
using testsupport::maxdiff;
using testsupport::random_matrix;
using testsupport::random_rank_matrix;
namespace io = pencilk::io;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start < text.size()) {
        const std::size_t nl = text.find('\n', start);
        REQUIRE(nl != std::string::npos);  // every line must be LF-terminated
        out.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return out;
}

} // namespace

TEST_CASE("io real formatting") {
    CHECK(io::format_real(0.25, 12) == "0.25");
    CHECK(io::format_real(-0.0, 12) == "0");  // negative zero snaps away
    CHECK(io::format_real(1.0 / 3.0, 3) == "0.333");
    CHECK(io::format_real(1e21, 6) == "1e+21");
    CHECK(io::format_real(-1.5e-7, 6) == "-1.5e-07");
    CHECK(io::format_real(100.0, 17) == "100");
}

TEST_CASE("io entry formatting") {
    CHECK(io::format_entry_json(Complex(1.5, 0.0), 12) == "1.5");
    CHECK(io::format_entry_json(Complex(1.5, -2.0), 12) == "[1.5, -2]");
    CHECK(io::format_entry_json(Complex(0.0, 0.25), 12) == "[0, 0.25]");

    CHECK(io::format_entry_csv(Complex(1.0, 2.0), 12, 0.0) == "1+2i");
    CHECK(io::format_entry_csv(Complex(1.0, -2.0), 12, 0.0) == "1-2i");
    CHECK(io::format_entry_csv(Complex(0.0, -0.5), 12, 0.0) == "0-0.5i");
    // an imaginary part at rounding-dirt scale is dropped
    CHECK(io::format_entry_csv(Complex(1.0, 1e-15), 12, 1e-12) == "1");
    CHECK(io::format_entry_csv(Complex(1.0, 1e-15), 12, 0.0) == "1+1e-15i");
}

TEST_CASE("io json writer layout") {
    Matrix m(2, 2);
    m << Complex(1.5, 0.0), Complex(-0.0, 0.0), Complex(0.0, -2.0), Complex(3.0, 0.0);
    const std::string expected =
        "{\n"
        "  \"rows\": 2,\n"
        "  \"cols\": 2,\n"
        "  \"data\": [\n"
        "    [1.5, 0],\n"
        "    [[0, -2], 3]\n"
        "  ]\n"
        "}\n";
    CHECK(io::write_matrix_json(m, 12) == expected);
    CHECK(io::write_matrix_json(Matrix(0, 0), 12) ==
          "{\n  \"rows\": 0,\n  \"cols\": 0,\n  \"data\": []\n}\n");
}

TEST_CASE("io json round trip is exact at precision 17") {
    std::mt19937 rng(20260814);
    for (int rep = 0; rep < 20; ++rep) {
        const bool complex_entries = rep % 2 == 0;
        const Matrix m = random_matrix(rng, 2 + rep % 4, 1 + rep % 5, complex_entries);
        const Matrix back = io::parse_matrix_json(io::write_matrix_json(m, 17), "rt");
        REQUIRE(back.rows() == m.rows());
        REQUIRE(back.cols() == m.cols());
        CHECK(maxdiff(back, m) == 0.0);
    }
}

TEST_CASE("io parser accepts mixed plain and pair entries") {
    const std::string text =
        "{\"rows\": 2, \"cols\": 2, \"data\": [[1, [0, -1]], [2.5e-3, [4, 0]]]}";
    const Matrix m = io::parse_matrix_json(text, "mixed");
    CHECK(m(0, 0) == Complex(1.0, 0.0));
    CHECK(m(0, 1) == Complex(0.0, -1.0));
    CHECK(m(1, 0) == Complex(2.5e-3, 0.0));
    CHECK(m(1, 1) == Complex(4.0, 0.0));
}

TEST_CASE("io parser rejects malformed input") {
    const auto reject = [](const std::string& text) {
        CHECK_THROWS_AS(io::parse_matrix_json(text, "bad"), pencilk::ParseError);
    };
    reject("not json");
    reject("[1, 2]");                                        // not an object
    reject("{\"rows\": 1, \"cols\": 1}");                    // missing data
    reject("{\"rows\": 1.5, \"cols\": 1, \"data\": [[0]]}"); // fractional dims
    reject("{\"rows\": -1, \"cols\": 1, \"data\": []}");     // negative dims
    reject("{\"rows\": 2, \"cols\": 1, \"data\": [[0]]}");   // short data
    reject("{\"rows\": 1, \"cols\": 2, \"data\": [[0]]}");   // short row
    reject("{\"rows\": 1, \"cols\": 1, \"data\": [[\"x\"]]}");
    reject("{\"rows\": 1, \"cols\": 1, \"data\": [[[1]]]}");
    reject("{\"rows\": 1, \"cols\": 1, \"data\": [[[1, 2, 3]]]}");
    reject("{\"rows\": 1, \"cols\": 1, \"data\": [[1e999]]}"); // overflows to inf
    try {
        io::parse_matrix_json("{}", "label");
    } catch (const pencilk::ParseError& e) {
        CHECK(std::string(e.what()).find("label") == 0);  // origin prefixes the message
    }
    CHECK_THROWS_AS(io::read_matrix("/nonexistent/matrix.json"), pencilk::ParseError);
}

TEST_CASE("io matrix csv") {
    Matrix m(2, 2);
    m << Complex(1.0, 0.0), Complex(0.5, 1e-15), Complex(-2.0, 0.25), Complex(0.0, 0.0);
    // floor is 1e-12 * 2.0156...: the 1e-15 imaginary part drops, 0.25 stays
    CHECK(io::write_matrix_csv(m, 12) ==
          "c1,c2\n"
          "1,0.5\n"
          "-2+0.25i,0\n");
    CHECK(io::write_matrix_csv(Matrix(0, 2), 12) == "c1,c2\n");
}

TEST_CASE("io trajectory csv") {
    pencilk::Trajectory tr;
    tr.times = {0, 1, 2};
    tr.states = {Vector{{1.0, 1.0, 0.0}}, Vector{{0.0, 0.5, 0.0}},
                 Vector{{0.0, 0.25, 0.0}}};
    tr.residuals = {0.0, 0.125};
    CHECK(io::trajectory_csv(tr, 12) ==
          "j,x1,x2,x3,residual\n"
          "0,1,1,0,0\n"
          "1,0,0.5,0,0\n"
          "2,0,0.25,0,0.125\n");
}

TEST_CASE("io volume csv") {
    pencilk::VolumeTrace vt;
    vt.k = 2;
    vt.compound_states = {Vector{{0.75, 0.0, 0.0}}, Vector{{-0.75, 0.0, 0.0}}};
    vt.volumes = {0.75, 0.75};
    CHECK(io::volume_csv(vt, 12) ==
          "j,volume,y1,y2,y3\n"
          "0,0.75,0.75,0,0\n"
          "1,0.75,-0.75,0,0\n");
}

TEST_CASE("examples canonical range basis") {
    // axis-aligned ranges come back as coordinate axes
    Matrix rot(3, 3);
    rot << 0, -1, 0, 1, 0, 0, 0, 0, 0;
    Matrix axes(3, 2);
    axes << 1, 0, 0, 1, 0, 0;
    CHECK(maxdiff(pencilk::examples::canonical_range_basis(rot), axes) == 0.0);

    // general ranges: orthonormal columns spanning range(m), pivots positive real
    std::mt19937 rng(5150);
    for (int rep = 0; rep < 25; ++rep) {
        const Eigen::Index n = 3 + rep % 3;
        const Eigen::Index r = 1 + rep % static_cast<int>(n);
        const Matrix m = random_rank_matrix(rng, n, n, r);
        const Matrix basis = pencilk::examples::canonical_range_basis(m);
        REQUIRE(basis.cols() == r);
        CHECK(maxdiff(basis.adjoint() * basis, Matrix::Identity(r, r)) < 1e-12);
        // same span: projector onto range(m) fixes every basis column
        const Matrix u = pencilk::orthonormal_range(m);
        CHECK((basis - u * (u.adjoint() * basis)).norm() < 1e-10);
        for (Eigen::Index c = 0; c < r; ++c) {
            Eigen::Index pivot = 0;
            basis.col(c).cwiseAbs().maxCoeff(&pivot);
            CHECK(basis(pivot, c).imag() == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(basis(pivot, c).real() > 0.0);
        }
        // deterministic: a second call reproduces the same matrix bit for bit
        CHECK(maxdiff(basis, pencilk::examples::canonical_range_basis(m)) == 0.0);
    }
}

TEST_CASE("examples periodic bundle") {
    const auto bundle = pencilk::examples::bundle("periodic", 12);
    CHECK(bundle.name == "periodic");
    CHECK(bundle.all_match);
    CHECK(bundle.summary.find("FAIL") == std::string::npos);
    REQUIRE(bundle.files.size() == 7);
    CHECK(bundle.files[0].filename == "periodic_a.json");
    for (const auto& f : bundle.files) CHECK(!f.content.empty());

    const auto& volume = bundle.files.back();
    REQUIRE(volume.filename == "periodic_volume.csv");
    const auto rows = lines_of(volume.content);
    REQUIRE(rows.size() == 6);  // header + j = 0..4
    CHECK(rows[0] == "j,volume,y1,y2,y3");
    for (std::size_t j = 1; j < rows.size(); ++j)
        CHECK(rows[j].substr(0, io::format_real(0.75, 12).size() + 2) ==
              std::to_string(j - 1) + ",0.75");

    // the projected orbit of (1, 1, 0) visits the four corner points exactly
    const auto* projected = &bundle.files[4];
    REQUIRE(projected->filename == "periodic_projected_1.csv");
    const auto orbit = lines_of(projected->content);
    REQUIRE(orbit.size() == 6);
    CHECK(orbit[0] == "j,p1,p2");
    CHECK(orbit[1] == "0,1,1");
    CHECK(orbit[2] == "1,1,-1");
    CHECK(orbit[3] == "2,-1,-1");
    CHECK(orbit[4] == "3,-1,1");
    CHECK(orbit[5] == "4,1,1");
}

TEST_CASE("examples leslie bundle") {
    const auto bundle = pencilk::examples::bundle("leslie", 12);
    CHECK(bundle.all_match);
    REQUIRE(bundle.files.size() == 5);
    CHECK(bundle.files[2].filename == "leslie_drazin.json");
    const Matrix dz = io::parse_matrix_json(bundle.files[2].content, "dz");
    CHECK(maxdiff(dz, pencilk::examples::leslie_drazin_closed_form()) < 1e-10);
    // six reference-value comparisons, all passing
    CHECK(std::count(bundle.summary.begin(), bundle.summary.end(), '\n') == 6);
}

TEST_CASE("examples singular bundle") {
    const auto bundle = pencilk::examples::bundle("singular", 12);
    CHECK(bundle.all_match);
    REQUIRE(bundle.files.size() == 6);

    const auto& trajectory = bundle.files[4];
    REQUIRE(trajectory.filename == "singular_trajectory.csv");
    const auto rows = lines_of(trajectory.content);
    REQUIRE(rows.size() == 6);
    CHECK(rows[1] == "0,1,1,0,0");
    CHECK(rows[2] == "1,0,0.5,0,0");      // exact dyadic decay
    CHECK(rows[5] == "4,0,0.0625,0,0");

    const auto& witness = bundle.files[5];
    REQUIRE(witness.filename == "singular_witness.csv");
    CHECK(witness.content == "c1\n0\n1\n0\n");  // the constant compound solution is e2
}

TEST_CASE("examples unknown name") {
    CHECK_THROWS_AS(pencilk::examples::bundle("lorenz", 12), pencilk::ParseError);
}
