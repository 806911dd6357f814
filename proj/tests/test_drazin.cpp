#include <doctest.h>

#include <random>
#include <vector>

#include "pencilk/compound.hpp"
#include "pencilk/drazin.hpp"
#include "test_support.hpp"

using pencilk::Complex;
using pencilk::Matrix;
using pencilk::Vector;
using testsupport::maxdiff;

TEST_CASE("drazin: invertible matrices reduce to the ordinary inverse") {
    std::mt19937 rng(801);
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix a = testsupport::random_regular(rng, 2 + rep % 5);
        const pencilk::DrazinResult d = pencilk::drazin_inverse(a);
        CHECK(d.index == 0);
        REQUIRE(d.rank_sequence.size() == 2);
        CHECK(d.rank_sequence[0] == a.rows());
        CHECK(d.rank_sequence[1] == a.rows());
        const Matrix inv = a.inverse();
        CHECK(maxdiff(d.inverse, inv) <= 1e-9 * std::max(1.0, inv.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("drazin: nilpotent shift blocks have maximal index and zero inverse") {
    const Eigen::Index n = 4;
    Matrix shift = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) shift(i, i + 1) = 1.0;
    const pencilk::DrazinResult d = pencilk::drazin_inverse(shift);
    CHECK(d.index == 4);
    CHECK(d.inverse.isZero(0.0));
    const std::vector<Eigen::Index> expected{4, 3, 2, 1, 0, 0};
    CHECK(d.rank_sequence == expected);
    CHECK(pencilk::drazin_index(shift) == 4);

    const Matrix zero = Matrix::Zero(3, 3);
    const pencilk::DrazinResult dz = pencilk::drazin_inverse(zero);
    CHECK(dz.index == 1);
    CHECK(dz.inverse.isZero(0.0));
}

TEST_CASE("drazin: diagonal matrices invert entrywise on the support") {
    const Matrix a = Vector{{0.5, 0.0, 2.0}}.asDiagonal();
    const pencilk::DrazinResult d = pencilk::drazin_inverse(a);
    CHECK(d.index == 1);
    const Matrix expected = Vector{{2.0, 0.0, 0.5}}.asDiagonal();
    CHECK(maxdiff(d.inverse, expected) <= 1e-14);

    // An absolute rank override reclassifies small entries as nilpotent dirt.
    const Matrix b = Vector{{1.0, 1e-3}}.asDiagonal();
    CHECK(pencilk::drazin_index(b) == 0);
    pencilk::Tolerances tol;
    tol.rank = 1e-2;
    const pencilk::DrazinResult db = pencilk::drazin_inverse(b, tol);
    CHECK(db.index == 1);
    CHECK(maxdiff(db.inverse, Matrix(Vector{{1.0, 0.0}}.asDiagonal())) <= 1e-12);
}

TEST_CASE("drazin: oblique projectors are their own Drazin inverse") {
    std::mt19937 rng(802);
    for (int rep = 0; rep < 10; ++rep) {
        const Eigen::Index n = 4, r = 2;
        Matrix block = Matrix::Zero(n, n);
        block.topLeftCorner(r, r) = Matrix::Identity(r, r);
        const Matrix t = testsupport::random_similarity(rng, n);
        const Matrix p = t * block * t.inverse();
        const pencilk::DrazinResult d = pencilk::drazin_inverse(p);
        CHECK(d.index == 1);
        CHECK(maxdiff(d.inverse, p) <= 1e-9 * std::max(1.0, p.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("drazin: matches the block Jordan construction") {
    std::mt19937 rng(803);
    std::uniform_int_distribution<int> core_dist(0, 3), count_dist(0, 2), size_dist(1, 3);
    for (int rep = 0; rep < 40; ++rep) {
        const Eigen::Index core = core_dist(rng);
        std::vector<int> blocks;
        const int count = count_dist(rng);
        for (int i = 0; i < count; ++i) blocks.push_back(size_dist(rng));
        if (core == 0 && blocks.empty()) blocks.push_back(2);
        const testsupport::DrazinInstance inst =
            testsupport::random_drazin_instance(rng, core, blocks);
        const pencilk::DrazinResult d = pencilk::drazin_inverse(inst.a);
        CHECK(d.index == inst.index);
        CHECK(d.rank_sequence.back() == inst.core_rank);
        CHECK(maxdiff(d.inverse, inst.drazin) <=
              1e-8 * std::max(1.0, inst.drazin.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("drazin: defining axioms hold on engineered instances") {
    std::mt19937 rng(804);
    std::uniform_int_distribution<int> core_dist(1, 3), size_dist(1, 3);
    for (int rep = 0; rep < 60; ++rep) {
        const Eigen::Index core = core_dist(rng);
        std::vector<int> blocks{size_dist(rng)};
        const testsupport::DrazinInstance inst =
            testsupport::random_drazin_instance(rng, core, blocks);
        const Matrix& a = inst.a;
        const pencilk::DrazinResult d = pencilk::drazin_inverse(a);
        const Matrix& x = d.inverse;
        Matrix aq = Matrix::Identity(a.rows(), a.cols());
        for (int i = 0; i < d.index; ++i) aq = aq * a;
        const double scale = std::max(1.0, aq.cwiseAbs().maxCoeff());
        CHECK(maxdiff(aq * a * x, aq) <= 1e-8 * scale);
        CHECK(maxdiff(x * a * x, x) <= 1e-8 * std::max(1.0, x.cwiseAbs().maxCoeff()));
        CHECK(maxdiff(a * x, x * a) <= 1e-8 * std::max(1.0, x.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("drazin: worked difference-algebraic auxiliary matrix has index 2") {
    Matrix a{{-2.0, -3.0, 1.0}, {1.0, 0.0, 0.0}, {1.0, 1.0, 0.0}};
    const Matrix b = Vector{{1.0, 1.0, 0.0}}.asDiagonal();
    const Matrix bhat = (a - b).inverse() * b;  // shift 1 regularizes the pencil
    const pencilk::DrazinResult d = pencilk::drazin_inverse(bhat);
    CHECK(d.index == 2);
    const std::vector<Eigen::Index> expected{3, 2, 1, 1};
    CHECK(d.rank_sequence == expected);
    // axioms at the computed index
    const Matrix q2 = bhat * bhat;
    CHECK(maxdiff(q2 * bhat * d.inverse, q2) <= 1e-12);
    CHECK(maxdiff(d.inverse * bhat, bhat * d.inverse) <= 1e-12);
}

TEST_CASE("drazin: Leslie matrix group inverse matches the closed form") {
    const double b1 = 1.1, b2 = 2.3, p1 = 0.9, p2 = 0.7;
    Matrix l{{b1, b2, 0.0}, {p1, 0.0, 0.0}, {0.0, p2, 0.0}};
    const pencilk::DrazinResult d = pencilk::drazin_inverse(l);
    CHECK(d.index == 1);
    CHECK(d.rank_sequence.back() == 2);
    Matrix expected{{0.0, 1.0 / p1, 0.0},
                    {1.0 / b2, -b1 / (b2 * p1), 0.0},
                    {-b1 * p2 / (b2 * b2 * p1), p2 * (b1 * b1 + b2 * p1) / (b2 * b2 * p1 * p1), 0.0}};
    CHECK(maxdiff(d.inverse, expected) <= 1e-10);
}

TEST_CASE("drazin: commutes with compound lifting") {
    std::mt19937 rng(805);
    std::uniform_int_distribution<int> core_dist(1, 3), size_dist(1, 2);
    for (int rep = 0; rep < 30; ++rep) {
        const Eigen::Index core = core_dist(rng);
        std::vector<int> blocks{size_dist(rng)};
        if (rep % 3 == 0) blocks.push_back(size_dist(rng));
        const testsupport::DrazinInstance inst =
            testsupport::random_drazin_instance(rng, core, blocks);
        const Eigen::Index n = inst.a.rows();
        for (int k = 1; k <= static_cast<int>(n) && k <= 3; ++k) {
            const Matrix lifted_inverse = pencilk::kcompound_matrix(inst.drazin, k);
            const Matrix lifted = pencilk::kcompound_matrix(inst.a, k);
            pencilk::Tolerances tol;
            tol.scale_hint = std::pow(inst.a.norm(), k);  // a compound can be pure dirt
            const pencilk::DrazinResult dk = pencilk::drazin_inverse(lifted, tol);
            const double scale = std::max({1.0, lifted_inverse.cwiseAbs().maxCoeff(),
                                           dk.inverse.cwiseAbs().maxCoeff()});
            CHECK(maxdiff(dk.inverse, lifted_inverse) <= 1e-7 * scale);
            if (k > inst.core_rank) {  // compound core is empty: both sides vanish
                CHECK(lifted_inverse.cwiseAbs().maxCoeff() <= 1e-10);
                CHECK(dk.inverse.cwiseAbs().maxCoeff() <= 1e-7 * scale);
            }
        }
    }
}

TEST_CASE("drazin: diagonal compound inverse is the reciprocal product pattern") {
    const Matrix a = Vector{{2.0, -0.5, 4.0, 0.0}}.asDiagonal();
    const int k = 2;
    const Matrix c = pencilk::kcompound_matrix(a, k);
    const pencilk::DrazinResult d = pencilk::drazin_inverse(c);
    const pencilk::KIndexer idx(4, k);
    for (Eigen::Index i = 0; i < d.inverse.rows(); ++i) {
        const pencilk::KTuple& t = idx.tuple_at(i);
        Complex prod = 1.0;
        for (int v : t) prod *= a(v - 1, v - 1);
        const Complex expected = (prod == 0.0) ? Complex(0.0) : 1.0 / prod;
        CHECK(std::abs(d.inverse(i, i) - expected) <= 1e-12);
        for (Eigen::Index j = 0; j < d.inverse.cols(); ++j)
            if (j != i) CHECK(std::abs(d.inverse(i, j)) <= 1e-12);
    }
}

TEST_CASE("drazin: input validation and conditioning guard") {
    CHECK_THROWS_AS(pencilk::drazin_inverse(Matrix::Zero(2, 3)), pencilk::ShapeError);
    Matrix bad = Matrix::Identity(2, 2);
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(pencilk::drazin_inverse(bad), std::invalid_argument);

    const Matrix skew = Vector{{1.0, 1e-13}}.asDiagonal();
    try {
        pencilk::drazin_inverse(skew);
        FAIL("expected IllConditionedError");
    } catch (const pencilk::IllConditionedError& e) {
        CHECK(e.condition > 1e12);
    }
    pencilk::Tolerances loose;
    loose.condition_bound = 1e15;
    CHECK_NOTHROW(pencilk::drazin_inverse(skew, loose));
}
