#include <doctest.h>

#include "pencilk/combinat.hpp"
#include "test_support.hpp"

using pencilk::binomial;
using pencilk::KIndexer;
using pencilk::KTuple;

TEST_CASE("binomial coefficients") {
    CHECK(binomial(4, 3) == 4);
    CHECK(binomial(5, 2) == 10);
    CHECK(binomial(6, 3) == 20);
    CHECK(binomial(3, 0) == 1);
    CHECK(binomial(3, 3) == 1);
    CHECK(binomial(2, 5) == 0);
    CHECK(binomial(40, 20) == 137846528820LL);
}

TEST_CASE("k-tuple enumeration is lexicographic") {
    SUBCASE("worked 3-of-4 sequence") {
        KIndexer ix(4, 3);
        REQUIRE(ix.size() == 4);
        CHECK(ix.tuple_at(0) == KTuple{1, 2, 3});
        CHECK(ix.tuple_at(1) == KTuple{1, 2, 4});
        CHECK(ix.tuple_at(2) == KTuple{1, 3, 4});
        CHECK(ix.tuple_at(3) == KTuple{2, 3, 4});
        CHECK(ix.rank(KTuple{1, 2, 4}) == 1);
    }
    SUBCASE("k equal to n yields the single full tuple") {
        KIndexer ix(5, 5);
        REQUIRE(ix.size() == 1);
        CHECK(ix.tuple_at(0) == KTuple{1, 2, 3, 4, 5});
    }
    SUBCASE("matches brute-force enumeration") {
        for (int n = 1; n <= 7; ++n)
            for (int k = 1; k <= n; ++k) {
                KIndexer ix(n, k);
                auto expect = testsupport::all_ktuples_bruteforce(n, k);
                REQUIRE(ix.size() == static_cast<std::int64_t>(expect.size()));
                CHECK(ix.tuples() == expect);
            }
    }
    SUBCASE("pairs over 1..5") {
        KIndexer ix(5, 2);
        REQUIRE(ix.size() == 10);
        // position of (4,5) frozen from the brute-force enumeration above
        CHECK(ix.rank(KTuple{4, 5}) == 9);
        CHECK(ix.tuple_at(9) == KTuple{4, 5});
    }
}

TEST_CASE("rank inverts tuple_at") {
    for (int n = 1; n <= 8; ++n)
        for (int k = 1; k <= n; ++k) {
            KIndexer ix(n, k);
            CHECK(ix.size() == binomial(n, k));
            for (std::int64_t r = 0; r < ix.size(); ++r)
                CHECK(ix.rank(ix.tuple_at(r)) == r);
        }
}

TEST_CASE("invalid orders and non-member tuples are rejected") {
    CHECK_THROWS_AS(KIndexer(4, 0), pencilk::InvalidOrderError);
    CHECK_THROWS_AS(KIndexer(4, 5), pencilk::InvalidOrderError);
    CHECK_THROWS_AS(KIndexer(0, 1), pencilk::InvalidOrderError);

    KIndexer ix(5, 3);
    CHECK_THROWS_AS(ix.rank(KTuple{1, 2}), pencilk::NotAMemberError);
    CHECK_THROWS_AS(ix.rank(KTuple{1, 2, 2}), pencilk::NotAMemberError);
    CHECK_THROWS_AS(ix.rank(KTuple{3, 2, 1}), pencilk::NotAMemberError);
    CHECK_THROWS_AS(ix.rank(KTuple{0, 2, 3}), pencilk::NotAMemberError);
    CHECK_THROWS_AS(ix.rank(KTuple{2, 4, 6}), pencilk::NotAMemberError);
    CHECK_THROWS_AS(ix.tuple_at(10), pencilk::NotAMemberError);
    CHECK_THROWS_AS(ix.tuple_at(-1), pencilk::NotAMemberError);
}
