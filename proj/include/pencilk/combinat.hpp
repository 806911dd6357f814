#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "pencilk/errors.hpp"

namespace pencilk {

// Strictly increasing 1-based index tuple (row/column selector for minors).
using KTuple = std::vector<int>;

// C(n, k) without intermediate overflow for desk-scale arguments.
inline std::int64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    std::int64_t c = 1;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

inline std::string tuple_to_string(const KTuple& t) {
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(t[i]);
    }
    return s + ")";
}

// All strictly increasing k-tuples over {1..n} in lexicographic order, with
// rank lookup.  Ranks are 0-based; tuple entries are 1-based.
class KIndexer {
public:
    KIndexer(int n, int k) : n_(n), k_(k) {
        if (k < 1 || k > n)
            throw InvalidOrderError("compound order k=" + std::to_string(k) +
                                    " out of range for n=" + std::to_string(n));
        tuples_.reserve(static_cast<std::size_t>(binomial(n, k)));
        KTuple t(k);
        for (int i = 0; i < k; ++i) t[i] = i + 1;
        while (true) {
            tuples_.push_back(t);
            // advance to the lexicographic successor
            int i = k - 1;
            while (i >= 0 && t[i] == n - (k - 1 - i)) --i;
            if (i < 0) break;
            ++t[i];
            for (int j = i + 1; j < k; ++j) t[j] = t[j - 1] + 1;
        }
    }

    int n() const { return n_; }
    int k() const { return k_; }
    std::int64_t size() const { return static_cast<std::int64_t>(tuples_.size()); }
    const std::vector<KTuple>& tuples() const { return tuples_; }

    const KTuple& tuple_at(std::int64_t rank) const {
        if (rank < 0 || rank >= size())
            throw NotAMemberError("tuple rank " + std::to_string(rank) +
                                  " out of range [0," + std::to_string(size()) + ")");
        return tuples_[static_cast<std::size_t>(rank)];
    }

    // Lexicographic rank of t; rejects tuples that are not strictly
    // increasing members of {1..n}^k.
    std::int64_t rank(const KTuple& t) const {
        if (static_cast<int>(t.size()) != k_)
            throw NotAMemberError("tuple " + tuple_to_string(t) + " has length " +
                                  std::to_string(t.size()) + ", expected " +
                                  std::to_string(k_));
        for (int i = 0; i < k_; ++i) {
            if (t[i] < 1 || t[i] > n_ || (i > 0 && t[i] <= t[i - 1]))
                throw NotAMemberError("tuple " + tuple_to_string(t) +
                                      " is not strictly increasing over 1.." +
                                      std::to_string(n_));
        }
        auto it = std::lower_bound(tuples_.begin(), tuples_.end(), t);
        return static_cast<std::int64_t>(it - tuples_.begin());
    }

private:
    int n_, k_;
    std::vector<KTuple> tuples_;
};

} // namespace pencilk
