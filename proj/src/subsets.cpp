#include "cpdcert/subsets.hpp"

#include <limits>
#include <stdexcept>

namespace cpdcert {

std::int64_t binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
        if (r > (static_cast<unsigned __int128>(1) << 62))
            throw std::overflow_error("binomial: value exceeds 2^62");
    }
    return static_cast<std::int64_t>(r);
}

int subset_count(int n, int m) {
    std::int64_t c = binomial(n, m);
    if (c > std::numeric_limits<int>::max())
        throw std::overflow_error("subset_count: too many subsets for a dense axis");
    return static_cast<int>(c);
}

std::vector<int> subset_at(int n, int m, std::int64_t index) {
    if (m < 0 || m > n) throw std::invalid_argument("subset_at: m out of range");
    if (index < 0 || index >= binomial(n, m))
        throw std::out_of_range("subset_at: index out of range");
    std::vector<int> s;
    s.reserve(static_cast<std::size_t>(m));
    int v = 0;
    for (int i = 0; i < m; ++i) {
        // advance v until the block of subsets starting with v covers `index`
        for (;; ++v) {
            std::int64_t block = binomial(n - 1 - v, m - 1 - i);
            if (index < block) break;
            index -= block;
        }
        s.push_back(v++);
    }
    return s;
}

std::int64_t subset_index(int n, int m, std::span<const int> members) {
    if (static_cast<int>(members.size()) != m)
        throw std::invalid_argument("subset_index: wrong cardinality");
    std::int64_t idx = 0;
    int prev = -1;
    for (int i = 0; i < m; ++i) {
        int a = members[static_cast<std::size_t>(i)];
        if (a <= prev || a >= n) throw std::invalid_argument("subset_index: not a strictly increasing subset of {0..n-1}");
        for (int v = prev + 1; v < a; ++v) idx += binomial(n - 1 - v, m - 1 - i);
        prev = a;
    }
    return idx;
}

bool next_subset(int n, std::vector<int>& s) {
    int m = static_cast<int>(s.size());
    for (int i = m - 1; i >= 0; --i) {
        if (s[static_cast<std::size_t>(i)] < n - m + i) {
            ++s[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < m; ++j)
                s[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(j - 1)] + 1;
            return true;
        }
    }
    return false;
}

std::vector<int> first_subset(int m) {
    std::vector<int> s(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) s[static_cast<std::size_t>(i)] = i;
    return s;
}

}  // namespace cpdcert
