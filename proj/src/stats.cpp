#include "tutorforge/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "tutorforge/errors.hpp"

namespace tutorforge {

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DegenerateInput("vectors differ in length");
    const size_t n = a.size();
    if (n < 2) throw DegenerateInput("need at least 2 observations");

    const double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n);
    const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(n);
    double cov = 0, var_a = 0, var_b = 0;
    for (size_t i = 0; i < n; ++i) {
        const double da = a[i] - mean_a, db = b[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a == 0.0 || var_b == 0.0) throw DegenerateInput("constant vector");
    // sqrt of the product (not the product of sqrts) keeps exact cases exact.
    return cov / std::sqrt(var_a * var_b);
}

namespace {

// Number of discordant pairs = inversions of b once sorted by a (ties in a
// excluded), counted with a merge sort.
uint64_t count_inversions(std::vector<double>& v, std::vector<double>& scratch, size_t lo,
                          size_t hi) {
    if (hi - lo < 2) return 0;
    const size_t mid = (lo + hi) / 2;
    uint64_t count = count_inversions(v, scratch, lo, mid) + count_inversions(v, scratch, mid, hi);
    size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[j] < v[i]) {
            count += mid - i;
            scratch[k++] = v[j++];
        } else {
            scratch[k++] = v[i++];
        }
    }
    while (i < mid) scratch[k++] = v[i++];
    while (j < hi) scratch[k++] = v[j++];
    std::copy(scratch.begin() + static_cast<long>(lo), scratch.begin() + static_cast<long>(hi),
              v.begin() + static_cast<long>(lo));
    return count;
}

uint64_t pairs(uint64_t m) { return m * (m - 1) / 2; }

}  // namespace

double kendall_tau(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DegenerateInput("vectors differ in length");
    const size_t n = a.size();
    if (n < 2) throw DegenerateInput("need at least 2 observations");

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t i, size_t j) {
        if (a[i] != a[j]) return a[i] < a[j];
        return b[i] < b[j];
    });

    // Tie bookkeeping: n1 = pairs tied in a, n2 = pairs tied in b,
    // n3 = pairs tied in both (never discordant, subtracted from swaps' scope).
    uint64_t n1 = 0, n3 = 0;
    std::vector<double> b_sorted(n);
    for (size_t i = 0; i < n; ++i) b_sorted[i] = b[order[i]];
    {
        size_t i = 0;
        while (i < n) {
            size_t j = i + 1;
            while (j < n && a[order[j]] == a[order[i]]) ++j;
            n1 += pairs(j - i);
            size_t k = i;
            while (k < j) {
                size_t m = k + 1;
                while (m < j && b[order[m]] == b[order[k]]) ++m;
                n3 += pairs(m - k);
                k = m;
            }
            i = j;
        }
    }

    uint64_t n2 = 0;
    {
        std::vector<double> sorted_b(b.begin(), b.end());
        std::sort(sorted_b.begin(), sorted_b.end());
        size_t i = 0;
        while (i < sorted_b.size()) {
            size_t j = i + 1;
            while (j < sorted_b.size() && sorted_b[j] == sorted_b[i]) ++j;
            n2 += pairs(j - i);
            i = j;
        }
    }

    std::vector<double> scratch(n);
    const uint64_t discordant = count_inversions(b_sorted, scratch, 0, n);

    const uint64_t n0 = pairs(n);
    if (n1 == n0 || n2 == n0) throw DegenerateInput("all pairs tied");

    // Pairs untied in both vectors split into concordant and discordant.
    const uint64_t untied = n0 - n1 - n2 + n3;
    const double nc_minus_nd =
        static_cast<double>(untied) - 2.0 * static_cast<double>(discordant);
    return nc_minus_nd / std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
}

}  // namespace tutorforge
