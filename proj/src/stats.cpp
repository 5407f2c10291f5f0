#include "srpband/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "srpband/errors.hpp"
#include "srpband/rng.hpp"

namespace srpband {

namespace {

constexpr double kExactEnumerationLimit = 1e5;

// Midranks of the pooled sample (1-based; tied runs share their average
// rank).
std::vector<double> midranks(const std::vector<double>& pooled) {
    const std::size_t n = pooled.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

double choose(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (std::size_t i = 0; i < k; ++i)
        c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
    return c;
}

double mad_of_range(const double* v, std::size_t n) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += v[i];
    mean /= static_cast<double>(n);
    double dev = 0.0;
    for (std::size_t i = 0; i < n; ++i) dev += std::abs(v[i] - mean);
    return dev / static_cast<double>(n);
}

} // namespace

double mean_error(const std::vector<double>& errors) {
    if (errors.empty()) throw EmptySample();
    double s = 0.0;
    for (double e : errors) s += e;
    return s / static_cast<double>(errors.size());
}

double mean_deviation(const std::vector<double>& errors) {
    if (errors.empty()) throw EmptySample();
    return mad_of_range(errors.data(), errors.size());
}

int rho_bucket(double rho) {
    if (rho <= 5.0) return 0;
    if (rho <= 10.0) return 1;
    return 2;
}

double wilcoxon_rank_sum(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw EmptySample();
    const std::size_t n_a = a.size();
    const std::size_t n_b = b.size();
    const std::size_t n = n_a + n_b;

    std::vector<double> pooled;
    pooled.reserve(n);
    pooled.insert(pooled.end(), a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const std::vector<double> ranks = midranks(pooled);

    double w_obs = 0.0;
    for (std::size_t i = 0; i < n_a; ++i) w_obs += ranks[i];
    const double mu = static_cast<double>(n_a) * static_cast<double>(n + 1) / 2.0;
    const double dev_obs = std::abs(w_obs - mu);

    if (choose(n, n_a) <= kExactEnumerationLimit) {
        // Walk every subset of size n_a of the pooled ranks.
        std::vector<std::size_t> idx(n_a);
        std::iota(idx.begin(), idx.end(), 0);
        std::size_t hits = 0, total = 0;
        while (true) {
            double w = 0.0;
            for (std::size_t i : idx) w += ranks[i];
            // Tiny slack absorbs midrank summation roundoff so ties at the
            // observed statistic always count as at-least-as-extreme.
            if (std::abs(w - mu) >= dev_obs - 1e-9) ++hits;
            ++total;

            // Next combination in lexicographic order.
            std::size_t k = n_a;
            while (k > 0 && idx[k - 1] == n - n_a + k - 1) --k;
            if (k == 0) break;
            ++idx[k - 1];
            for (std::size_t i = k; i < n_a; ++i) idx[i] = idx[i - 1] + 1;
        }
        return static_cast<double>(hits) / static_cast<double>(total);
    }

    // Normal approximation with tie correction.
    double tie_term = 0.0;
    {
        std::vector<double> sorted = pooled;
        std::sort(sorted.begin(), sorted.end());
        std::size_t i = 0;
        while (i < sorted.size()) {
            std::size_t j = i;
            while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i + 1);
            tie_term += t * t * t - t;
            i = j + 1;
        }
    }
    const double nn = static_cast<double>(n);
    const double var = static_cast<double>(n_a) * static_cast<double>(n_b) / 12.0 *
                       (nn + 1.0 - tie_term / (nn * (nn - 1.0)));
    if (var <= 0.0) return 1.0; // every pooled value identical
    const double z = std::max(0.0, dev_obs - 0.5) / std::sqrt(var);
    return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

double permutation_deviance_test(const std::vector<double>& a, const std::vector<double>& b,
                                 std::size_t n_perm, std::uint64_t seed) {
    if (a.empty() || b.empty()) throw EmptySample();
    if (n_perm < 1000) throw ConfigError("permutation test needs at least 1000 resamples");

    const std::size_t n_a = a.size();
    std::vector<double> pooled;
    pooled.reserve(a.size() + b.size());
    pooled.insert(pooled.end(), a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    // Shuffles start from the sorted pool, so p depends only on the two
    // multisets (and the seed), not on input ordering.
    std::sort(pooled.begin(), pooled.end());

    const double observed = std::abs(mean_deviation(a) - mean_deviation(b));

    Rng rng(seed);
    std::size_t hits = 0;
    std::vector<double> perm = pooled;
    for (std::size_t r = 0; r < n_perm; ++r) {
        for (std::size_t i = perm.size() - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(rng.next_below(i + 1));
            std::swap(perm[i], perm[j]);
        }
        const double stat = std::abs(mad_of_range(perm.data(), n_a) -
                                     mad_of_range(perm.data() + n_a, perm.size() - n_a));
        if (stat >= observed - 1e-15) ++hits;
    }
    return static_cast<double>(1 + hits) / static_cast<double>(n_perm + 1);
}

} // namespace srpband
