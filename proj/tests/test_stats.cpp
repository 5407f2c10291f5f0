#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "srpband/errors.hpp"
#include "srpband/rng.hpp"
#include "srpband/stats.hpp"

using namespace srpband;

namespace {

// Brute-force two-sided rank-sum p-value by bitmask enumeration, with
// midranks for ties. Independent of the shipped lexicographic walk.
double enumerated_rank_sum_p(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> pool = a;
    pool.insert(pool.end(), b.begin(), b.end());
    const std::size_t n = pool.size(), n_a = a.size();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return pool[i] < pool[j]; });
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && pool[order[j]] == pool[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + j - 1) + 1.0;
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = midrank;
        i = j;
    }

    double w_obs = 0.0;
    for (std::size_t i = 0; i < n_a; ++i) w_obs += ranks[i];
    const double mu = static_cast<double>(n_a) * static_cast<double>(n + 1) / 2.0;
    const double dev = std::abs(w_obs - mu);

    std::size_t hits = 0, total = 0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (std::popcount(mask) != static_cast<int>(n_a)) continue;
        double w = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) w += ranks[i];
        ++total;
        if (std::abs(w - mu) >= dev - 1e-9) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(total);
}

} // namespace

TEST_CASE("mean and mean absolute deviation") {
    const std::vector<double> e{1.0, 2.0, 3.0};
    CHECK(mean_error(e) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(mean_deviation(e) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

    SUBCASE("deviation ignores a common shift and scales linearly") {
        std::vector<double> shifted = e, scaled = e;
        for (double& x : shifted) x += 10.0;
        for (double& x : scaled) x *= 2.0;
        CHECK(mean_deviation(shifted) == doctest::Approx(mean_deviation(e)).epsilon(1e-12));
        CHECK(mean_deviation(scaled) ==
              doctest::Approx(2.0 * mean_deviation(e)).epsilon(1e-12));
    }
    SUBCASE("empty samples are rejected") {
        CHECK_THROWS_AS(mean_error({}), EmptySample);
        CHECK_THROWS_AS(mean_deviation({}), EmptySample);
    }
}

TEST_CASE("distance buckets split at rho = 5 and 10") {
    CHECK(rho_bucket(0.3) == 0);
    CHECK(rho_bucket(5.0) == 0);
    CHECK(rho_bucket(5.0000001) == 1);
    CHECK(rho_bucket(10.0) == 1);
    CHECK(rho_bucket(10.0000001) == 2);
    CHECK(rho_bucket(250.0) == 2);
}

TEST_CASE("rank-sum test: hand-checked exact cases") {
    CHECK(wilcoxon_rank_sum({1.0, 2.0}, {3.0, 4.0}) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(wilcoxon_rank_sum({3.0}, {7.0}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(wilcoxon_rank_sum({1.0, 1.0, 1.0}, {1.0, 1.0}) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rank-sum test: invariances") {
    const std::vector<double> a{0.3, 1.9, 0.7, 2.4};
    const std::vector<double> b{1.1, 0.2, 3.0};

    SUBCASE("swapping the samples changes nothing") {
        CHECK(wilcoxon_rank_sum(a, b) == wilcoxon_rank_sum(b, a));
    }
    SUBCASE("any strictly increasing transform changes nothing") {
        std::vector<double> ea = a, eb = b;
        for (double& x : ea) x = std::exp(x);
        for (double& x : eb) x = std::exp(x);
        CHECK(wilcoxon_rank_sum(a, b) == wilcoxon_rank_sum(ea, eb));
    }
}

TEST_CASE("rank-sum test: exact path matches brute-force enumeration") {
    Rng rng(404);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t n_a = 1 + rng.next_below(5), n_b = 1 + rng.next_below(5);
        std::vector<double> a(n_a), b(n_b);
        // small integer values force heavy ties half the time
        const bool discrete = (rep % 2 == 0);
        for (double& x : a)
            x = discrete ? static_cast<double>(rng.next_below(4)) : rng.uniform(0.0, 1.0);
        for (double& x : b)
            x = discrete ? static_cast<double>(rng.next_below(4)) : rng.uniform(0.0, 1.0);

        CHECK(wilcoxon_rank_sum(a, b) ==
              doctest::Approx(enumerated_rank_sum_p(a, b)).epsilon(1e-12));
    }
}

TEST_CASE("rank-sum test: large samples use a sane normal approximation") {
    std::vector<double> a(60), b(60);
    for (std::size_t i = 0; i < 60; ++i) {
        a[i] = static_cast<double>(i);
        b[i] = static_cast<double>(i) + 0.5; // interleaved: no real difference
    }
    const double p_close = wilcoxon_rank_sum(a, b);
    CHECK(p_close > 0.5);
    CHECK(p_close <= 1.0);

    for (double& x : b) x += 1000.0; // complete separation
    CHECK(wilcoxon_rank_sum(a, b) < 1e-10);

    CHECK_THROWS_AS(wilcoxon_rank_sum({}, {1.0}), EmptySample);
}

TEST_CASE("permutation dispersion test") {
    SUBCASE("identical samples can never look extreme") {
        const std::vector<double> a{0.4, 1.0, 2.2, 0.9};
        CHECK(permutation_deviance_test(a, a, 2000, 5) == 1.0);
    }
    SUBCASE("wildly different spreads are flagged") {
        const std::vector<double> tight{1.0, 1.01, 0.99, 1.02, 0.98, 1.0};
        const std::vector<double> wide{-20.0, 30.0, -10.0, 25.0, 0.0, 40.0};
        const double p = permutation_deviance_test(tight, wide, 4000, 5);
        CHECK(p >= 1.0 / 4001.0); // add-one estimate can never reach zero
        CHECK(p < 0.05);
    }
    SUBCASE("equal group sizes make the test symmetric") {
        const std::vector<double> a{0.1, 2.0, 0.7};
        const std::vector<double> b{1.4, 0.3, 3.1};
        CHECK(permutation_deviance_test(a, b, 1500, 9) ==
              permutation_deviance_test(b, a, 1500, 9));
    }
    SUBCASE("the estimate is deterministic per seed") {
        const std::vector<double> a{0.1, 2.0, 0.7, 0.9};
        const std::vector<double> b{1.4, 0.3, 3.1};
        CHECK(permutation_deviance_test(a, b, 1000, 3) ==
              permutation_deviance_test(a, b, 1000, 3));
    }
    SUBCASE("too few resamples or empty samples are rejected") {
        const std::vector<double> a{1.0, 2.0};
        CHECK_THROWS_AS(permutation_deviance_test(a, a, 999, 1), ConfigError);
        CHECK_THROWS_AS(permutation_deviance_test({}, a, 1000, 1), EmptySample);
        CHECK_THROWS_AS(permutation_deviance_test(a, {}, 1000, 1), EmptySample);
    }
}
