#pragma once

#include <cstdint>
#include <vector>

namespace srpband {

// Arithmetic mean. Throws EmptySample on an empty list.
double mean_error(const std::vector<double>& errors);

// Mean absolute deviation around the mean, (1/N) * sum |e_n - mean|.
double mean_deviation(const std::vector<double>& errors);

// Distance bucket index for rho = r / r_m: 0 for rho <= 5, 1 for
// 5 < rho <= 10, 2 beyond.
int rho_bucket(double rho);

// Two-sided two-sample Wilcoxon rank-sum p-value with midranks for ties.
// Exact enumeration over all C(n_a + n_b, n_a) group assignments when that
// count is at most 100000; tie-corrected normal approximation with
// continuity correction otherwise.
double wilcoxon_rank_sum(const std::vector<double>& a, const std::vector<double>& b);

// Permutation test on the dispersion statistic |mean_deviation(a) -
// mean_deviation(b)| with the add-one estimate
// p = (1 + #{resamples >= observed}) / (n_perm + 1). Deterministic per seed.
double permutation_deviance_test(const std::vector<double>& a, const std::vector<double>& b,
                                 std::size_t n_perm, std::uint64_t seed);

} // namespace srpband
