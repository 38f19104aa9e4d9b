#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace apthunt::stats {

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Inverse of incomplete_beta in x for fixed (a, b); p in [0, 1].
double incomplete_beta_inv(double a, double b, double p);

// Upper-tail quantile of Student's t: returns t with P(T > t) = p, 0 < p < 1.
double student_t_upper_quantile(double p, double dof);

// One-sided Grubbs critical value for n samples at significance alpha.
double grubbs_critical(std::size_t n, double alpha);

struct GrubbsResult {
    std::size_t n = 0;
    double mean = 0.0;
    double stddev = 0.0;  // sample (n - 1) standard deviation
    double g_crit = 0.0;
    double boundary = 0.0;      // mean + g_crit * stddev
    double low_boundary = 0.0;  // mean - g_crit * stddev
    std::vector<std::size_t> outliers_high;
    std::vector<std::size_t> outliers_low;
    bool degenerate = false;  // zero variance: boundary == mean, no outliers
};

// Single-pass one-sided test in both tails. Throws InputError when
// n < 3 or alpha is outside (0, 0.5].
GrubbsResult grubbs_one_sided(std::span<const double> samples, double alpha);

using LabeledScore = std::pair<std::string, double>;

// Keeps labels whose score is a high outlier; with no high outlier, drops the
// low outliers and keeps the rest. Fewer than 3 entries or zero variance keeps
// everything. Never returns an empty set for non-empty input.
std::set<std::string> select_relatively_high(std::span<const LabeledScore> labeled, double alpha);

}  // namespace apthunt::stats
