#include "apthunt/stats.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "apthunt/errors.hpp"

namespace apthunt::stats {

namespace {

// Continued fraction for I_x(a, b) by the modified Lentz method.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw InputError("incomplete_beta: a and b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    // the fraction converges fast only on this side of the mean
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double incomplete_beta_inv(double a, double b, double p) {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    // I_x is monotone in x, so bisection always converges; 200 halvings exhaust
    // double precision on [0, 1].
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (incomplete_beta(a, b, mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double student_t_upper_quantile(double p, double dof) {
    if (!(p > 0.0 && p < 1.0)) throw InputError("student_t_upper_quantile: p must be in (0, 1)");
    if (dof <= 0.0) throw InputError("student_t_upper_quantile: dof must be positive");
    if (p == 0.5) return 0.0;
    if (p > 0.5) return -student_t_upper_quantile(1.0 - p, dof);
    // P(T > t) = I_{v/(v+t^2)}(v/2, 1/2) / 2 for t > 0
    const double x = incomplete_beta_inv(0.5 * dof, 0.5, 2.0 * p);
    return std::sqrt(dof * (1.0 - x) / x);
}

double grubbs_critical(std::size_t n, double alpha) {
    if (n < 3) throw InputError("Grubbs test needs at least 3 samples, got " + std::to_string(n));
    if (!(alpha > 0.0 && alpha <= 0.5)) throw InputError("Grubbs alpha must be in (0, 0.5]");

    static std::mutex mu;
    static std::map<std::pair<std::size_t, double>, double> cache;
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find({n, alpha}); it != cache.end()) return it->second;
    }
    const double nd = static_cast<double>(n);
    const double t = student_t_upper_quantile(alpha / nd, nd - 2.0);
    const double t2 = t * t;
    const double g = ((nd - 1.0) / std::sqrt(nd)) * std::sqrt(t2 / (nd - 2.0 + t2));
    std::lock_guard lock(mu);
    cache.emplace(std::make_pair(n, alpha), g);
    return g;
}

GrubbsResult grubbs_one_sided(std::span<const double> samples, double alpha) {
    GrubbsResult r;
    r.n = samples.size();
    r.g_crit = grubbs_critical(r.n, alpha);

    double sum = 0.0;
    for (double x : samples) sum += x;
    r.mean = sum / static_cast<double>(r.n);
    double ss = 0.0;
    for (double x : samples) ss += (x - r.mean) * (x - r.mean);
    r.stddev = std::sqrt(ss / static_cast<double>(r.n - 1));

    // Relative cut-off so that rounding noise in a constant sample is not read as spread.
    double scale = 0.0;
    for (double x : samples) scale = std::max(scale, std::fabs(x));
    if (r.stddev <= 1e-12 * std::max(scale, 1.0)) {
        r.degenerate = true;
        r.boundary = r.low_boundary = r.mean;
        return r;
    }
    r.boundary = r.mean + r.g_crit * r.stddev;
    r.low_boundary = r.mean - r.g_crit * r.stddev;
    for (std::size_t i = 0; i < r.n; ++i) {
        if (samples[i] > r.boundary)
            r.outliers_high.push_back(i);
        else if (samples[i] < r.low_boundary)
            r.outliers_low.push_back(i);
    }
    return r;
}

std::set<std::string> select_relatively_high(std::span<const LabeledScore> labeled, double alpha) {
    std::set<std::string> all;
    for (const auto& [label, _] : labeled) all.insert(label);
    if (labeled.size() < 3) return all;

    std::vector<double> scores;
    scores.reserve(labeled.size());
    for (const auto& [_, s] : labeled) scores.push_back(s);
    const auto g = grubbs_one_sided(scores, alpha);
    if (g.degenerate) return all;

    if (!g.outliers_high.empty()) {
        std::set<std::string> high;
        for (auto i : g.outliers_high) high.insert(labeled[i].first);
        return high;
    }
    for (auto i : g.outliers_low) all.erase(labeled[i].first);
    return all;
}

}  // namespace apthunt::stats
