#include "treecast/harness/stats.hpp"

#include <cmath>
#include <vector>

#include "treecast/errors.hpp"

namespace treecast::harness {

double pairwise_sum(std::span<const double> v) noexcept {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

Estimate mean_ci(std::span<const double> values) {
    if (values.empty()) throw ParameterError("mean of an empty sample");
    Estimate e;
    e.n = values.size();
    const double n = static_cast<double>(e.n);
    e.mean = pairwise_sum(values) / n;
    if (e.n > 1) {
        std::vector<double> sq(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - e.mean) * (values[i] - e.mean);
        e.std_error = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
    }
    e.ci_low = e.mean - kZ95 * e.std_error;
    e.ci_high = e.mean + kZ95 * e.std_error;
    return e;
}

Estimate variance_ci(std::span<const double> values) {
    if (values.size() < 2) throw ParameterError("variance needs two samples");
    const double n = static_cast<double>(values.size());
    const double mean = pairwise_sum(values) / n;
    std::vector<double> d2(values.size());
    std::vector<double> d4(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - mean;
        d2[i] = d * d;
        d4[i] = d2[i] * d2[i];
    }
    const double m2 = pairwise_sum(d2) / n;
    const double m4 = pairwise_sum(d4) / n;
    Estimate e;
    e.n = values.size();
    e.mean = m2 * n / (n - 1.0);
    e.std_error = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
    e.ci_low = e.mean - kZ95 * e.std_error;
    e.ci_high = e.mean + kZ95 * e.std_error;
    return e;
}

Estimate proportion_ci(std::uint64_t successes, std::uint64_t n) {
    if (n == 0) throw ParameterError("proportion of an empty sample");
    Estimate e;
    e.n = n;
    e.mean = static_cast<double>(successes) / static_cast<double>(n);
    e.std_error = std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(n));
    e.ci_low = e.mean - kZ95 * e.std_error;
    e.ci_high = e.mean + kZ95 * e.std_error;
    return e;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        default: return "inconclusive";
    }
}

namespace {

Trend trend(std::span<const Estimate> p, bool increasing) {
    Trend t;
    for (std::size_t i = 1; i < p.size(); ++i) {
        const Estimate& a = p[i - 1];
        const Estimate& b = p[i];
        const bool down = b.ci_high < a.ci_low;
        const bool up = b.ci_low > a.ci_high;
        if (!down && !up) ++t.overlapping;
        else if (down != increasing) ++t.separated_ok;
        else ++t.separated_wrong;
    }
    if (t.separated_wrong > 0) t.verdict = Verdict::fail;
    else if (t.separated_ok > 0) t.verdict = Verdict::pass;
    else t.verdict = Verdict::inconclusive;
    return t;
}

}  // namespace

Trend trend_non_increasing(std::span<const Estimate> points) { return trend(points, false); }
Trend trend_non_decreasing(std::span<const Estimate> points) { return trend(points, true); }

}  // namespace treecast::harness
