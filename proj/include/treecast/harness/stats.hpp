#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace treecast::harness {

inline constexpr const char* kCiMethod = "normal-approximation-95";
inline constexpr double kZ95 = 1.959963984540054;

// Fixed-shape pairwise summation; the result depends only on the order of
// the values, never on how they were produced.
double pairwise_sum(std::span<const double> values) noexcept;

struct Estimate {
    double mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double std_error = 0.0;
    std::uint64_t n = 0;
};

// Sample mean with a normal-approximation 95% interval.
Estimate mean_ci(std::span<const double> values);
// Sample variance (n-1 denominator) with the standard error of the variance
// estimated from the fourth central moment.
Estimate variance_ci(std::span<const double> values);
Estimate proportion_ci(std::uint64_t successes, std::uint64_t n);

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

struct Trend {
    Verdict verdict = Verdict::inconclusive;
    int separated_ok = 0;     // consecutive pairs separated in the expected direction
    int overlapping = 0;      // consecutive pairs with overlapping intervals
    int separated_wrong = 0;  // consecutive pairs separated against the expectation
};

// Expected direction over consecutive points. A separated pair against the
// direction fails; overlapping pairs are inconclusive, never failures. The
// verdict passes when nothing fails and at least one pair is separated.
Trend trend_non_increasing(std::span<const Estimate> points);
Trend trend_non_decreasing(std::span<const Estimate> points);

}  // namespace treecast::harness
