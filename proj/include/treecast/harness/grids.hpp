#pragma once

#include <cstdint>
#include <vector>

#include "treecast/harness/config.hpp"
#include "treecast/harness/report.hpp"
#include "treecast/harness/stats.hpp"

namespace treecast::harness {

// |1/(1+x) - 1/(1+y)| <= (1/p)|x^p - y^p| on [0, hi]^2.
struct Small1Result {
    std::uint64_t points = 0;
    std::uint64_t violations = 0;
    double max_excess = 0.0;  // largest lhs - rhs seen (<= 0 when it holds)
};
Small1Result grid_small1(double p = 0.5, double hi = 10.0, double step = 0.01);

// sqrt((1-x)/(1+x)) <= 1 - x + 3x^2/5 on |x| <= half_width.
struct Small3Result {
    std::uint64_t points = 0;
    std::uint64_t violations = 0;
    double radius = 0.0;           // largest grid r with every |x| <= r holding
    double first_violation = 0.0;  // nearest failing x in the wider scan; 0 if none
};
Small3Result grid_small3(double half_width = 0.1, double step = 1e-4);

// sup over x, a in [-2,2] of |d/dx sqrt((1 - eps(x+a)) / (1 + eps(x+a)))|.
double small4_derivative(double epsilon, double u) noexcept;  // at u = eps(x+a)
double small4_kappa_closed(double epsilon) noexcept;
struct Small4Result {
    double epsilon = 0.0;
    std::uint64_t points = 0;
    double kappa_grid = 0.0;
    double kappa_closed = 0.0;
    double max_fd_rel_error = 0.0;  // analytic derivative vs central difference
};
Small4Result grid_small4(double epsilon, double step = 0.01);

// E[sqrt((1 - eps Y)/(1 + eps Y)) | parent = +1], Y = clamp(X - xi, -1, 1),
// X the BP belief of a child from its own depth-k subtree of arity d.
struct TermDerPoint {
    double epsilon = 0.6;
    double epsilon_star = 0.5;
    std::uint32_t arity = 16;
    std::uint32_t depth = 2;
};
double term_der_nu(double epsilon, double epsilon_star) noexcept;
Estimate term_der_expectation(const TermDerPoint& point, double xi, std::uint64_t trials, std::uint64_t seed,
                              unsigned workers);

ExperimentResult exp_inequality_grid(const ExperimentConfig& cfg, unsigned workers);

}  // namespace treecast::harness
