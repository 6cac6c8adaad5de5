#include <initializer_list>
#include <doctest.h>

#include <cmath>
#include <limits>

#include "treecast/logratio.hpp"

using namespace treecast;

namespace {
double direct_message(double lr, double eps) { return 2.0 * std::atanh(eps * std::tanh(0.5 * lr)); }
}  // namespace

TEST_CASE("bias and log-ratio are inverse") {
    for (double x : {-0.99, -0.3, 0.0, 0.25, 0.9999}) CHECK(bias_from_log_ratio(log_ratio_from_bias(x)) == doctest::Approx(x).epsilon(1e-14));
    CHECK(std::isinf(log_ratio_from_bias(1.0)));
    CHECK(bias_from_log_ratio(-std::numeric_limits<double>::infinity()) == 1.0);
}

TEST_CASE("edge message matches the direct form and saturates") {
    for (double eps : {0.1, 0.5, 0.9})
        for (double lr : {-30.0, -2.5, -0.1, 0.0, 1.0, 2.0, 2.01, 8.0})
            CHECK(edge_message(lr, eps) == doctest::Approx(direct_message(lr, eps)).epsilon(1e-13));
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(edge_message(inf, 0.5) == doctest::Approx(std::log(3.0)).epsilon(1e-15));
    CHECK(edge_message(-inf, 0.5) == doctest::Approx(-std::log(3.0)).epsilon(1e-15));
}

TEST_CASE("edge message delta has no cancellation") {
    // Reference values from 60-digit arithmetic.
    CHECK(edge_message_delta(39.14, -6.05, 0.5) == doctest::Approx(-1.1327631447595077e-14).epsilon(1e-12));
    for (double eps : {0.2, 0.5, 0.95})
        for (double lr : {-70.0, -3.0, -0.5, 0.0, 0.7, 4.0, 70.0})
            for (double d : {-120.0, -5.0, -1.0, -1e-9, 1e-9, 0.5, 1.0, 3.0, 120.0}) {
                const double v = edge_message_delta(lr, d, eps);
                REQUIRE(std::isfinite(v));
                const double naive = edge_message(lr + d, eps) - edge_message(lr, eps);
                CHECK(std::fabs(v - naive) <= 1e-9 * std::fabs(naive) + 1e-14);
            }
    CHECK(edge_message_delta(1.0, 0.0, 0.5) == 0.0);
}

TEST_CASE("bias gap") {
    CHECK(bias_gap(0.0, 0.0) == 0.0);
    CHECK(bias_gap(0.3, 1.2) == doctest::Approx(std::fabs(bias_from_log_ratio(1.5) - bias_from_log_ratio(0.3))).epsilon(1e-14));
    // Far from zero the gap is tiny but still carries relative precision.
    const double g = bias_gap(80.0, 1.0);
    CHECK(g > 0.0);
    CHECK(g == doctest::Approx(2.0 * std::exp(-80.0) * (1.0 - std::exp(-1.0))).epsilon(1e-10));
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(bias_gap(-inf, inf) == 2.0);
}
