#include "treecast/logratio.hpp"

#include <cmath>
#include <limits>

namespace treecast {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

// log((1+eps)/(1-eps))
double saturation(double eps) noexcept { return std::log1p(eps) - std::log1p(-eps); }

// edge_message(a) - saturation for a >= 0, accurate in relative terms for large a.
double tail(double a, double eps) noexcept {
    const double e = std::exp(-a);
    const double lo = (1.0 - eps) / (1.0 + eps);
    const double hi = (1.0 + eps) / (1.0 - eps);
    return std::log1p(lo * e) - std::log1p(hi * e);
}

double log_sinh(double x) noexcept {
    if (x < 20.0) return std::log(std::sinh(x));
    return x - kLn2 + std::log1p(-std::exp(-2.0 * x));
}

double log_cosh(double y) noexcept {
    const double a = std::fabs(y);
    return a + std::log1p(std::exp(-2.0 * a)) - kLn2;
}

}  // namespace

double bias_from_log_ratio(double lr) noexcept { return -std::tanh(0.5 * lr); }

double log_ratio_from_bias(double bias) noexcept {
    if (bias >= 1.0) return -std::numeric_limits<double>::infinity();
    if (bias <= -1.0) return std::numeric_limits<double>::infinity();
    return std::log1p(-bias) - std::log1p(bias);
}

double edge_message(double lr, double eps) noexcept {
    if (eps == 0.0) return 0.0;
    const double a = std::fabs(lr);
    const double s = lr < 0 ? -1.0 : 1.0;
    if (std::isinf(a)) return s * saturation(eps);
    if (a <= 2.0) return 2.0 * std::atanh(eps * std::tanh(0.5 * lr));
    return s * (saturation(eps) + tail(a, eps));
}

double edge_message_delta(double lr, double d, double eps) noexcept {
    if (d == 0.0 || eps == 0.0) return 0.0;
    if (std::isinf(lr)) return 0.0;
    if (lr < 0.0) return -edge_message_delta(-lr, -d, eps);
    if (std::fabs(d) > 1.0) {
        const double z = lr + d;
        if (z == std::numeric_limits<double>::infinity()) return -tail(lr, eps);
        if (z >= 0.0) return tail(z, eps) - tail(lr, eps);
        // Opposite signs: the two messages add, nothing cancels.
        return edge_message(z, eps) - edge_message(lr, eps);
    }
    // With N(y) = (1+eps)e^y + (1-eps), D(y) = (1-eps)e^y + (1+eps) the message is
    // log N - log D; both ratios N(y+d)/N(y), D(y+d)/D(y) are 1 + (u or v)*expm1(d).
    const double e = std::exp(-lr);
    const double np = (1.0 + eps) + (1.0 - eps) * e;
    const double dp = (1.0 - eps) + (1.0 + eps) * e;
    const double v = (1.0 - eps) / dp;
    const double u_minus_v = 4.0 * eps * e / (np * dp);
    const double m = std::expm1(d);
    return std::log1p(u_minus_v * m / (1.0 + v * m));
}

double bias_gap(double lr, double d) noexcept {
    if (d == 0.0) return 0.0;
    if (std::isinf(lr)) {
        // A perfectly observed leaf is either kept or turned over.
        const double z = std::isinf(d) ? -lr : lr;
        return std::fabs(bias_from_log_ratio(z) - bias_from_log_ratio(lr));
    }
    const double z = lr + d;
    if (!std::isfinite(z))
        return std::fabs(bias_from_log_ratio(z) - bias_from_log_ratio(lr));
    const double lg = log_sinh(0.5 * std::fabs(d)) - log_cosh(0.5 * lr) - log_cosh(0.5 * z);
    return std::exp(lg);
}

}  // namespace treecast
