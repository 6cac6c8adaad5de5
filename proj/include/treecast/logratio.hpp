#pragma once

// Scalar kernels of the log-ratio form of belief propagation.
//
// A belief with bias X (P(+1) = (1+X)/2) is carried as lr = log(P(-1)/P(+1)),
// so X = 2/(1+exp(lr)) - 1 = -tanh(lr/2). A child with log-ratio lr
// contributes edge_message(lr) = log((1 - eps*X)/(1 + eps*X)) to its parent's
// log-ratio. Infinite log-ratios (perfectly observed leaves) are exact inputs.

namespace treecast {

double bias_from_log_ratio(double lr) noexcept;
double log_ratio_from_bias(double bias) noexcept;

// 2*atanh(eps * tanh(lr/2)), odd in lr, saturating at +-log((1+eps)/(1-eps)).
double edge_message(double lr, double eps) noexcept;

// edge_message(lr + d) - edge_message(lr) without cancellation, for finite lr.
double edge_message_delta(double lr, double d, double eps) noexcept;

// |bias(lr + d) - bias(lr)| with full relative precision even when both
// biases round to the same double.
double bias_gap(double lr, double d) noexcept;

}  // namespace treecast
