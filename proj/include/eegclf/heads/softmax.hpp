#pragma once

#include "eegclf/heads/class_probs.hpp"

#include <cmath>
#include <span>

namespace eegclf::heads {

// probs[i] = exp(a_i) / sum_s exp(a_s), computed with max subtraction; the
// argmax of the probabilities equals the argmax of the logits.
ClassProbs softmax_probs(std::span<const double, 3> logits);
ClassProbs softmax_probs(const std::array<double, 3>& logits);

} // namespace eegclf::heads
