#pragma once

#include "eegclf/heads/class_probs.hpp"

#include <array>
#include <optional>
#include <vector>

namespace eegclf {

// Stream-level decision: arithmetic mean of per-fragment class probabilities
// followed by argmax (lowest index wins ties). The divisor is the actual
// fragment count; any positive rescaling leaves the decision unchanged.
struct StreamVerdict {
    int predicted_class = 0;
    std::array<double, 3> mean_probs{};
    std::size_t fragment_count = 0;
    std::array<std::size_t, 3> fragment_argmax_histogram{};
};

StreamVerdict vote_stream(const std::vector<heads::ClassProbs>& fragment_probs);

// Abstains (nullopt) when the top-two margin of the mean probabilities is
// below min_margin; otherwise identical to vote_stream.
std::optional<StreamVerdict> vote_with_threshold(const std::vector<heads::ClassProbs>& fragment_probs,
                                                 double min_margin);

} // namespace eegclf
