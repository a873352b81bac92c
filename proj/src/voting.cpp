#include "eegclf/voting.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace eegclf {

StreamVerdict vote_stream(const std::vector<heads::ClassProbs>& fragment_probs) {
    if (fragment_probs.empty())
        throw std::invalid_argument("vote_stream: no fragment probabilities to vote over");

    StreamVerdict v;
    v.fragment_count = fragment_probs.size();
    std::array<double, 3> sum{};
    for (const auto& probs : fragment_probs) {
        probs.validate();
        for (std::size_t c = 0; c < 3; ++c) sum[c] += probs.p[c];
        ++v.fragment_argmax_histogram[static_cast<std::size_t>(probs.argmax())];
    }
    for (std::size_t c = 0; c < 3; ++c)
        v.mean_probs[c] = sum[c] / static_cast<double>(v.fragment_count);

    int best = 0;
    for (int c = 1; c < 3; ++c)
        if (v.mean_probs[static_cast<std::size_t>(c)] > v.mean_probs[static_cast<std::size_t>(best)])
            best = c;
    v.predicted_class = best;
    return v;
}

std::optional<StreamVerdict> vote_with_threshold(const std::vector<heads::ClassProbs>& fragment_probs,
                                                 double min_margin) {
    if (!(min_margin >= 0.0) || !(min_margin < 1.0))
        throw std::invalid_argument("vote_with_threshold: min_margin must lie in [0, 1)");
    StreamVerdict v = vote_stream(fragment_probs);
    if (min_margin == 0.0) return v;

    std::array<double, 3> sorted = v.mean_probs;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    if (sorted[0] - sorted[1] < min_margin) return std::nullopt;
    return v;
}

} // namespace eegclf
