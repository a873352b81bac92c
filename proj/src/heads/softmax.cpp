#include "eegclf/heads/softmax.hpp"

#include <stdexcept>

namespace eegclf::heads {

ClassProbs softmax_probs(std::span<const double, 3> logits) {
    for (double v : logits)
        if (!std::isfinite(v)) throw std::invalid_argument("softmax_probs: non-finite logit");
    double m = logits[0];
    for (double v : logits) m = std::max(m, v);
    ClassProbs out;
    out.source = ProbSource::softmax;
    double sum = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        out.p[i] = std::exp(logits[i] - m);
        sum += out.p[i];
    }
    for (auto& v : out.p) v /= sum;
    return out;
}

ClassProbs softmax_probs(const std::array<double, 3>& logits) {
    return softmax_probs(std::span<const double, 3>(logits));
}

} // namespace eegclf::heads
