#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>

namespace eegclf::heads {

enum class ProbSource { softmax, forest, svm_calibrated };

// Length-3 probability vector on the simplex; the unit of voting.
struct ClassProbs {
    std::array<double, 3> p{};
    ProbSource source = ProbSource::softmax;

    // entries >= 0 and summing to 1 within 1e-9
    void validate() const {
        double sum = 0.0;
        for (double v : p) {
            if (!(v >= 0.0)) throw std::invalid_argument("class probability below zero");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("class probabilities do not sum to one");
    }

    // lowest index wins ties
    int argmax() const {
        int best = 0;
        for (int i = 1; i < 3; ++i)
            if (p[static_cast<std::size_t>(i)] > p[static_cast<std::size_t>(best)]) best = i;
        return best;
    }
};

} // namespace eegclf::heads
