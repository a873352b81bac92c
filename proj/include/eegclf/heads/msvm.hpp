#pragma once

#include "eegclf/heads/class_probs.hpp"
#include "eegclf/heads/forest.hpp" // FeatureSet, HeadError

namespace eegclf::heads {

struct SvmParams {
    double lambda = 1e-4; // L2 regularization on the weights
    std::size_t epochs = 200;
    double lr = 0.1;
    std::uint64_t seed = 1;
};

// Linear multi-class SVM, Crammer-Singer hinge + lambda*||W||^2, trained by
// seeded subgradient descent. Decision is the argmax of 3 affine scores.
struct SvmModel {
    std::size_t dim = 0;
    std::vector<double> weights; // 3 x dim, row-major
    std::array<double, 3> bias{};
    double lambda = 0.0;

    std::array<double, 3> scores(const std::vector<double>& features) const;
    int predict(const std::vector<double>& features) const;
};

SvmModel train_msvm(const FeatureSet& data, const SvmParams& params);

// Scores mapped through a softmax for calibration; the argmax of the
// probabilities equals the argmax of the raw scores.
ClassProbs msvm_probs(const SvmModel& model, const std::vector<double>& features);

} // namespace eegclf::heads
