#include "eegclf/heads/msvm.hpp"

#include "eegclf/heads/softmax.hpp"
#include "eegclf/kernels.hpp"
#include "eegclf/rng.hpp"

#include <cmath>
#include <numeric>

namespace eegclf::heads {

std::array<double, 3> SvmModel::scores(const std::vector<double>& features) const {
    if (features.size() != dim)
        throw HeadError("msvm: feature dimension " + std::to_string(features.size()) +
                        " does not match training dimension " + std::to_string(dim));
    std::array<double, 3> s{};
    for (std::size_t c = 0; c < 3; ++c)
        s[c] = kernels::dot(weights.data() + c * dim, features.data(), dim) + bias[c];
    return s;
}

int SvmModel::predict(const std::vector<double>& features) const {
    const auto s = scores(features);
    int best = 0;
    for (int c = 1; c < 3; ++c)
        if (s[static_cast<std::size_t>(c)] > s[static_cast<std::size_t>(best)]) best = c;
    return best;
}

SvmModel train_msvm(const FeatureSet& data, const SvmParams& params) {
    const std::size_t n = data.size();
    if (n == 0) throw HeadError("train_msvm: empty training set");
    std::array<bool, 3> seen{};
    for (int label : data.y) {
        if (label < 0 || label >= 3) throw HeadError("train_msvm: class id out of range");
        seen[static_cast<std::size_t>(label)] = true;
    }
    for (int c = 0; c < 3; ++c)
        if (!seen[static_cast<std::size_t>(c)])
            throw HeadError("train_msvm: class " + std::to_string(c) + " absent from training set");

    SvmModel model;
    model.dim = data.dim;
    model.lambda = params.lambda;
    model.weights.assign(3 * data.dim, 0.0);
    model.bias = {0.0, 0.0, 0.0};

    RandomStream rng(derive_seed(params.seed, {0x53}));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::uint64_t step = 0;
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t idx : order) {
            ++step;
            const double eta = params.lr / (1.0 + params.lr * params.lambda * static_cast<double>(step));
            const double* xi = data.row(idx);
            const int yi = data.y[idx];

            std::array<double, 3> s{};
            for (std::size_t c = 0; c < 3; ++c)
                s[c] = kernels::dot(model.weights.data() + c * data.dim, xi, data.dim) + model.bias[c];

            // most violating competitor (lowest index on ties)
            int rival = -1;
            for (int c = 0; c < 3; ++c) {
                if (c == yi) continue;
                if (rival < 0 || s[static_cast<std::size_t>(c)] > s[static_cast<std::size_t>(rival)])
                    rival = c;
            }

            // shrink from the L2 term, then the hinge subgradient if violated
            const double decay = 1.0 - 2.0 * eta * params.lambda;
            for (auto& w : model.weights) w *= decay;

            const double margin = 1.0 + s[static_cast<std::size_t>(rival)] - s[static_cast<std::size_t>(yi)];
            if (margin > 0.0) {
                double* wy = model.weights.data() + static_cast<std::size_t>(yi) * data.dim;
                double* wr = model.weights.data() + static_cast<std::size_t>(rival) * data.dim;
                kernels::axpy(data.dim, eta, xi, wy);
                kernels::axpy(data.dim, -eta, xi, wr);
                model.bias[static_cast<std::size_t>(yi)] += eta;
                model.bias[static_cast<std::size_t>(rival)] -= eta;
            }
        }
        for (double w : model.weights)
            if (!std::isfinite(w))
                throw HeadError("train_msvm diverged (non-finite weights) at epoch " +
                                std::to_string(epoch));
    }
    return model;
}

ClassProbs msvm_probs(const SvmModel& model, const std::vector<double>& features) {
    ClassProbs out = softmax_probs(model.scores(features));
    out.source = ProbSource::svm_calibrated;
    return out;
}

} // namespace eegclf::heads
