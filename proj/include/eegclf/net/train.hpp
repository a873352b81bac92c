#pragma once

#include "eegclf/net/network.hpp"
#include "eegclf/threading.hpp"

#include <optional>

namespace eegclf::net {

struct TrainHyper {
    std::string optimizer = "adam"; // "adam" or "sgd"
    double lr = 1e-3;
    std::size_t batch = 64;
    std::size_t epochs = 15;
    std::uint64_t seed = 1;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
};

struct TrainMeta {
    std::uint64_t seed = 0;
    std::size_t epochs = 0;
    std::vector<double> loss_curve; // mean cross-entropy per epoch
};

struct TrainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class T>
struct NetModel {
    Network<T> net;
    TrainMeta meta;

    ForwardOut<T> forward(const Fragment& frag) const {
        return net.forward(input_tensor<T>(frag, net.spec().kind));
    }
};

namespace detail {

template <class T>
class Optimizer {
public:
    Optimizer(const TrainHyper& hyper, const std::vector<Tensor<T>*>& params) : hyper_(hyper) {
        if (hyper.optimizer == "adam") {
            m_.reserve(params.size());
            v_.reserve(params.size());
            for (auto* p : params) {
                m_.emplace_back(p->shape);
                v_.emplace_back(p->shape);
            }
        } else if (hyper.optimizer != "sgd") {
            throw std::invalid_argument("unknown optimizer: " + hyper_.optimizer);
        }
    }

    void step(std::vector<Tensor<T>*>& params, const GradSet<T>& grads, double scale) {
        if (hyper_.optimizer == "sgd") {
            for (std::size_t i = 0; i < params.size(); ++i)
                kernels::axpy(params[i]->size(), static_cast<T>(-hyper_.lr * scale),
                              grads.g[i].data(), params[i]->data());
            return;
        }
        ++t_;
        const double b1 = hyper_.adam_beta1, b2 = hyper_.adam_beta2;
        const double bc1 = 1.0 - std::pow(b1, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(b2, static_cast<double>(t_));
        for (std::size_t i = 0; i < params.size(); ++i) {
            Tensor<T>& p = *params[i];
            Tensor<T>& m = m_[i];
            Tensor<T>& v = v_[i];
            const Tensor<T>& g = grads.g[i];
            for (std::size_t j = 0; j < p.size(); ++j) {
                const double gj = static_cast<double>(g[j]) * scale;
                const double mj = b1 * static_cast<double>(m[j]) + (1.0 - b1) * gj;
                const double vj = b2 * static_cast<double>(v[j]) + (1.0 - b2) * gj * gj;
                m[j] = static_cast<T>(mj);
                v[j] = static_cast<T>(vj);
                p[j] -= static_cast<T>(hyper_.lr * (mj / bc1) /
                                       (std::sqrt(vj / bc2) + hyper_.adam_eps));
            }
        }
    }

private:
    TrainHyper hyper_;
    std::vector<Tensor<T>> m_, v_;
    std::uint64_t t_ = 0;
};

} // namespace detail

// Trains the Table-derived network with softmax cross-entropy. Deterministic
// for a fixed (spec, fragments, hyper): shuffling, init and dropout all derive
// from hyper.seed, and batch gradients reduce in fixed chunk order regardless
// of thread count.
template <class T>
NetModel<T> train_network(const NetworkSpec& spec, const std::vector<Fragment>& fragments,
                          const TrainHyper& hyper) {
    std::array<std::size_t, kNumClasses> per_class{};
    for (const auto& f : fragments) {
        if (f.class_label < 0 || f.class_label >= kNumClasses)
            throw TrainError("fragment with out-of-range class " + std::to_string(f.class_label));
        ++per_class[static_cast<std::size_t>(f.class_label)];
    }
    for (int c = 0; c < kNumClasses; ++c)
        if (per_class[static_cast<std::size_t>(c)] == 0)
            throw TrainError("training set is missing class " + std::to_string(c) + " (" +
                             ClassRegistry::name(c) + ")");

    NetModel<T> model{Network<T>::build(spec), {}};
    model.net.init_params(hyper.seed);
    model.meta.seed = hyper.seed;
    model.meta.epochs = hyper.epochs;

    auto params = model.net.params();
    detail::Optimizer<T> opt(hyper, params);

    const std::size_t n = fragments.size();
    const std::size_t batch = std::max<std::size_t>(1, hyper.batch);
    constexpr std::size_t kChunk = 8; // fixed: reduction order independent of threads

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    RandomStream shuffle_rng(derive_seed(hyper.seed, {0x5f}));

    const std::size_t max_chunks = (batch + kChunk - 1) / kChunk;
    std::vector<GradSet<T>> slots;
    for (std::size_t i = 0; i < max_chunks; ++i) slots.push_back(model.net.make_gradset());
    std::vector<NetworkScratch<T>> scratches(max_chunks);
    GradSet<T> total = model.net.make_gradset();

    for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t bsize = std::min(batch, n - start);
            parallel_chunks(bsize, kChunk, [&](std::size_t ci, std::size_t b, std::size_t e) {
                GradSet<T>& gs = slots[ci];
                gs.zero();
                NetworkScratch<T>& scratch = scratches[ci];
                for (std::size_t i = b; i < e; ++i) {
                    const std::size_t idx = order[start + i];
                    const Fragment& frag = fragments[idx];
                    RandomStream drop_rng(derive_seed(hyper.seed, {0xd0, epoch, idx}));
                    const Tensor<T> x = input_tensor<T>(frag, spec.kind);
                    const ForwardOut<T> out = model.net.forward(x, RunMode::train, &drop_rng, scratch);
                    gs.loss += cross_entropy(out.logits, frag.class_label);
                    const Tensor<T> dlogits = cross_entropy_grad(out.logits, frag.class_label);
                    model.net.backward(dlogits, scratch, gs);
                }
            });
            total.zero();
            for (std::size_t ci = 0; ci < (bsize + kChunk - 1) / kChunk; ++ci) total.add(slots[ci]);
            epoch_loss += total.loss;
            opt.step(params, total, 1.0 / static_cast<double>(bsize));
        }
        const double mean_loss = epoch_loss / static_cast<double>(n);
        if (!std::isfinite(mean_loss))
            throw TrainError("training diverged (non-finite loss) at epoch " + std::to_string(epoch));
        model.meta.loss_curve.push_back(mean_loss);
    }
    return model;
}

} // namespace eegclf::net
