#pragma once

#include "eegclf/fragment.hpp"
#include "eegclf/net/layers.hpp"

#include <array>
#include <memory>

namespace eegclf::net {

enum class NetKind : std::uint8_t { ann, rnn, cnn };

std::string net_kind_name(NetKind kind);
NetKind net_kind_from_name(const std::string& name);

// Which feature vector the classifier heads consume: the 3-dim vector the
// classifier row literally follows (logits), or the activations entering the
// final dense layer (penultimate).
enum class HeadFeatures : std::uint8_t { logits, penultimate };

struct NetworkSpec {
    NetKind kind = NetKind::ann;
    std::size_t input_channels = 0; // m
    std::size_t input_width = 0;    // q (or spectrum bins)
    std::vector<LayerSpec> layers;  // includes the leading Input marker

    bool operator==(const NetworkSpec&) const = default;
};

// The built-in stacks, layer for layer. Conv blocks use 32/64/64 filters; the
// first pooling row takes stride = kernel; convolutions are same-padded.
NetworkSpec table_network(NetKind kind, std::size_t input_channels, std::size_t input_width);

template <class T>
struct NetworkScratch {
    std::vector<LayerScratch<T>> layers;
    Tensor<T> head_input; // input to the final dense layer
};

template <class T>
struct ForwardOut {
    Tensor<T> logits;
    Tensor<T> head_input;
};

// Parameter gradients, aligned with Network::params().
template <class T>
struct GradSet {
    std::vector<Tensor<T>> g;
    double loss = 0.0;

    void zero() {
        for (auto& t : g) t.fill(T(0));
        loss = 0.0;
    }
    void add(const GradSet& o) {
        for (std::size_t i = 0; i < g.size(); ++i)
            kernels::add(g[i].size(), o.g[i].data(), g[i].data());
        loss += o.loss;
    }
};

template <class T>
class Network {
public:
    // Validates the spec against the built-in template for its kind and runs
    // shape inference (which also rejects illegal pooling traces).
    static Network build(const NetworkSpec& spec) {
        if (spec != table_network(spec.kind, spec.input_channels, spec.input_width))
            throw std::invalid_argument("network spec does not match the built-in " +
                                        net_kind_name(spec.kind) + " template");
        return Network(spec);
    }

    const NetworkSpec& spec() const { return spec_; }

    std::vector<std::size_t> input_shape() const {
        if (spec_.kind == NetKind::cnn) return {1, spec_.input_channels, spec_.input_width};
        return {spec_.input_channels, spec_.input_width};
    }

    // Output shape after every layer (input marker first).
    std::vector<std::vector<std::size_t>> shape_trace() const {
        std::vector<std::vector<std::size_t>> trace{input_shape()};
        for (const auto& l : layers_) trace.push_back(l->out_shape());
        return trace;
    }

    void init_params(std::uint64_t seed) {
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            RandomStream rng(derive_seed(seed, {0x11, i}));
            layers_[i]->init_params(rng);
        }
    }

    std::vector<Tensor<T>*> params() {
        std::vector<Tensor<T>*> out;
        for (auto& l : layers_)
            for (auto* p : l->params_mut()) out.push_back(p);
        return out;
    }
    std::vector<const Tensor<T>*> params() const {
        std::vector<const Tensor<T>*> out;
        for (const auto& l : layers_)
            for (auto* p : l->params()) out.push_back(p);
        return out;
    }

    GradSet<T> make_gradset() const {
        GradSet<T> gs;
        for (const auto* p : params()) gs.g.emplace_back(p->shape);
        return gs;
    }

    ForwardOut<T> forward(const Tensor<T>& x, RunMode mode, RandomStream* rng,
                          NetworkScratch<T>& scratch) const {
        if (x.shape != input_shape())
            throw std::invalid_argument("input shape " + x.shape_str() + " does not match network input");
        if (scratch.layers.size() != layers_.size()) scratch.layers.resize(layers_.size());
        Tensor<T> cur = x;
        Tensor<T> next;
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            if (i == last_dense_) scratch.head_input = cur;
            layers_[i]->forward(cur, mode, rng, scratch.layers[i], next);
            cur = std::move(next);
        }
        if (!cur.finite()) throw std::runtime_error("non-finite network output");
        return {cur, scratch.head_input};
    }

    ForwardOut<T> forward(const Tensor<T>& x) const {
        NetworkScratch<T> scratch;
        return forward(x, RunMode::eval, nullptr, scratch);
    }

    // dlogits is the gradient at the network output; fills gs and returns the
    // input gradient. Requires the scratch of a preceding train-mode forward.
    Tensor<T> backward(const Tensor<T>& dlogits, const NetworkScratch<T>& scratch,
                       GradSet<T>& gs) const {
        Tensor<T> dcur = dlogits;
        Tensor<T> dprev;
        std::size_t slot_end = gs.g.size();
        for (std::size_t i = layers_.size(); i-- > 0;) {
            const std::size_t slot_begin = slot_end - layers_[i]->params().size();
            layers_[i]->backward(dcur, scratch.layers[i], gs.g.data() + slot_begin, dprev);
            slot_end = slot_begin;
            dcur = std::move(dprev);
        }
        return dcur;
    }

private:
    explicit Network(NetworkSpec spec) : spec_(std::move(spec)) {
        std::vector<std::size_t> shape = input_shape();
        for (const auto& ls : spec_.layers) {
            if (ls.kind == LayerKind::input) continue;
            std::unique_ptr<Layer<T>> layer;
            switch (ls.kind) {
            case LayerKind::conv: layer = std::make_unique<Conv2d<T>>(ls, shape); break;
            case LayerKind::elu: layer = std::make_unique<Elu<T>>(ls, shape); break;
            case LayerKind::relu: layer = std::make_unique<Relu<T>>(ls, shape); break;
            case LayerKind::maxpool: layer = std::make_unique<MaxPool<T>>(ls, shape); break;
            case LayerKind::dropout: layer = std::make_unique<Dropout<T>>(ls, shape); break;
            case LayerKind::dense: layer = std::make_unique<Dense<T>>(ls, shape); break;
            case LayerKind::recurrent: layer = std::make_unique<Recurrent<T>>(ls, shape); break;
            case LayerKind::vectorize: layer = std::make_unique<Vectorize<T>>(ls, shape); break;
            case LayerKind::input: break;
            }
            shape = layer->out_shape();
            if (ls.kind == LayerKind::dense) last_dense_ = layers_.size();
            layers_.push_back(std::move(layer));
        }
        if (shape != std::vector<std::size_t>{3})
            throw std::invalid_argument("network must emit 3 logits");
    }

    NetworkSpec spec_;
    std::vector<std::unique_ptr<Layer<T>>> layers_;
    std::size_t last_dense_ = 0;
};

// Fragment -> network input tensor (cast to the run precision).
template <class T>
Tensor<T> input_tensor(const Fragment& frag, NetKind kind) {
    std::vector<std::size_t> shape = kind == NetKind::cnn
                                         ? std::vector<std::size_t>{1, frag.channels, frag.width}
                                         : std::vector<std::size_t>{frag.channels, frag.width};
    Tensor<T> t(std::move(shape));
    for (std::size_t i = 0; i < frag.data.size(); ++i) t[i] = static_cast<T>(frag.data[i]);
    return t;
}

// Numerically stable softmax over the 3 logits (max subtraction).
template <class T>
std::array<double, 3> softmax3(const T* logits) {
    double m = static_cast<double>(logits[0]);
    for (int i = 1; i < 3; ++i) m = std::max(m, static_cast<double>(logits[i]));
    std::array<double, 3> e{};
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) {
        e[static_cast<std::size_t>(i)] = std::exp(static_cast<double>(logits[i]) - m);
        sum += e[static_cast<std::size_t>(i)];
    }
    for (auto& v : e) v /= sum;
    return e;
}

template <class T>
double cross_entropy(const Tensor<T>& logits, int target) {
    const auto p = softmax3(logits.data());
    return -std::log(std::max(p[static_cast<std::size_t>(target)], 1e-300));
}

// d(cross entropy)/d(logits) = softmax(logits) - onehot(target)
template <class T>
Tensor<T> cross_entropy_grad(const Tensor<T>& logits, int target) {
    const auto p = softmax3(logits.data());
    Tensor<T> g({3});
    for (int i = 0; i < 3; ++i)
        g[static_cast<std::size_t>(i)] =
            static_cast<T>(p[static_cast<std::size_t>(i)] - (i == target ? 1.0 : 0.0));
    return g;
}

} // namespace eegclf::net
