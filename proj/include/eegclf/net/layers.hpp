#pragma once

#include "eegclf/kernels.hpp"
#include "eegclf/rng.hpp"
#include "eegclf/tensor.hpp"

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace eegclf::net {

enum class RunMode { train, eval };

enum class LayerKind : std::uint8_t {
    input, conv, elu, relu, maxpool, dropout, dense, recurrent, vectorize
};

enum class VecMode : std::uint8_t { flatten, sequence };

// Serializable layer descriptor; the per-kind fields below are meaningful.
struct LayerSpec {
    LayerKind kind = LayerKind::input;
    std::size_t kernel_h = 0, kernel_w = 0; // conv / maxpool (kernel_h only)
    std::size_t stride = 0;                 // conv / maxpool
    std::size_t units = 0;                  // conv filters / dense units / recurrent hidden
    double rate = 0.0;                      // dropout
    double alpha = 1.0;                     // elu
    VecMode vec_mode = VecMode::flatten;

    bool operator==(const LayerSpec&) const = default;
    std::string describe() const;

    static LayerSpec Input() { return {}; }
    static LayerSpec Conv(std::size_t kh, std::size_t kw, std::size_t stride, std::size_t filters) {
        LayerSpec s; s.kind = LayerKind::conv; s.kernel_h = kh; s.kernel_w = kw; s.stride = stride; s.units = filters; return s;
    }
    static LayerSpec Elu(double alpha = 1.0) { LayerSpec s; s.kind = LayerKind::elu; s.alpha = alpha; return s; }
    static LayerSpec Relu() { LayerSpec s; s.kind = LayerKind::relu; return s; }
    static LayerSpec MaxPool(std::size_t kernel, std::size_t stride) {
        LayerSpec s; s.kind = LayerKind::maxpool; s.kernel_h = kernel; s.kernel_w = kernel; s.stride = stride; return s;
    }
    static LayerSpec Dropout(double rate) { LayerSpec s; s.kind = LayerKind::dropout; s.rate = rate; return s; }
    static LayerSpec Dense(std::size_t units) { LayerSpec s; s.kind = LayerKind::dense; s.units = units; return s; }
    static LayerSpec Recurrent(std::size_t hidden) { LayerSpec s; s.kind = LayerKind::recurrent; s.units = hidden; return s; }
    static LayerSpec Vectorize(VecMode mode) { LayerSpec s; s.kind = LayerKind::vectorize; s.vec_mode = mode; return s; }
};

// Per-forward scratch owned by the caller, so trained layers stay immutable
// and eval-mode forwards can run concurrently.
template <class T>
struct LayerScratch {
    Tensor<T> in;
    Tensor<T> out;
    Tensor<T> cols;                      // conv im2col buffer
    Tensor<T> mask;                      // dropout
    std::vector<std::uint32_t> indices;  // maxpool argmax positions
    std::vector<Tensor<T>> seq;          // recurrent per-step hidden states
    Tensor<T> seq_input;                 // recurrent transposed input
    RunMode mode = RunMode::eval;
};

template <class T>
class Layer {
public:
    virtual ~Layer() = default;
    virtual LayerSpec spec() const = 0;
    virtual std::vector<std::size_t> out_shape() const = 0;

    virtual void forward(const Tensor<T>& x, RunMode mode, RandomStream* rng,
                         LayerScratch<T>& s, Tensor<T>& y) const = 0;
    // Accumulates parameter gradients into the slots at grads (one tensor per
    // entry of params(), in order) and writes the input gradient to dx.
    virtual void backward(const Tensor<T>& dy, const LayerScratch<T>& s,
                          Tensor<T>* grads, Tensor<T>& dx) const = 0;

    virtual std::vector<const Tensor<T>*> params() const { return {}; }
    virtual std::vector<Tensor<T>*> params_mut() { return {}; }
    virtual void init_params(RandomStream&) {}
};

namespace detail {

template <class T>
void he_uniform(Tensor<T>& w, std::size_t fan_in, RandomStream& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (auto& v : w.v) v = static_cast<T>(rng.uniform(-bound, bound));
}

inline std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

} // namespace detail

// ---------------------------------------------------------------------------
// Conv2d, same padding, stride per spec. Input {C,H,W} fixed at build time.

template <class T>
class Conv2d final : public Layer<T> {
public:
    Conv2d(LayerSpec spec, std::vector<std::size_t> in_shape)
        : spec_(spec), cin_(in_shape.at(0)), h_(in_shape.at(1)), w_(in_shape.at(2)) {
        if (spec.stride < 1) throw std::invalid_argument("conv stride must be >= 1");
        cout_ = spec.units;
        kh_ = spec.kernel_h;
        kw_ = spec.kernel_w;
        ho_ = detail::ceil_div(h_, spec.stride);
        wo_ = detail::ceil_div(w_, spec.stride);
        const std::size_t pad_h = std::max<std::ptrdiff_t>(
            0, static_cast<std::ptrdiff_t>((ho_ - 1) * spec.stride + kh_) - static_cast<std::ptrdiff_t>(h_));
        const std::size_t pad_w = std::max<std::ptrdiff_t>(
            0, static_cast<std::ptrdiff_t>((wo_ - 1) * spec.stride + kw_) - static_cast<std::ptrdiff_t>(w_));
        pad_top_ = pad_h / 2;
        pad_left_ = pad_w / 2;
        patch_ = cin_ * kh_ * kw_;
        weight_ = Tensor<T>({cout_, patch_});
        bias_ = Tensor<T>({cout_});
    }

    LayerSpec spec() const override { return spec_; }
    std::vector<std::size_t> out_shape() const override { return {cout_, ho_, wo_}; }

    void init_params(RandomStream& rng) override {
        detail::he_uniform(weight_, patch_, rng);
        bias_.fill(T(0));
    }

    std::vector<const Tensor<T>*> params() const override { return {&weight_, &bias_}; }
    std::vector<Tensor<T>*> params_mut() override { return {&weight_, &bias_}; }

    void forward(const Tensor<T>& x, RunMode, RandomStream*, LayerScratch<T>& s,
                 Tensor<T>& y) const override {
        const std::size_t positions = ho_ * wo_;
        if (s.cols.shape != std::vector<std::size_t>{patch_, positions})
            s.cols = Tensor<T>({patch_, positions});
        im2col(x, s.cols);
        y = Tensor<T>({cout_, ho_, wo_});
        kernels::gemm(cout_, positions, patch_, weight_.data(), s.cols.data(), y.data());
        for (std::size_t f = 0; f < cout_; ++f) {
            T* row = y.data() + f * positions;
            const T bv = bias_[f];
            for (std::size_t p = 0; p < positions; ++p) row[p] += bv;
        }
    }

    void backward(const Tensor<T>& dy, const LayerScratch<T>& s,
                  Tensor<T>* grads, Tensor<T>& dx) const override {
        const std::size_t positions = ho_ * wo_;
        Tensor<T>& dw = grads[0];
        Tensor<T>& db = grads[1];
        // dW += dY * cols^T
        kernels::gemm_nt(cout_, patch_, positions, dy.data(), s.cols.data(), dw.data(), true);
        for (std::size_t f = 0; f < cout_; ++f) {
            const T* row = dy.data() + f * positions;
            T acc = 0;
            for (std::size_t p = 0; p < positions; ++p) acc += row[p];
            db[f] += acc;
        }
        // dcols = W^T * dY, then scatter back
        Tensor<T> dcols({patch_, positions});
        kernels::gemm_tn(cout_, patch_, positions, weight_.data(), dy.data(), dcols.data(), false);
        dx = Tensor<T>({cin_, h_, w_});
        col2im(dcols, dx);
    }

private:
    void im2col(const Tensor<T>& x, Tensor<T>& cols) const {
        const std::size_t positions = ho_ * wo_;
        T* out = cols.data();
        for (std::size_t c = 0; c < cin_; ++c) {
            const T* plane = x.data() + c * h_ * w_;
            for (std::size_t ky = 0; ky < kh_; ++ky)
                for (std::size_t kx = 0; kx < kw_; ++kx) {
                    T* row = out + ((c * kh_ + ky) * kw_ + kx) * positions;
                    for (std::size_t oy = 0; oy < ho_; ++oy) {
                        const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * spec_.stride + ky) -
                                                  static_cast<std::ptrdiff_t>(pad_top_);
                        const bool in_y = iy >= 0 && iy < static_cast<std::ptrdiff_t>(h_);
                        for (std::size_t ox = 0; ox < wo_; ++ox) {
                            const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * spec_.stride + kx) -
                                                      static_cast<std::ptrdiff_t>(pad_left_);
                            row[oy * wo_ + ox] =
                                (in_y && ix >= 0 && ix < static_cast<std::ptrdiff_t>(w_))
                                    ? plane[static_cast<std::size_t>(iy) * w_ + static_cast<std::size_t>(ix)]
                                    : T(0);
                        }
                    }
                }
        }
    }

    void col2im(const Tensor<T>& cols, Tensor<T>& dx) const {
        const std::size_t positions = ho_ * wo_;
        const T* in = cols.data();
        for (std::size_t c = 0; c < cin_; ++c) {
            T* plane = dx.data() + c * h_ * w_;
            for (std::size_t ky = 0; ky < kh_; ++ky)
                for (std::size_t kx = 0; kx < kw_; ++kx) {
                    const T* row = in + ((c * kh_ + ky) * kw_ + kx) * positions;
                    for (std::size_t oy = 0; oy < ho_; ++oy) {
                        const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * spec_.stride + ky) -
                                                  static_cast<std::ptrdiff_t>(pad_top_);
                        if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h_)) continue;
                        for (std::size_t ox = 0; ox < wo_; ++ox) {
                            const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * spec_.stride + kx) -
                                                      static_cast<std::ptrdiff_t>(pad_left_);
                            if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(w_)) continue;
                            plane[static_cast<std::size_t>(iy) * w_ + static_cast<std::size_t>(ix)] +=
                                row[oy * wo_ + ox];
                        }
                    }
                }
        }
    }

    LayerSpec spec_;
    std::size_t cin_, h_, w_;
    std::size_t cout_ = 0, kh_ = 0, kw_ = 0;
    std::size_t ho_ = 0, wo_ = 0, pad_top_ = 0, pad_left_ = 0, patch_ = 0;
    Tensor<T> weight_;
    Tensor<T> bias_;
};

// ---------------------------------------------------------------------------

template <class T>
class Elu final : public Layer<T> {
public:
    Elu(LayerSpec spec, std::vector<std::size_t> in_shape) : spec_(spec), shape_(std::move(in_shape)) {}

    LayerSpec spec() const override { return spec_; }
    std::vector<std::size_t> out_shape() const override { return shape_; }

    void forward(const Tensor<T>& x, RunMode, RandomStream*, LayerScratch<T>& s,
                 Tensor<T>& y) const override {
        y = Tensor<T>(x.shape);
        kernels::elu_fwd(x.size(), static_cast<T>(spec_.alpha), x.data(), y.data());
        s.out = y;
    }

    void backward(const Tensor<T>& dy, const LayerScratch<T>& s,
                  Tensor<T>*, Tensor<T>& dx) const override {
        dx = Tensor<T>(dy.shape);
        kernels::elu_bwd(dy.size(), static_cast<T>(spec_.alpha), s.out.data(), dy.data(), dx.data());
    }

private:
    LayerSpec spec_;
    std::vector<std::size_t> shape_;
};

template <class T>
class Relu final : public Layer<T> {
public:
    Relu(LayerSpec spec, std::vector<std::size_t> in_shape) : spec_(spec), shape_(std::move(in_shape)) {}

    LayerSpec spec() const override { return spec_; }
    std::vector<std::size_t> out_shape() const override { return shape_; }

    void forward(const Tensor<T>& x, RunMode, RandomStream*, LayerScratch<T>& s,
                 Tensor<T>& y) const override {
        y = Tensor<T>(x.shape);
        kernels::relu_fwd(x.size(), x.data(), y.data());
        s.out = y;
    }

    void backward(const Tensor<T>& dy, const LayerScratch<T>& s,
                  Tensor<T>*, Tensor<T>& dx) const override {
        dx = Tensor<T>(dy.shape);
        kernels::relu_bwd(dy.size(), s.out.data(), dy.data(), dx.data());
    }

private:
    LayerSpec spec_;
    std::vector<std::size_t> shape_;
};

// ---------------------------------------------------------------------------
// MaxPool, valid windows with floor division; a window larger than the input
// extent clamps to the whole extent (output 1 in that dimension). Ties take
// the first element in scan order.

template <class T>
class MaxPool final : public Layer<T> {
public:
    MaxPool(LayerSpec spec, std::vector<std::size_t> in_shape)
        : spec_(spec), c_(in_shape.at(0)), h_(in_shape.at(1)), w_(in_shape.at(2)) {
        k_ = spec.kernel_h;
        s_ = spec.stride;
        if (k_ < 1 || s_ < 1) throw std::invalid_argument("maxpool kernel/stride must be >= 1");
        ho_ = h_ < k_ ? 1 : (h_ - k_) / s_ + 1;
        wo_ = w_ < k_ ? 1 : (w_ - k_) / s_ + 1;
    }

    LayerSpec spec() const override { return spec_; }
    std::vector<std::size_t> out_shape() const override { return {c_, ho_, wo_}; }

    void forward(const Tensor<T>& x, RunMode, RandomStream*, LayerScratch<T>& s,
                 Tensor<T>& y) const override {
        y = Tensor<T>({c_, ho_, wo_});
        s.indices.assign(y.size(), 0);
        const std::size_t kh = std::min(k_, h_), kw = std::min(k_, w_);
        for (std::size_t c = 0; c < c_; ++c) {
            const T* plane = x.data() + c * h_ * w_;
            for (std::size_t oy = 0; oy < ho_; ++oy)
                for (std::size_t ox = 0; ox < wo_; ++ox) {
                    const std::size_t y0 = oy * s_, x0 = ox * s_;
                    T best = plane[y0 * w_ + x0];
                    std::size_t best_idx = y0 * w_ + x0;
                    for (std::size_t dy = 0; dy < kh; ++dy)
                        for (std::size_t dxi = 0; dxi < kw; ++dxi) {
                            const std::size_t idx = (y0 + dy) * w_ + (x0 + dxi);
                            if (plane[idx] > best) { best = plane[idx]; best_idx = idx; }
                        }
                    const std::size_t o = (c * ho_ + oy) * wo_ + ox;
                    y[o] = best;
                    s.indices[o] = static_cast<std::uint32_t>(best_idx);
                }
        }
    }

    void backward(const Tensor<T>& dy, const LayerScratch<T>& s,
                  Tensor<T>*, Tensor<T>& dx) const override {
        dx = Tensor<T>({c_, h_, w_});
        for (std::size_t c = 0; c < c_; ++c) {
            T* plane = dx.data() + c * h_ * w_;
            for (std::size_t o = c * ho_ * wo_; o < (c + 1) * ho_ * wo_; ++o)
                plane[s.indices[o]] += dy[o];
        }
    }

private:
    LayerSpec spec_;
    std::size_t c_, h_, w_;
    std::size_t k_ = 0, s_ = 0, ho_ = 0, wo_ = 0;
};

// ---------------------------------------------------------------------------
// Inverted dropout: train mode scales surviving units by 1/(1-rate) so the
// eval forward is the identity.

template <class T>
class Dropout final : public Layer<T> {
public:
    Dropout(LayerSpec spec, std::vector<std::size_t> in_shape) : spec_(spec), shape_(std::move(in_shape)) {
        if (spec.rate < 0.0 || spec.rate >= 1.0) throw std::invalid_argument("dropout rate must lie in [0, 1)");
    }

    LayerSpec spec() const override { return spec_; }
    std::vector<std::size_t> out_shape() const override { return shape_; }

    void forward(const Tensor<T>& x, RunMode mode, RandomStream* rng, LayerScratch<T>& s,
                 Tensor<T>& y) const override {
        s.mode = mode;
        if (mode == RunMode::eval) {
            y = x;
            return;
        }
        if (!rng) throw std::invalid_argument("train-mode dropout needs a random stream");
        const T keep_scale = static_cast<T>(1.0 / (1.0 - spec_.rate));
        if (s.mask.shape != x.shape) s.mask = Tensor<T>(x.shape);
        for (std::size_t i = 0; i < x.size(); ++i)
            s.mask[i] = rng->uniform01() >= spec_.rate ? keep_scale : T(0);
        y = Tensor<T>(x.shape);
        kernels::mul(x.size(), x.data(), s.mask.data(), y.data());
    }

    void backward(const Tensor<T>& dy, const LayerScratch<T>& s,
                  Tensor<T>*, Tensor<T>& dx) const override {
        if (s.mode == RunMode::eval)
            throw std::logic_error("dropout backward called on an eval-mode forward");
        dx = Tensor<T>(dy.shape);
        kernels::mul(dy.size(), dy.data(), s.mask.data(), dx.data());
    }

private:
    LayerSpec spec_;
    std::vector<std::size_t> shape_;
};

// ---------------------------------------------------------------------------

template <class T>
class Dense final : public Layer<T> {
public:
    Dense(LayerSpec spec, std::vector<std::size_t> in_shape) : spec_(spec) {
        in_ = Tensor<T>::count(in_shape);
        out_ = spec.units;
        weight_ = Tensor<T>({out_, in_});
        bias_ = Tensor<T>({out_});
    }

    LayerSpec spec() const override { return spec_; }
    std::vector<std::size_t> out_shape() const override { return {out_}; }

    void init_params(RandomStream& rng) override {
        detail::he_uniform(weight_, in_, rng);
        bias_.fill(T(0));
    }

    std::vector<const Tensor<T>*> params() const override { return {&weight_, &bias_}; }
    std::vector<Tensor<T>*> params_mut() override { return {&weight_, &bias_}; }

    void forward(const Tensor<T>& x, RunMode, RandomStream*, LayerScratch<T>& s,
                 Tensor<T>& y) const override {
        if (x.size() != in_)
            throw std::invalid_argument("dense layer expects " + std::to_string(in_) +
                                        " inputs, got " + x.shape_str());
        s.in = x;
        y = Tensor<T>({out_});
        kernels::gemv(out_, in_, weight_.data(), x.data(), y.data());
        kernels::add(out_, bias_.data(), y.data());
    }

    void backward(const Tensor<T>& dy, const LayerScratch<T>& s,
                  Tensor<T>* grads, Tensor<T>& dx) const override {
        kernels::ger(out_, in_, T(1), dy.data(), s.in.data(), grads[0].data());
        kernels::add(out_, dy.data(), grads[1].data());
        dx = Tensor<T>(s.in.shape);
        kernels::gemv_t(out_, in_, weight_.data(), dy.data(), dx.data());
    }

private:
    LayerSpec spec_;
    std::size_t in_ = 0, out_ = 0;
    Tensor<T> weight_;
    Tensor<T> bias_;
};

// ---------------------------------------------------------------------------
// Vanilla recurrent cell h' = tanh(Wx x + Wh h + b) over the fragment's q
// columns as timesteps; emits the final hidden state.

template <class T>
class Recurrent final : public Layer<T> {
public:
    Recurrent(LayerSpec spec, std::vector<std::size_t> in_shape) : spec_(spec) {
        if (in_shape.size() != 2)
            throw std::invalid_argument("recurrent layer expects an m x q input");
        m_ = in_shape[0];
        steps_ = in_shape[1];
        hidden_ = spec.units;
        wx_ = Tensor<T>({hidden_, m_});
        wh_ = Tensor<T>({hidden_, hidden_});
        bias_ = Tensor<T>({hidden_});
    }

    LayerSpec spec() const override { return spec_; }
    std::vector<std::size_t> out_shape() const override { return {hidden_}; }

    void init_params(RandomStream& rng) override {
        detail::he_uniform(wx_, m_, rng);
        detail::he_uniform(wh_, hidden_, rng);
        bias_.fill(T(0));
    }

    std::vector<const Tensor<T>*> params() const override { return {&wx_, &wh_, &bias_}; }
    std::vector<Tensor<T>*> params_mut() override { return {&wx_, &wh_, &bias_}; }

    void forward(const Tensor<T>& x, RunMode, RandomStream*, LayerScratch<T>& s,
                 Tensor<T>& y) const override {
        // transpose to steps x m for contiguous timestep rows
        s.seq_input = Tensor<T>({steps_, m_});
        for (std::size_t i = 0; i < m_; ++i)
            for (std::size_t t = 0; t < steps_; ++t)
                s.seq_input[t * m_ + i] = x[i * steps_ + t];

        s.seq.assign(steps_, Tensor<T>({hidden_}));
        Tensor<T> h({hidden_});
        Tensor<T> a({hidden_});
        for (std::size_t t = 0; t < steps_; ++t) {
            kernels::gemv(hidden_, m_, wx_.data(), s.seq_input.data() + t * m_, a.data());
            kernels::gemv(hidden_, hidden_, wh_.data(), h.data(), a.data(), true);
            kernels::add(hidden_, bias_.data(), a.data());
            for (std::size_t i = 0; i < hidden_; ++i) h[i] = std::tanh(a[i]);
            s.seq[t] = h;
        }
        y = h;
    }

    void backward(const Tensor<T>& dy, const LayerScratch<T>& s,
                  Tensor<T>* grads, Tensor<T>& dx) const override {
        Tensor<T>& dwx = grads[0];
        Tensor<T>& dwh = grads[1];
        Tensor<T>& db = grads[2];
        dx = Tensor<T>({m_, steps_});

        Tensor<T> dh = dy;
        Tensor<T> da({hidden_});
        Tensor<T> dxt({m_});
        for (std::size_t t = steps_; t-- > 0;) {
            const Tensor<T>& h = s.seq[t];
            for (std::size_t i = 0; i < hidden_; ++i)
                da[i] = dh[i] * (T(1) - h[i] * h[i]);
            kernels::ger(hidden_, m_, T(1), da.data(), s.seq_input.data() + t * m_, dwx.data());
            if (t > 0)
                kernels::ger(hidden_, hidden_, T(1), da.data(), s.seq[t - 1].data(), dwh.data());
            kernels::add(hidden_, da.data(), db.data());
            kernels::gemv_t(hidden_, m_, wx_.data(), da.data(), dxt.data());
            for (std::size_t i = 0; i < m_; ++i) dx[i * steps_ + t] = dxt[i];
            kernels::gemv_t(hidden_, hidden_, wh_.data(), da.data(), dh.data());
        }
    }

private:
    LayerSpec spec_;
    std::size_t m_ = 0, steps_ = 0, hidden_ = 0;
    Tensor<T> wx_, wh_, bias_;
};

// ---------------------------------------------------------------------------
// Vectorize: flatten reshapes to a vector; sequence passes the m x q matrix
// through for the recurrent layer to unroll column-wise.

template <class T>
class Vectorize final : public Layer<T> {
public:
    Vectorize(LayerSpec spec, std::vector<std::size_t> in_shape)
        : spec_(spec), in_shape_(std::move(in_shape)) {}

    LayerSpec spec() const override { return spec_; }
    std::vector<std::size_t> out_shape() const override {
        if (spec_.vec_mode == VecMode::flatten) return {Tensor<T>::count(in_shape_)};
        return in_shape_;
    }

    void forward(const Tensor<T>& x, RunMode, RandomStream*, LayerScratch<T>&,
                 Tensor<T>& y) const override {
        y = x;
        y.shape = out_shape();
    }

    void backward(const Tensor<T>& dy, const LayerScratch<T>&,
                  Tensor<T>*, Tensor<T>& dx) const override {
        dx = dy;
        dx.shape = in_shape_;
    }

private:
    LayerSpec spec_;
    std::vector<std::size_t> in_shape_;
};

} // namespace eegclf::net
