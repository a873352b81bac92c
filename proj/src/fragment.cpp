#include "eegclf/fragment.hpp"

#include "eegclf/kernels.hpp"

#include <cmath>
#include <memory>
#include <map>
#include <mutex>
#include <numbers>

namespace eegclf {

FragmentationParams FragmentationParams::derive(const EegStream& stream, std::size_t q) {
    if (q < 1) throw std::invalid_argument("window size q must be >= 1");
    const double k = stream.sample_rate;
    const auto k_int = static_cast<std::size_t>(std::llround(k));
    if (std::fabs(k - static_cast<double>(k_int)) > 1e-9)
        throw std::invalid_argument("fragmentation requires an integral sample rate, got " +
                                    std::to_string(k));
    if (k_int % q != 0)
        throw std::invalid_argument("window q=" + std::to_string(q) +
                                    " does not divide sample rate K=" + std::to_string(k_int));
    if (stream.samples % q != 0)
        throw std::invalid_argument("window q=" + std::to_string(q) +
                                    " does not divide stream length N=" + std::to_string(stream.samples));
    FragmentationParams p;
    p.window = q;
    p.windows_per_second = k_int / q;
    p.fragments_per_stream = stream.samples / q;
    return p;
}

std::vector<Fragment> fragment_stream(const EegStream& stream, const FragmentationParams& params) {
    stream.validate();
    const std::size_t q = params.window;
    const std::size_t r = params.windows_per_second;
    const std::size_t total = stream.samples / q;
    if (params.fragments_per_stream != total)
        throw std::invalid_argument("fragmentation params do not match stream length");

    std::vector<Fragment> out;
    out.reserve(total);
    for (std::size_t g = 0; g < total; ++g) {
        Fragment f;
        f.channels = stream.channels;
        f.width = q;
        f.subject_id = stream.subject_id;
        f.class_label = stream.class_label;
        f.second_index = g / r + 1;
        f.window_index = g % r + 1;
        f.domain = FragmentDomain::time;
        f.data.resize(stream.channels * q);
        for (std::size_t ch = 0; ch < stream.channels; ++ch) {
            const float* src = stream.channel(ch) + g * q;
            double* dst = f.row(ch);
            for (std::size_t i = 0; i < q; ++i) dst[i] = src[i];
        }
        out.push_back(std::move(f));
    }
    return out;
}

Fragment normalize_fragment(const Fragment& frag) {
    for (double v : frag.data)
        if (!std::isfinite(v)) throw std::invalid_argument("normalize_fragment: non-finite input");

    Fragment out = frag;
    const double peak = kernels::abs_max(frag.data.data(), frag.data.size());
    if (peak < 1e-12) return out; // all-zero guard
    kernels::scale_div(out.data.size(), frag.data.data(), peak, out.data.data());
    return out;
}

namespace {

// Real-DFT basis for window q: bins k = 0..q/2, tables laid out q x bins so
// the transform is two gemms over contiguous rows.
struct RealDftPlan {
    std::size_t q = 0;
    std::size_t bins = 0;
    std::vector<double> cos_table; // [n * bins + k] = cos(2 pi k n / q)
    std::vector<double> sin_table; // [n * bins + k] = sin(2 pi k n / q)

    explicit RealDftPlan(std::size_t q_) : q(q_), bins(spectrum_bins(q_)) {
        cos_table.resize(q * bins);
        sin_table.resize(q * bins);
        const double w = 2.0 * std::numbers::pi / static_cast<double>(q);
        for (std::size_t n = 0; n < q; ++n)
            for (std::size_t k = 0; k < bins; ++k) {
                cos_table[n * bins + k] = std::cos(w * static_cast<double>(k * n % q));
                sin_table[n * bins + k] = std::sin(w * static_cast<double>(k * n % q));
            }
    }
};

const RealDftPlan& plan_for(std::size_t q) {
    static std::mutex mu;
    static std::map<std::size_t, std::unique_ptr<RealDftPlan>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[q];
    if (!slot) slot = std::make_unique<RealDftPlan>(q);
    return *slot;
}

} // namespace

Fragment to_frequency_domain(const Fragment& frag) {
    if (frag.domain == FragmentDomain::frequency)
        throw std::invalid_argument("to_frequency_domain: fragment is already in the frequency domain");
    const std::size_t q = frag.width;
    const RealDftPlan& plan = plan_for(q);

    Fragment out;
    out.channels = frag.channels;
    out.width = plan.bins;
    out.subject_id = frag.subject_id;
    out.class_label = frag.class_label;
    out.second_index = frag.second_index;
    out.window_index = frag.window_index;
    out.domain = FragmentDomain::frequency;
    out.data.assign(frag.channels * plan.bins, 0.0);

    std::vector<double> re(frag.channels * plan.bins);
    std::vector<double> im(frag.channels * plan.bins);
    kernels::gemm(frag.channels, plan.bins, q, frag.data.data(), plan.cos_table.data(), re.data());
    kernels::gemm(frag.channels, plan.bins, q, frag.data.data(), plan.sin_table.data(), im.data());
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = std::sqrt(re[i] * re[i] + im[i] * im[i]);
    return out;
}

} // namespace eegclf
