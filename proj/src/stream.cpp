#include "eegclf/stream.hpp"

#include <cmath>

namespace eegclf {

const std::array<std::string, kNumClasses>& ClassRegistry::names() {
    static const std::array<std::string, kNumClasses> n = {"FES", "HC", "CHR"};
    return n;
}

const std::string& ClassRegistry::name(int class_id) {
    if (class_id < 0 || class_id >= kNumClasses)
        throw std::invalid_argument("class id out of range: " + std::to_string(class_id));
    return names()[static_cast<std::size_t>(class_id)];
}

int ClassRegistry::id(const std::string& name) {
    for (int i = 0; i < kNumClasses; ++i)
        if (names()[static_cast<std::size_t>(i)] == name) return i;
    throw std::invalid_argument("unknown class label: " + name);
}

void EegStream::validate() const {
    if (channels < 1) throw std::invalid_argument("stream must have at least one channel");
    if (samples < 1) throw std::invalid_argument("stream must have at least one sample");
    if (sample_rate <= 0.0) throw std::invalid_argument("sample rate must be positive");
    if (class_label < 0 || class_label >= kNumClasses)
        throw std::invalid_argument("class label out of range: " + std::to_string(class_label));
    if (data.size() != channels * samples)
        throw std::invalid_argument("data size " + std::to_string(data.size()) +
                                    " does not match channels*samples " +
                                    std::to_string(channels * samples));
    for (std::size_t ch = 0; ch < channels; ++ch) {
        const float* row = channel(ch);
        for (std::size_t s = 0; s < samples; ++s) {
            if (!std::isfinite(row[s]))
                throw std::invalid_argument("non-finite sample at channel " + std::to_string(ch) +
                                            ", sample " + std::to_string(s));
        }
    }
}

void ClassProfile::validate() const {
    bool any_positive = false;
    for (const auto& [band, w] : band_weights) {
        if (w < 0.0) throw std::invalid_argument("negative band weight for " + band);
        if (w > 0.0) any_positive = true;
    }
    if (!any_positive) throw std::invalid_argument("profile needs at least one positive band weight");
    if (channel_correlation < 0.0 || channel_correlation >= 1.0)
        throw std::invalid_argument("channel correlation must lie in [0, 1)");
    if (noise_scale < 0.0) throw std::invalid_argument("noise scale must be non-negative");
}

std::vector<ClassProfile> default_class_profiles() {
    std::vector<ClassProfile> p(3);
    p[0].class_id = 0; // FES stand-in: alpha dominant
    p[0].band_weights = {{"alpha", 1.0}, {"theta", 0.15}};
    p[0].noise_exponent = 1.0;
    p[0].channel_correlation = 0.3;
    p[1].class_id = 1; // HC stand-in: beta dominant
    p[1].band_weights = {{"beta", 1.0}, {"alpha", 0.2}};
    p[1].noise_exponent = 1.1;
    p[1].channel_correlation = 0.35;
    p[2].class_id = 2; // CHR stand-in: theta dominant
    p[2].band_weights = {{"theta", 1.0}, {"beta", 0.15}};
    p[2].noise_exponent = 0.9;
    p[2].channel_correlation = 0.25;
    return p;
}

} // namespace eegclf
