#include "eegclf/bands.hpp"

namespace eegclf {

void BandSpec::validate_at(double sample_rate) const {
    if (!(low >= 0.0) || !(low < high))
        throw std::invalid_argument("band " + name + ": need 0 <= low < high, got [" +
                                    std::to_string(low) + ", " + std::to_string(high) + ")");
    if (!(high < sample_rate / 2.0))
        throw std::invalid_argument("band " + name + ": high edge " + std::to_string(high) +
                                    " Hz not below Nyquist at K=" + std::to_string(sample_rate));
}

const std::vector<BandSpec>& canonical_bands() {
    static const std::vector<BandSpec> bands = {
        {"delta", 0.5, 4.0},
        {"theta", 4.0, 8.0},
        {"alpha", 8.0, 13.0},
        {"beta", 13.0, 30.0},
        {"gamma", 30.0, 50.0},
    };
    return bands;
}

BandSpec band_by_name(const std::string& name) {
    if (name == "broadband") return {"broadband", 0.5, 50.0};
    for (const auto& b : canonical_bands())
        if (b.name == name) return b;
    throw std::invalid_argument("unknown band name: " + name);
}

bool is_band_name(const std::string& name) {
    if (name == "broadband") return true;
    for (const auto& b : canonical_bands())
        if (b.name == name) return true;
    return false;
}

} // namespace eegclf
