#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace eegclf {

// Frequency band [low, high) in Hz. The canonical table is fixed:
//   delta 0.5-4, theta 4-8, alpha 8-13, beta 13-30, gamma 30-50,
//   broadband 0.5-50 (the default preprocessing band).
struct BandSpec {
    std::string name;
    double low = 0.0;  // Hz
    double high = 0.0; // Hz

    // valid at sample rate K: 0 <= low < high < K/2
    void validate_at(double sample_rate) const;
};

const std::vector<BandSpec>& canonical_bands();        // the five classic bands
BandSpec band_by_name(const std::string& name);        // includes "broadband"
bool is_band_name(const std::string& name);

} // namespace eegclf
