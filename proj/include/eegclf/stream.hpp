#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace eegclf {

constexpr int kNumClasses = 3;

// Small-integer class ids with a fixed name registry. The core is
// label-agnostic; names only surface in sidecars and reports.
struct ClassRegistry {
    static const std::array<std::string, kNumClasses>& names();
    static const std::string& name(int class_id);
    static int id(const std::string& name); // throws on unknown name
};

// Multi-channel recording: channel-major m x N sample matrix plus metadata.
// Payload values live on the f32 grid (see stream_io), stored here as double
// for downstream arithmetic.
struct EegStream {
    std::string subject_id;
    int class_label = 0;
    std::size_t channels = 0;   // m
    double sample_rate = 0.0;   // K, Hz
    std::size_t samples = 0;    // N per channel
    std::vector<float> data;    // row = channel, length channels*samples

    float at(std::size_t ch, std::size_t s) const { return data[ch * samples + s]; }
    float& at(std::size_t ch, std::size_t s) { return data[ch * samples + s]; }
    const float* channel(std::size_t ch) const { return data.data() + ch * samples; }
    float* channel(std::size_t ch) { return data.data() + ch * samples; }

    // Throws std::invalid_argument naming the violated invariant; reports the
    // first non-finite sample by (channel, sample) index.
    void validate() const;
};

// Spectral recipe for one synthetic class: relative band powers over a
// 1/f^beta background, with channel correlation rho.
struct ClassProfile {
    int class_id = 0;
    std::map<std::string, double> band_weights; // band name -> relative power >= 0
    double noise_exponent = 1.0;                // beta
    double noise_scale = 0.25;                  // noise power relative to band power
    double channel_correlation = 0.0;           // rho in [0, 1)

    void validate() const;
};

// The three built-in desk-scale profiles, one per class, separable by
// construction (disjoint dominant bands).
std::vector<ClassProfile> default_class_profiles();

} // namespace eegclf
