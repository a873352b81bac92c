#pragma once

#include "eegclf/stream.hpp"

#include <vector>

namespace eegclf {

enum class FragmentDomain { time, frequency };

// One m x q window cut from a stream, indexed by (second t, within-second k),
// both 1-based. Frequency-domain fragments hold the one-sided amplitude
// spectrum, m x (q/2+1), entries >= 0.
struct Fragment {
    std::vector<double> data; // row-major, channels x width
    std::size_t channels = 0;
    std::size_t width = 0;
    std::string subject_id;
    int class_label = 0;
    std::size_t second_index = 1; // t in [1, T]
    std::size_t window_index = 1; // k in [1, r]
    FragmentDomain domain = FragmentDomain::time;

    double at(std::size_t ch, std::size_t i) const { return data[ch * width + i]; }
    const double* row(std::size_t ch) const { return data.data() + ch * width; }
    double* row(std::size_t ch) { return data.data() + ch * width; }
};

struct FragmentationParams {
    std::size_t window = 0;              // q, samples
    std::size_t windows_per_second = 0;  // r = K/q
    std::size_t fragments_per_stream = 0; // N/q

    // Validates K mod q = 0 and N mod q = 0 (throws otherwise).
    static FragmentationParams derive(const EegStream& stream, std::size_t q);
};

// Non-overlapping partition ordered by (t ascending, k ascending);
// concatenating fragment columns reproduces the stream exactly.
std::vector<Fragment> fragment_stream(const EegStream& stream, const FragmentationParams& params);

// Local normalization: divide every entry by the maximum absolute entry.
// All-zero fragments (max-abs below 1e-12) pass through unchanged; the
// operation is exactly idempotent.
Fragment normalize_fragment(const Fragment& frag);

// One-sided amplitude spectrum per channel via a cached real-DFT plan.
// Rejects fragments already in the frequency domain.
Fragment to_frequency_domain(const Fragment& frag);

// Spectrum width for a time window of q samples.
inline std::size_t spectrum_bins(std::size_t q) { return q / 2 + 1; }

} // namespace eegclf
