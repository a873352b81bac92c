#pragma once

#include "eegclf/stream.hpp"

#include <vector>

namespace eegclf {

struct Biquad {
    double b0 = 0, b1 = 0, b2 = 0; // numerator
    double a1 = 0, a2 = 0;         // denominator (a0 normalized to 1)

    double dc_gain() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }
    double pole_radius() const;
};

// Zero-phase broadband filter: 4th-order Butterworth high-pass at `low`
// cascaded with 4th-order Butterworth low-pass at `high` (24 dB/octave per
// skirt in one pass), realized as second-order sections and applied
// forward-backward. low == 0 degenerates to the low-pass alone.
struct ZeroPhaseFilter {
    std::vector<Biquad> sections;
    double design_rate = 0.0;
    double low = 0.0, high = 0.0;
    std::size_t one_pass_poles = 0;

    // documented edge-transient trim for analysis assertions: 3x filter order
    std::size_t recommended_trim() const { return 3 * one_pass_poles; }
};

ZeroPhaseFilter design_broadband(double low_hz, double high_hz, double sample_rate);

// Forward-backward filtering with odd extension and steady-state section
// initialization, per channel. Output dimensions equal input dimensions.
EegStream zero_phase_filter(const EegStream& stream, const ZeroPhaseFilter& filter);
std::vector<double> zero_phase_filter(const std::vector<double>& x, const ZeroPhaseFilter& filter);

// Convenience: design at the stream's rate and apply.
EegStream broadband_filter(const EegStream& stream, double low_hz, double high_hz);

} // namespace eegclf
