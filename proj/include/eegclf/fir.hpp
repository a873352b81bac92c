#pragma once

#include "eegclf/bands.hpp"
#include "eegclf/stream.hpp"

#include <vector>

namespace eegclf {

struct FilterDesignError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Measured response of a designed filter, evaluated from the taps.
// The quality gate is fixed: passband ripple within +/-1 dB and at least
// 30 dB attenuation at low/1.5 and high*1.5 (clamped below Nyquist).
struct FirDesignReport {
    double passband_min_db = 0.0;
    double passband_max_db = 0.0;
    double atten_low_edge_db = 0.0;  // at low/1.5, +inf-like large when band starts at 0
    double atten_high_edge_db = 0.0; // at high*1.5
    double stopband_worst_db = 0.0;  // worst level in the weighted stopbands
    double low_measure_hz = 0.0;
    double high_measure_hz = 0.0;
    bool meets_spec = false;

    std::string summary() const;
};

// Linear-phase (type I) band-pass FIR; taps are symmetric about the midpoint.
struct FirFilter {
    std::vector<double> taps; // odd length
    BandSpec band;
    double design_rate = 0.0; // K, Hz
    FirDesignReport report;

    std::size_t order() const { return taps.size() - 1; }
    std::size_t group_delay() const { return (taps.size() - 1) / 2; }
    // |H| at frequency f in Hz, from the symmetric cosine form
    double magnitude_at(double freq_hz) const;
};

// Default tap budget: K/2 rounded up to odd.
std::size_t default_fir_taps(double sample_rate);

// Weighted least-squares fit to the ideal band response over
// stopband / transition / passband segments. Throws FilterDesignError when
// the measured response misses the quality gate (band too narrow for the
// tap budget); design_band_fir_unchecked returns the filter regardless so
// callers can inspect the report.
FirFilter design_band_fir(const BandSpec& band, double sample_rate, std::size_t taps);
FirFilter design_band_fir_unchecked(const BandSpec& band, double sample_rate, std::size_t taps);

// Per-channel convolution with group-delay compensation: output aligns with
// the input and has identical dimensions. Edges are zero-padded.
EegStream apply_fir(const EegStream& stream, const FirFilter& filter);

} // namespace eegclf
