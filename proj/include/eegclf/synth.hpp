#pragma once

#include "eegclf/stream.hpp"

namespace eegclf {

// Deterministic synthetic EEG-like stream: per-band sinusoid components with
// random phase and slow amplitude modulation, over a 1/f^beta oscillator-bank
// background, mixed across channels so pairwise correlation tracks rho.
// Identical arguments always produce identical streams.
EegStream synth_stream(const ClassProfile& profile, std::size_t channels,
                       double sample_rate, double duration_s,
                       std::uint64_t seed, const std::string& subject_id = "");

} // namespace eegclf
