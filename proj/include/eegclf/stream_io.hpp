#pragma once

#include "eegclf/stream.hpp"

#include <filesystem>

namespace eegclf {

// On-disk stream format:
//   <name>.eeg        raw little-endian f32, channel-major
//   <name>.meta.json  subject_id, class_label, channels, sample_rate,
//                     samples, dtype ("f32le"), layout ("channel-major");
//                     unknown keys ignored
// write_stream/read_stream round-trip payloads bit-exactly.

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// path may name either file of the pair or the bare stem.
EegStream read_stream(const std::filesystem::path& path);
void write_stream(const EegStream& stream, const std::filesystem::path& path);

// One CSV row per channel; metadata comes from the caller.
EegStream read_stream_csv(const std::filesystem::path& path, double sample_rate,
                          const std::string& subject_id, int class_label);

} // namespace eegclf
