#include "eegclf/stream_io.hpp"

#include <json.hpp>

#include <bit>
#include <fstream>
#include <sstream>

namespace eegclf {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "stream payload format is little-endian");

namespace {

struct StreamPaths {
    fs::path payload;
    fs::path meta;
};

StreamPaths resolve(const fs::path& path) {
    fs::path stem = path;
    std::string name = path.filename().string();
    if (name.size() > 10 && name.ends_with(".meta.json"))
        stem = path.parent_path() / name.substr(0, name.size() - 10);
    else if (path.extension() == ".eeg")
        stem = path.parent_path() / path.stem();
    StreamPaths p;
    p.payload = stem;
    p.payload += ".eeg";
    p.meta = stem;
    p.meta += ".meta.json";
    return p;
}

int parse_class_label(const json& j) {
    if (j.is_number_integer()) return j.get<int>();
    if (j.is_string()) return ClassRegistry::id(j.get<std::string>());
    throw IoError("class_label must be an integer id or a registry name");
}

} // namespace

EegStream read_stream(const fs::path& path) {
    const StreamPaths p = resolve(path);
    std::ifstream meta_in(p.meta);
    if (!meta_in) throw IoError("cannot open sidecar " + p.meta.string());

    json meta;
    try {
        meta_in >> meta;
    } catch (const json::exception& e) {
        throw IoError("corrupt sidecar " + p.meta.string() + ": " + e.what());
    }

    EegStream s;
    try {
        s.subject_id = meta.at("subject_id").get<std::string>();
        s.class_label = parse_class_label(meta.at("class_label"));
        s.channels = meta.at("channels").get<std::size_t>();
        s.sample_rate = meta.at("sample_rate").get<double>();
        s.samples = meta.at("samples").get<std::size_t>();
        if (meta.at("dtype").get<std::string>() != "f32le")
            throw IoError("unsupported dtype in " + p.meta.string());
        if (meta.at("layout").get<std::string>() != "channel-major")
            throw IoError("unsupported layout in " + p.meta.string());
    } catch (const json::exception& e) {
        throw IoError("invalid sidecar " + p.meta.string() + ": " + e.what());
    }

    std::ifstream payload(p.payload, std::ios::binary);
    if (!payload) throw IoError("cannot open payload " + p.payload.string());
    payload.seekg(0, std::ios::end);
    const auto bytes = static_cast<std::size_t>(payload.tellg());
    payload.seekg(0);

    const std::size_t expected = s.channels * s.samples * sizeof(float);
    if (bytes != expected)
        throw IoError("dimension mismatch: sidecar " + p.meta.string() + " declares " +
                      std::to_string(s.channels) + "x" + std::to_string(s.samples) +
                      " samples (" + std::to_string(expected) + " bytes) but payload holds " +
                      std::to_string(bytes) + " bytes");

    s.data.resize(s.channels * s.samples);
    payload.read(reinterpret_cast<char*>(s.data.data()), static_cast<std::streamsize>(expected));
    if (!payload) throw IoError("short read from " + p.payload.string());

    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw IoError("rejected stream " + p.payload.string() + ": " + e.what());
    }
    return s;
}

void write_stream(const EegStream& stream, const fs::path& path) {
    try {
        stream.validate();
    } catch (const std::invalid_argument& e) {
        throw IoError(std::string("refusing to write invalid stream: ") + e.what());
    }
    const StreamPaths p = resolve(path);

    json meta = {
        {"subject_id", stream.subject_id},
        {"class_label", ClassRegistry::name(stream.class_label)},
        {"channels", stream.channels},
        {"sample_rate", stream.sample_rate},
        {"samples", stream.samples},
        {"dtype", "f32le"},
        {"layout", "channel-major"},
    };
    std::ofstream meta_out(p.meta);
    if (!meta_out) throw IoError("cannot write sidecar " + p.meta.string());
    meta_out << meta.dump(2) << "\n";
    if (!meta_out) throw IoError("failed writing sidecar " + p.meta.string());

    std::ofstream payload(p.payload, std::ios::binary | std::ios::trunc);
    if (!payload) throw IoError("cannot write payload " + p.payload.string());
    payload.write(reinterpret_cast<const char*>(stream.data.data()),
                  static_cast<std::streamsize>(stream.data.size() * sizeof(float)));
    if (!payload) throw IoError("failed writing payload " + p.payload.string());
}

EegStream read_stream_csv(const fs::path& path, double sample_rate,
                          const std::string& subject_id, int class_label) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open csv " + path.string());

    EegStream s;
    s.subject_id = subject_id;
    s.class_label = class_label;
    s.sample_rate = sample_rate;

    std::string line;
    std::size_t samples = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<float> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stof(cell));
            } catch (const std::exception&) {
                throw IoError("bad numeric cell '" + cell + "' in " + path.string());
            }
        }
        if (samples == 0) samples = row.size();
        else if (row.size() != samples)
            throw IoError("ragged csv rows in " + path.string());
        s.data.insert(s.data.end(), row.begin(), row.end());
        ++s.channels;
    }
    s.samples = samples;
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw IoError("rejected csv stream " + path.string() + ": " + e.what());
    }
    return s;
}

} // namespace eegclf
