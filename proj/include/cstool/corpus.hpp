#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace cst {

// One manifest row. Fields beyond the four required ones are preserved
// opaquely in `extra` and written back on round trips.
struct UtteranceRecord {
    std::string audio_filepath;
    double duration = 0.0;
    std::string text;
    std::string lang;
    nlohmann::json extra = nlohmann::json::object();

    bool operator==(const UtteranceRecord& o) const {
        return audio_filepath == o.audio_filepath && duration == o.duration && text == o.text &&
               lang == o.lang && extra == o.extra;
    }
};

struct Waveform {
    std::vector<float> samples;
    uint32_t sample_rate = 16000;

    double duration() const {
        return static_cast<double>(samples.size()) / sample_rate;
    }
};

std::vector<UtteranceRecord> load_manifest(const std::filesystem::path& path);
void save_manifest(const std::vector<UtteranceRecord>& records,
                   const std::filesystem::path& path);

// PCM 16-bit mono RIFF/WAVE only. Anything else is unsupported_format.
Waveform read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const Waveform& w);

// Header-only probe: sample rate and duration without decoding payload.
struct WavInfo {
    uint32_t sample_rate;
    uint64_t frames;
    double duration;
};
WavInfo read_wav_info(const std::filesystem::path& path);

struct FilterStats {
    std::map<std::string, uint64_t> dropped;  // reason -> count
    uint64_t kept = 0;
};

// Keeps records with min_seg_dur <= duration <= max_seg_dur whose audio header
// parses at the expected sample rate. Drops are counted per reason, never fatal.
std::vector<UtteranceRecord> filter_pool(const std::vector<UtteranceRecord>& records,
                                         double min_seg_dur, double max_seg_dur,
                                         uint32_t sample_rate, FilterStats* stats = nullptr);

}  // namespace cst
