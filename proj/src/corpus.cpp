#include "cstool/corpus.hpp"

#include <cstring>
#include <fstream>

#include "cstool/dsp.hpp"
#include "cstool/errors.hpp"

namespace cst {

std::vector<UtteranceRecord> load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open manifest: " + path.string());

    std::vector<UtteranceRecord> records;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw malformed_line(line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!j.is_object()) throw malformed_line(line_no, "not a JSON object");
        for (const char* field : {"audio_filepath", "duration", "text", "lang"})
            if (!j.contains(field)) throw missing_field(line_no, field);

        UtteranceRecord rec;
        try {
            rec.audio_filepath = j["audio_filepath"].get<std::string>();
            rec.duration = j["duration"].get<double>();
            rec.text = j["text"].get<std::string>();
            rec.lang = j["lang"].get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw malformed_line(line_no, std::string("bad field type: ") + e.what());
        }
        if (!(rec.duration > 0.0)) throw malformed_line(line_no, "nonpositive duration");
        if (rec.text.empty()) throw malformed_line(line_no, "empty text");
        if (rec.lang.empty()) throw malformed_line(line_no, "empty lang");

        j.erase("audio_filepath");
        j.erase("duration");
        j.erase("text");
        j.erase("lang");
        rec.extra = std::move(j);
        records.push_back(std::move(rec));
    }
    return records;
}

void save_manifest(const std::vector<UtteranceRecord>& records,
                   const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open for writing: " + path.string());
    for (const UtteranceRecord& rec : records) {
        nlohmann::ordered_json j;
        j["audio_filepath"] = rec.audio_filepath;
        j["duration"] = rec.duration;
        j["text"] = rec.text;
        j["lang"] = rec.lang;
        for (const auto& [k, v] : rec.extra.items()) j[k] = v;
        out << j.dump() << '\n';
    }
    if (!out) throw io_error("write failed: " + path.string());
}

namespace {

struct WavHeader {
    uint32_t sample_rate = 0;
    uint16_t channels = 0;
    uint16_t bits_per_sample = 0;
    uint16_t audio_format = 0;
    uint64_t data_offset = 0;
    uint64_t data_size = 0;
};

uint32_t rd_u32(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
uint16_t rd_u16(const unsigned char* p) {
    return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

WavHeader parse_wav_header(std::ifstream& in, const std::string& name) {
    unsigned char riff[12];
    if (!in.read(reinterpret_cast<char*>(riff), 12))
        throw unsupported_format(name + ": truncated header");
    if (std::memcmp(riff, "RIFF", 4) != 0 || std::memcmp(riff + 8, "WAVE", 4) != 0)
        throw unsupported_format(name + ": not a RIFF/WAVE file");

    WavHeader h;
    bool have_fmt = false;
    while (in) {
        unsigned char chunk[8];
        if (!in.read(reinterpret_cast<char*>(chunk), 8)) break;
        uint32_t size = rd_u32(chunk + 4);
        if (std::memcmp(chunk, "fmt ", 4) == 0) {
            unsigned char fmt[16];
            if (size < 16 || !in.read(reinterpret_cast<char*>(fmt), 16))
                throw unsupported_format(name + ": bad fmt chunk");
            h.audio_format = rd_u16(fmt + 0);
            h.channels = rd_u16(fmt + 2);
            h.sample_rate = rd_u32(fmt + 4);
            h.bits_per_sample = rd_u16(fmt + 14);
            in.seekg(size - 16 + (size & 1), std::ios::cur);
            have_fmt = true;
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            h.data_offset = static_cast<uint64_t>(in.tellg());
            h.data_size = size;
            break;
        } else {
            in.seekg(size + (size & 1), std::ios::cur);
        }
    }
    if (!have_fmt || h.data_offset == 0)
        throw unsupported_format(name + ": missing fmt or data chunk");
    if (h.audio_format != 1) throw unsupported_format("codec=" + std::to_string(h.audio_format));
    if (h.channels != 1) throw unsupported_format("channels=" + std::to_string(h.channels));
    if (h.bits_per_sample != 16)
        throw unsupported_format("bit-depth=" + std::to_string(h.bits_per_sample));
    return h;
}

void wr_u32(std::ofstream& out, uint32_t v) {
    char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
                 static_cast<char>(v >> 24)};
    out.write(b, 4);
}
void wr_u16(std::ofstream& out, uint16_t v) {
    char b[2] = {static_cast<char>(v), static_cast<char>(v >> 8)};
    out.write(b, 2);
}

}  // namespace

Waveform read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open: " + path.string());
    WavHeader h = parse_wav_header(in, path.string());

    uint64_t frames = h.data_size / 2;
    std::vector<int16_t> pcm(frames);
    if (!in.read(reinterpret_cast<char*>(pcm.data()), static_cast<std::streamsize>(frames * 2)))
        throw io_error("truncated data chunk: " + path.string());

    Waveform w;
    w.sample_rate = h.sample_rate;
    w.samples.resize(frames);
    dsp::pcm16_to_float(pcm, w.samples);
    return w;
}

void write_wav(const std::filesystem::path& path, const Waveform& w) {
    std::vector<int16_t> pcm(w.samples.size());
    dsp::float_to_pcm16(w.samples, pcm);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path.string());
    uint32_t data_size = static_cast<uint32_t>(pcm.size() * 2);
    out.write("RIFF", 4);
    wr_u32(out, 36 + data_size);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    wr_u32(out, 16);
    wr_u16(out, 1);  // PCM
    wr_u16(out, 1);  // mono
    wr_u32(out, w.sample_rate);
    wr_u32(out, w.sample_rate * 2);  // byte rate
    wr_u16(out, 2);                  // block align
    wr_u16(out, 16);                 // bits per sample
    out.write("data", 4);
    wr_u32(out, data_size);
    out.write(reinterpret_cast<const char*>(pcm.data()), data_size);
    if (!out) throw io_error("write failed: " + path.string());
}

WavInfo read_wav_info(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open: " + path.string());
    WavHeader h = parse_wav_header(in, path.string());
    uint64_t frames = h.data_size / 2;
    return {h.sample_rate, frames, static_cast<double>(frames) / h.sample_rate};
}

std::vector<UtteranceRecord> filter_pool(const std::vector<UtteranceRecord>& records,
                                         double min_seg_dur, double max_seg_dur,
                                         uint32_t sample_rate, FilterStats* stats) {
    if (min_seg_dur > max_seg_dur)
        throw validation_error("min_seg_dur exceeds max_seg_dur");
    FilterStats local;
    FilterStats& s = stats ? *stats : local;

    std::vector<UtteranceRecord> kept;
    for (const UtteranceRecord& rec : records) {
        if (rec.duration < min_seg_dur) {
            ++s.dropped["below min segment duration"];
            continue;
        }
        if (rec.duration > max_seg_dur) {
            ++s.dropped["exceeds max generated sample duration"];
            continue;
        }
        try {
            WavInfo info = read_wav_info(rec.audio_filepath);
            if (info.sample_rate != sample_rate) {
                ++s.dropped["sample rate mismatch"];
                continue;
            }
        } catch (const std::runtime_error&) {
            ++s.dropped["unreadable audio header"];
            continue;
        }
        ++s.kept;
        kept.push_back(rec);
    }
    return kept;
}

}  // namespace cst
