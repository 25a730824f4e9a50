#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "cstool/corpus.hpp"
#include "cstool/errors.hpp"
#include "cstool/rng.hpp"

using namespace cst;
namespace fs = std::filesystem;

namespace {

fs::path test_dir() {
    fs::path d = fs::temp_directory_path() / "cstool_corpus_test";
    fs::create_directories(d);
    return d;
}

Waveform sine(double freq, double seconds, float amp = 0.5f, uint32_t rate = 16000) {
    Waveform w;
    w.sample_rate = rate;
    w.samples.resize(static_cast<size_t>(seconds * rate));
    for (size_t i = 0; i < w.samples.size(); ++i)
        w.samples[i] = amp * static_cast<float>(std::sin(2.0 * M_PI * freq * i / rate));
    return w;
}

}  // namespace

TEST_CASE("manifest load: valid file keeps order and extras") {
    fs::path p = test_dir() / "ok.jsonl";
    {
        std::ofstream out(p);
        out << R"({"audio_filepath":"a.wav","duration":1.5,"text":"hello","lang":"en"})" << "\n";
        out << R"({"audio_filepath":"b.wav","duration":2.0,"text":"hola","lang":"es","speaker":"x"})" << "\n";
        out << R"({"audio_filepath":"c.wav","duration":0.5,"text":"hi","lang":"en"})" << "\n";
    }
    auto records = load_manifest(p);
    REQUIRE(records.size() == 3);
    CHECK(records[0].audio_filepath == "a.wav");
    CHECK(records[1].extra["speaker"] == "x");
    CHECK(records[2].duration == 0.5);

    // round trip preserves fields including extras
    fs::path q = test_dir() / "ok2.jsonl";
    save_manifest(records, q);
    CHECK(load_manifest(q) == records);
}

TEST_CASE("manifest load: error reporting with line numbers") {
    fs::path p = test_dir() / "bad.jsonl";
    auto write = [&](const std::string& body) {
        std::ofstream out(p);
        out << body << "\n";
    };

    write(R"({"audio_filepath":"a.wav","text":"x","lang":"en"})");
    CHECK_THROWS_AS(load_manifest(p), missing_field);

    write(R"({"audio_filepath":"a.wav","duration":-1,"text":"x","lang":"en"})");
    CHECK_THROWS_WITH_AS(load_manifest(p), "line 1: nonpositive duration", malformed_line);

    write("{oops");
    CHECK_THROWS_AS(load_manifest(p), malformed_line);

    CHECK_THROWS_AS(load_manifest(test_dir() / "missing.jsonl"), io_error);
}

TEST_CASE("wav write/read round trip within quantization bound") {
    fs::path p = test_dir() / "sine.wav";
    Waveform w = sine(440.0, 1.0, 1.0f);
    write_wav(p, w);
    Waveform r = read_wav(p);
    REQUIRE(r.samples.size() == w.samples.size());
    CHECK(r.sample_rate == 16000);
    float max_err = 0.0f;
    for (size_t i = 0; i < w.samples.size(); ++i)
        max_err = std::max(max_err, std::fabs(w.samples[i] - r.samples[i]));
    CHECK(max_err <= 1.0f / 32768.0f);
}

TEST_CASE("wav round trip property over random waveforms") {
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        Waveform w;
        w.sample_rate = 16000;
        w.samples.resize(1 + rng.next_below(5000));
        for (float& s : w.samples) s = static_cast<float>(2.0 * rng.next_double() - 1.0);
        fs::path p = test_dir() / "rand.wav";
        write_wav(p, w);
        Waveform r = read_wav(p);
        REQUIRE(r.samples.size() == w.samples.size());
        for (size_t i = 0; i < w.samples.size(); ++i)
            CHECK(std::fabs(w.samples[i] - r.samples[i]) <= 1.0f / 32768.0f);
    }
}

TEST_CASE("silence is all zeros") {
    fs::path p = test_dir() / "silence.wav";
    Waveform w;
    w.samples.assign(16000, 0.0f);
    write_wav(p, w);
    Waveform r = read_wav(p);
    REQUIRE(r.samples.size() == 16000);
    for (float s : r.samples) CHECK(s == 0.0f);
}

TEST_CASE("unsupported wav formats are rejected with detail") {
    fs::path p = test_dir() / "stereo.wav";
    // hand-build a stereo header
    {
        std::ofstream out(p, std::ios::binary);
        auto u32 = [&](uint32_t v) { out.write(reinterpret_cast<char*>(&v), 4); };
        auto u16 = [&](uint16_t v) { out.write(reinterpret_cast<char*>(&v), 2); };
        out.write("RIFF", 4); u32(36); out.write("WAVE", 4);
        out.write("fmt ", 4); u32(16); u16(1); u16(2); u32(16000); u32(64000); u16(4); u16(16);
        out.write("data", 4); u32(0);
    }
    CHECK_THROWS_WITH_AS(read_wav(p), "unsupported audio format: channels=2", unsupported_format);

    fs::path q = test_dir() / "notwav.wav";
    { std::ofstream out(q); out << "hello"; }
    CHECK_THROWS_AS(read_wav(q), unsupported_format);
}

TEST_CASE("read_wav_info matches payload") {
    fs::path p = test_dir() / "info.wav";
    write_wav(p, sine(100.0, 2.5));
    WavInfo info = read_wav_info(p);
    CHECK(info.sample_rate == 16000);
    CHECK(info.duration == doctest::Approx(2.5).epsilon(1e-6));
}

TEST_CASE("filter_pool keeps the duration window and counts drops") {
    fs::path wav = test_dir() / "pool.wav";
    write_wav(wav, sine(200.0, 2.0));

    auto rec = [&](double dur) {
        UtteranceRecord r;
        r.audio_filepath = wav.string();
        r.duration = dur;
        r.text = "x";
        r.lang = "en";
        return r;
    };
    std::vector<UtteranceRecord> records = {rec(25.0), rec(2.0), rec(0.5)};
    records[2].audio_filepath = (test_dir() / "nope.wav").string();

    FilterStats stats;
    auto kept = filter_pool(records, 1.0, 19.0, 16000, &stats);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].duration == 2.0);
    CHECK(stats.dropped.at("exceeds max generated sample duration") == 1);
    CHECK(stats.dropped.at("below min segment duration") == 1);
    CHECK(stats.kept == 1);

    CHECK(filter_pool({}, 1.0, 19.0, 16000).empty());
    CHECK_THROWS_AS(filter_pool({}, 5.0, 1.0, 16000), validation_error);
}
