#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cstool/dsp.hpp"
#include "cstool/rng.hpp"

using namespace cst;

namespace {

std::vector<float> random_buffer(Rng& rng, size_t n, float amp = 1.5f) {
    std::vector<float> buf(n);
    for (float& v : buf) v = amp * (2.0f * static_cast<float>(rng.next_double()) - 1.0f);
    return buf;
}

}  // namespace

TEST_CASE("scalar kernels basics") {
    const auto& k = dsp::scalar_kernels();
    std::vector<float> x = {0.5f, -0.5f, 0.5f, -0.5f};
    CHECK(k.sum_squares(x) == doctest::Approx(1.0));
    CHECK(k.peak_abs(x) == 0.5f);

    k.scale(x, 2.0f);
    CHECK(x[0] == 1.0f);
    CHECK(x[1] == -1.0f);

    std::vector<float> over = {2.0f, -2.0f, 0.25f};
    std::vector<int16_t> pcm(3);
    k.float_to_pcm16(over, pcm);
    CHECK(pcm[0] == 32767);   // clamped
    CHECK(pcm[1] == -32768);  // clamped
    CHECK(pcm[2] == 8192);

    std::vector<float> back(3);
    k.pcm16_to_float(pcm, back);
    CHECK(back[2] == 0.25f);
}

TEST_CASE("simd variants match scalar reference") {
    if (!dsp::select_kernels("avx2")) {
        MESSAGE("avx2 unavailable, skipping equivalence check");
        return;
    }
    const auto& simd = dsp::active_kernels();
    const auto& ref = dsp::scalar_kernels();
    REQUIRE(std::string(simd.name) == "avx2");

    Rng rng(0xD5Fu);
    // Odd lengths exercise the tail loops.
    for (size_t n : {0u, 1u, 7u, 8u, 9u, 64u, 1000u, 16001u}) {
        std::vector<float> buf = random_buffer(rng, n);

        CHECK(simd.sum_squares(buf) ==
              doctest::Approx(ref.sum_squares(buf)).epsilon(1e-12));
        CHECK(simd.peak_abs(buf) == ref.peak_abs(buf));

        std::vector<float> a = buf, b = buf;
        simd.scale(a, 0.3717f);
        ref.scale(b, 0.3717f);
        CHECK(a == b);

        std::vector<int16_t> pa(n), pb(n);
        simd.float_to_pcm16(buf, pa);
        ref.float_to_pcm16(buf, pb);
        CHECK(pa == pb);  // bit-exact: same rounding mode on both paths

        std::vector<float> fa(n), fb(n);
        simd.pcm16_to_float(pa, fa);
        ref.pcm16_to_float(pb, fb);
        CHECK(fa == fb);
    }
    dsp::select_kernels("auto");
}

TEST_CASE("rms of a sine wave") {
    std::vector<float> sine(16000);
    for (size_t i = 0; i < sine.size(); ++i)
        sine[i] = 0.1f * std::sin(2.0 * M_PI * 440.0 * i / 16000.0);
    CHECK(dsp::rms(sine) == doctest::Approx(0.1 / std::sqrt(2.0)).epsilon(1e-4));
    CHECK(dsp::rms(std::vector<float>{}) == 0.0);
}
