#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace cst::dsp {

// Audio sample kernels. Scalar reference implementations live in
// dsp_scalar.cpp; AVX2 variants in dsp_avx2.cpp. The dispatch table is
// selected once at startup from CPU features and can be forced to the scalar
// path for equivalence testing.

struct Kernels {
    // Sum of x[i]^2, accumulated in double.
    double (*sum_squares)(std::span<const float>);
    // max |x[i]|
    float (*peak_abs)(std::span<const float>);
    // x[i] *= factor
    void (*scale)(std::span<float>, float factor);
    // round-to-nearest-even of x*32768, clamped to int16 range
    void (*float_to_pcm16)(std::span<const float>, std::span<int16_t>);
    // x / 32768
    void (*pcm16_to_float)(std::span<const int16_t>, std::span<float>);
    const char* name;
};

const Kernels& scalar_kernels();
#if defined(CSTOOL_HAVE_AVX2)
const Kernels& avx2_kernels();
#endif

// Active table (AVX2 when the CPU supports it, scalar otherwise).
const Kernels& active_kernels();

// Overrides the active table by name ("scalar" or "avx2"); returns false if
// the named variant is unavailable. Intended for tests and the CLI flag.
bool select_kernels(std::string_view name);

// Convenience wrappers over the active table.
double sum_squares(std::span<const float> x);
float peak_abs(std::span<const float> x);
void scale(std::span<float> x, float factor);
void float_to_pcm16(std::span<const float> in, std::span<int16_t> out);
void pcm16_to_float(std::span<const int16_t> in, std::span<float> out);

double rms(std::span<const float> x);

}  // namespace cst::dsp
