#include <cmath>

#include "cstool/dsp.hpp"

namespace cst::dsp {
namespace {

double sum_squares_scalar(std::span<const float> x) {
    double acc = 0.0;
    for (float v : x) acc += static_cast<double>(v) * static_cast<double>(v);
    return acc;
}

float peak_abs_scalar(std::span<const float> x) {
    float peak = 0.0f;
    for (float v : x) peak = std::max(peak, std::fabs(v));
    return peak;
}

void scale_scalar(std::span<float> x, float factor) {
    for (float& v : x) v *= factor;
}

void float_to_pcm16_scalar(std::span<const float> in, std::span<int16_t> out) {
    for (size_t i = 0; i < in.size(); ++i) {
        // nearbyintf under the default FP environment rounds to nearest even,
        // matching the AVX2 _MM_FROUND_TO_NEAREST_INT path bit for bit.
        float scaled = nearbyintf(in[i] * 32768.0f);
        if (scaled > 32767.0f) scaled = 32767.0f;
        if (scaled < -32768.0f) scaled = -32768.0f;
        out[i] = static_cast<int16_t>(scaled);
    }
}

void pcm16_to_float_scalar(std::span<const int16_t> in, std::span<float> out) {
    for (size_t i = 0; i < in.size(); ++i) out[i] = static_cast<float>(in[i]) / 32768.0f;
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k{sum_squares_scalar, peak_abs_scalar, scale_scalar,
                           float_to_pcm16_scalar, pcm16_to_float_scalar, "scalar"};
    return k;
}

}  // namespace cst::dsp
