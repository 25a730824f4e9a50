#include <immintrin.h>

#include <cmath>

#include "cstool/dsp.hpp"

namespace cst::dsp {
namespace {

double sum_squares_avx2(std::span<const float> x) {
    const float* p = x.data();
    size_t n = x.size();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 v = _mm256_loadu_ps(p + i);
        __m256d lo = _mm256_cvtps_pd(_mm256_castps256_ps128(v));
        __m256d hi = _mm256_cvtps_pd(_mm256_extractf128_ps(v, 1));
        acc0 = _mm256_fmadd_pd(lo, lo, acc0);
        acc1 = _mm256_fmadd_pd(hi, hi, acc1);
    }
    __m256d acc = _mm256_add_pd(acc0, acc1);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double res = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; i < n; ++i) res += static_cast<double>(p[i]) * static_cast<double>(p[i]);
    return res;
}

float peak_abs_avx2(std::span<const float> x) {
    const float* p = x.data();
    size_t n = x.size();
    const __m256 sign_mask = _mm256_set1_ps(-0.0f);
    __m256 peak = _mm256_setzero_ps();
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 v = _mm256_andnot_ps(sign_mask, _mm256_loadu_ps(p + i));
        peak = _mm256_max_ps(peak, v);
    }
    alignas(32) float lanes[8];
    _mm256_store_ps(lanes, peak);
    float res = 0.0f;
    for (float l : lanes) res = std::max(res, l);
    for (; i < n; ++i) res = std::max(res, std::fabs(p[i]));
    return res;
}

void scale_avx2(std::span<float> x, float factor) {
    float* p = x.data();
    size_t n = x.size();
    const __m256 f = _mm256_set1_ps(factor);
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_ps(p + i, _mm256_mul_ps(_mm256_loadu_ps(p + i), f));
    }
    for (; i < n; ++i) p[i] *= factor;
}

void float_to_pcm16_avx2(std::span<const float> in, std::span<int16_t> out) {
    const float* p = in.data();
    int16_t* q = out.data();
    size_t n = in.size();
    const __m256 gain = _mm256_set1_ps(32768.0f);
    const __m256 lo_clip = _mm256_set1_ps(-32768.0f);
    const __m256 hi_clip = _mm256_set1_ps(32767.0f);
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 v = _mm256_mul_ps(_mm256_loadu_ps(p + i), gain);
        v = _mm256_min_ps(_mm256_max_ps(v, lo_clip), hi_clip);
        // cvtps_epi32 rounds to nearest even under the default MXCSR mode.
        __m256i w = _mm256_cvtps_epi32(v);
        __m128i packed =
            _mm_packs_epi32(_mm256_castsi256_si128(w), _mm256_extracti128_si256(w, 1));
        _mm_storeu_si128(reinterpret_cast<__m128i*>(q + i), packed);
    }
    for (; i < n; ++i) {
        float scaled = nearbyintf(p[i] * 32768.0f);
        if (scaled > 32767.0f) scaled = 32767.0f;
        if (scaled < -32768.0f) scaled = -32768.0f;
        q[i] = static_cast<int16_t>(scaled);
    }
}

void pcm16_to_float_avx2(std::span<const int16_t> in, std::span<float> out) {
    const int16_t* p = in.data();
    float* q = out.data();
    size_t n = in.size();
    const __m256 inv = _mm256_set1_ps(1.0f / 32768.0f);
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m128i w16 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(p + i));
        __m256i w32 = _mm256_cvtepi16_epi32(w16);
        // division by the power of two 32768 is exact, so multiplying by the
        // exact reciprocal matches the scalar division bit for bit
        _mm256_storeu_ps(q + i, _mm256_mul_ps(_mm256_cvtepi32_ps(w32), inv));
    }
    for (; i < n; ++i) q[i] = static_cast<float>(p[i]) / 32768.0f;
}

}  // namespace

const Kernels& avx2_kernels() {
    static const Kernels k{sum_squares_avx2, peak_abs_avx2, scale_avx2, float_to_pcm16_avx2,
                           pcm16_to_float_avx2, "avx2"};
    return k;
}

}  // namespace cst::dsp
