#include <atomic>
#include <cmath>

#include "cstool/dsp.hpp"

namespace cst::dsp {
namespace {

const Kernels* pick_default() {
#if defined(CSTOOL_HAVE_AVX2)
    if (__builtin_cpu_supports("avx2")) return &avx2_kernels();
#endif
    return &scalar_kernels();
}

std::atomic<const Kernels*> g_active{nullptr};

const Kernels* active_ptr() {
    const Kernels* k = g_active.load(std::memory_order_acquire);
    if (!k) {
        k = pick_default();
        g_active.store(k, std::memory_order_release);
    }
    return k;
}

}  // namespace

const Kernels& active_kernels() { return *active_ptr(); }

bool select_kernels(std::string_view name) {
    if (name == "scalar") {
        g_active.store(&scalar_kernels(), std::memory_order_release);
        return true;
    }
#if defined(CSTOOL_HAVE_AVX2)
    if (name == "avx2" && __builtin_cpu_supports("avx2")) {
        g_active.store(&avx2_kernels(), std::memory_order_release);
        return true;
    }
#endif
    if (name == "auto") {
        g_active.store(pick_default(), std::memory_order_release);
        return true;
    }
    return false;
}

double sum_squares(std::span<const float> x) { return active_ptr()->sum_squares(x); }
float peak_abs(std::span<const float> x) { return active_ptr()->peak_abs(x); }
void scale(std::span<float> x, float factor) { active_ptr()->scale(x, factor); }
void float_to_pcm16(std::span<const float> in, std::span<int16_t> out) {
    active_ptr()->float_to_pcm16(in, out);
}
void pcm16_to_float(std::span<const int16_t> in, std::span<float> out) {
    active_ptr()->pcm16_to_float(in, out);
}

double rms(std::span<const float> x) {
    if (x.empty()) return 0.0;
    return std::sqrt(sum_squares(x) / static_cast<double>(x.size()));
}

}  // namespace cst::dsp
