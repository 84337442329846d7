#include "bifilm/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "bifilm/errors.hpp"

namespace bifilm::kernels {
namespace {

std::atomic<const Ops*> g_active{nullptr};

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

bool avx2_lane_compiled() noexcept {
    // The AVX2 TU degrades to the scalar table when built without -mavx2.
    return &avx2_ops() != &scalar_ops();
}

const Ops* detect() {
    const char* env = std::getenv("BIFILM_SIMD");
    std::string_view want = env ? std::string_view{env} : std::string_view{"auto"};
    if (want == "scalar") return &scalar_ops();
    if (want == "avx2") {
        if (!avx2_available()) throw ConfigError("BIFILM_SIMD=avx2 but AVX2 is unavailable");
        return &avx2_ops();
    }
    if (want != "auto") throw ConfigError("BIFILM_SIMD must be scalar, avx2 or auto");
    return avx2_available() ? &avx2_ops() : &scalar_ops();
}

}  // namespace

bool avx2_available() noexcept { return cpu_has_avx2() && avx2_lane_compiled(); }

const Ops& active() {
    const Ops* ops = g_active.load(std::memory_order_acquire);
    if (!ops) {
        ops = detect();
        g_active.store(ops, std::memory_order_release);
    }
    return *ops;
}

Lane active_lane() noexcept { return &active() == &scalar_ops() ? Lane::scalar : Lane::avx2; }

void force_lane(Lane lane) {
    if (lane == Lane::avx2 && !avx2_available())
        throw ConfigError("AVX2 kernel lane requested but unavailable on this CPU/build");
    g_active.store(lane == Lane::scalar ? &scalar_ops() : &avx2_ops(),
                   std::memory_order_release);
}

void reset_lane() noexcept { g_active.store(nullptr, std::memory_order_release); }

}  // namespace bifilm::kernels
