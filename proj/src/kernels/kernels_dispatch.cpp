#include "tgf/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <mutex>

namespace tgf::kernels {

// Defined in kernels_avx2.cpp (nullptr when the build lacks AVX2 support).
const Table* avx2_table_impl();

const Table* avx2_table() {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
    if (!__builtin_cpu_supports("avx2")) return nullptr;
#endif
    return avx2_table_impl();
}

namespace {

const Table* resolve() {
    const char* env = std::getenv("TGF_CDA_SIMD");
    if (env != nullptr) {
        if (std::strcmp(env, "scalar") == 0) return &scalar_table();
        if (std::strcmp(env, "avx2") == 0) {
            const Table* t = avx2_table();
            if (t != nullptr) return t;
            // Requested variant unavailable: fall through to auto selection.
        }
    }
    const Table* t = avx2_table();
    return (t != nullptr) ? t : &scalar_table();
}

}  // namespace

const Table& active() {
    static const Table* selected = resolve();
    return *selected;
}

}  // namespace tgf::kernels
