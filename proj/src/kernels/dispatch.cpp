// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <string_view>

#include "oam/kernels.hpp"

namespace oam::kernels {

#if defined(OAM_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

const KernelTable* avx2_kernels()
{
#if defined(OAM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? &avx2_table() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active()
{
    static const KernelTable& chosen = [] () -> const KernelTable& {
        const char* env = std::getenv("OAM_KERNELS");
        if (env != nullptr && std::string_view(env) == "scalar") return scalar_kernels();
        if (const KernelTable* t = avx2_kernels()) return *t;
        return scalar_kernels();
    }();
    return chosen;
}

}  // namespace oam::kernels
