#include "ewd/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace ewd::kernels {

const KernelTable& active_kernels() {
    static const KernelTable* selected = [] {
        const char* env = std::getenv("EWD_KERNELS");
        const std::string_view want = env ? env : "";
        if (want == "scalar") return &scalar_kernels();
        const KernelTable* avx2 = avx2_kernels();
        if (avx2 && (want.empty() || want == "avx2")) return avx2;
        return &scalar_kernels();
    }();
    return *selected;
}

}  // namespace ewd::kernels
