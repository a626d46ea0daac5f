#include <cstdlib>
#include <string_view>

#include "perfstop/kernels.hpp"

namespace perfstop::kernels {

#if defined(PERFSTOP_HAVE_AVX2)
namespace avx2 {
extern const KernelTable table;
}
#endif
#if defined(PERFSTOP_HAVE_NEON)
namespace neon {
extern const KernelTable table;
}
#endif

std::string_view backend_name(Backend b) noexcept {
    switch (b) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
        case Backend::Neon: return "neon";
    }
    return "unknown";
}

const KernelTable* table_for(Backend b) noexcept {
    switch (b) {
        case Backend::Scalar: return &scalar::table;
        case Backend::Avx2:
#if defined(PERFSTOP_HAVE_AVX2)
            if (__builtin_cpu_supports("avx2")) return &avx2::table;
#endif
            return nullptr;
        case Backend::Neon:
#if defined(PERFSTOP_HAVE_NEON)
            return &neon::table;
#else
            return nullptr;
#endif
    }
    return nullptr;
}

std::vector<Backend> available_backends() {
    std::vector<Backend> out;
    for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
        if (table_for(b) != nullptr) out.push_back(b);
    }
    return out;
}

namespace {

const KernelTable& select() noexcept {
    if (const char* env = std::getenv("PERFSTOP_KERNELS")) {
        const std::string_view want(env);
        for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
            if (want == backend_name(b)) {
                if (const KernelTable* t = table_for(b)) return *t;
            }
        }
    }
    for (Backend b : {Backend::Avx2, Backend::Neon}) {
        if (const KernelTable* t = table_for(b)) return *t;
    }
    return scalar::table;
}

}  // namespace

const KernelTable& active() noexcept {
    static const KernelTable& table = select();
    return table;
}

}  // namespace perfstop::kernels
