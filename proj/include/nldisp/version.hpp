#pragma once

#include <string>

namespace nldisp {

inline constexpr const char* kVersion = "0.1.0";

inline std::string compiler_id() {
#if defined(__clang__)
    return "clang-" __clang_version__;
#elif defined(__GNUC__)
    return "gcc-" + std::to_string(__GNUC__) + "." + std::to_string(__GNUC_MINOR__) + "." +
           std::to_string(__GNUC_PATCHLEVEL__);
#else
    return "unknown";
#endif
}

}  // namespace nldisp
