#pragma once

namespace ggs {

#ifdef GGS_VERSION
inline constexpr const char* kVersion = GGS_VERSION;
#else
inline constexpr const char* kVersion = "unknown";
#endif

}  // namespace ggs
