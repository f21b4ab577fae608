#ifndef KBR_VERSION_HPP
#define KBR_VERSION_HPP

namespace kbr {
inline constexpr const char* kVersion = "0.1.0";
}

#endif
