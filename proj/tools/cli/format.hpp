#pragma once

#include <charconv>
#include <string>

namespace hctree::cli {

/// Locale-independent rendering with 15 significant digits.
inline std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 15);
    return std::string(buf, res.ptr);
}

}  // namespace hctree::cli
