#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace shimsign {

/// Shortest round-trip decimal form of `v`; "nan" / "inf" / "-inf" for
/// non-finite values. Locale independent, so output is byte-stable.
inline std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc{}) {
        return "nan";
    }
    return std::string(buf, res.ptr);
}

}  // namespace shimsign
