// Locale-independent number formatting for reproducible text outputs.
#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace backflow {

// Scientific notation with 17 significant digits (round-trip exact for f64).
inline std::string format_g17(double value) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value,
                                   std::chars_format::scientific, 16);
    (void)ec;
    return std::string(buf, ptr);
}

inline std::string format_fixed(double value, int precision) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value,
                                   std::chars_format::fixed, precision);
    (void)ec;
    return std::string(buf, ptr);
}

// Shortest general form with the given significant digits (reports, SVG).
inline std::string format_general(double value, int significant = 6) {
    char buf[48];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value,
                                   std::chars_format::general, significant);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace backflow
