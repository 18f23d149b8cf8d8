#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string_view>

#include "vecdraw/error.hpp"

namespace vecdraw::detail {

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

inline void skip_space(std::string_view s, std::size_t& pos) {
    while (pos < s.size() && is_space(s[pos])) ++pos;
}

/// Skips whitespace and at most one comma (the SVG comma-wsp production).
inline void skip_comma_space(std::string_view s, std::size_t& pos) {
    skip_space(s, pos);
    if (pos < s.size() && s[pos] == ',') {
        ++pos;
        skip_space(s, pos);
    }
}

/// Scans one SVG number at `pos` (sign, digits, optional fraction, optional
/// exponent). Returns nullopt without consuming anything when no number starts
/// there. Non-finite results throw NonFiniteNumber.
inline std::optional<double> scan_number(std::string_view s, std::size_t& pos) {
    const std::size_t start = pos;
    std::size_t i = pos;
    bool negative = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        negative = s[i] == '-';
        ++i;
    }
    const std::size_t mantissa = i;
    bool digits = false;
    while (i < s.size() && is_digit(s[i])) {
        ++i;
        digits = true;
    }
    if (i < s.size() && s[i] == '.') {
        std::size_t j = i + 1;
        bool frac = false;
        while (j < s.size() && is_digit(s[j])) {
            ++j;
            frac = true;
        }
        if (frac || digits) {
            i = j;
            digits = true;
        }
    }
    if (!digits) return std::nullopt;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        if (j < s.size() && is_digit(s[j])) {
            while (j < s.size() && is_digit(s[j])) ++j;
            i = j;
        }
    }
    double value = 0.0;
    const char* first = s.data() + mantissa;
    const char* last = s.data() + i;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec == std::errc::result_out_of_range || !std::isfinite(value)) {
        throw Error(ErrorCode::NonFiniteNumber, std::string(s.substr(start, i - start)), start);
    }
    if (ec != std::errc{} || ptr != last) {
        // from_chars rejects forms like "5." that SVG allows; retry without the dot.
        std::string_view trimmed(first, static_cast<std::size_t>(last - first));
        if (!trimmed.empty() && trimmed.back() == '.') {
            auto r = std::from_chars(first, last - 1, value);
            if (r.ec != std::errc{}) return std::nullopt;
        } else {
            return std::nullopt;
        }
    }
    pos = i;
    return negative ? -value : value;
}

}  // namespace vecdraw::detail
