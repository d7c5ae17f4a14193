#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace chirplink {

// Minimal UTF-8 handling for message payloads.  Decoding never fails: each
// malformed byte decodes to U+FFFD and the scan resumes at the next byte.

namespace detail {

inline bool is_cont(unsigned char b) { return (b & 0xC0) == 0x80; }

// Decodes one codepoint starting at position i; advances i past it.
// Malformed input yields 0xFFFD and advances by one byte.
inline std::uint32_t utf8_next(std::string_view s, std::size_t& i) {
    const unsigned char b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) { ++i; return b0; }
    auto fail = [&i] { ++i; return 0xFFFDu; };
    if (b0 >= 0xC2 && b0 <= 0xDF) {
        if (i + 1 >= s.size() || !is_cont(s[i + 1])) return fail();
        const std::uint32_t cp = ((b0 & 0x1Fu) << 6) | (s[i + 1] & 0x3Fu);
        i += 2;
        return cp;
    }
    if (b0 >= 0xE0 && b0 <= 0xEF) {
        if (i + 2 >= s.size() || !is_cont(s[i + 1]) || !is_cont(s[i + 2])) return fail();
        const unsigned char b1 = static_cast<unsigned char>(s[i + 1]);
        if (b0 == 0xE0 && b1 < 0xA0) return fail();            // overlong
        if (b0 == 0xED && b1 > 0x9F) return fail();            // surrogate range
        const std::uint32_t cp = ((b0 & 0x0Fu) << 12) | ((b1 & 0x3Fu) << 6) | (s[i + 2] & 0x3Fu);
        i += 3;
        return cp;
    }
    if (b0 >= 0xF0 && b0 <= 0xF4) {
        if (i + 3 >= s.size() || !is_cont(s[i + 1]) || !is_cont(s[i + 2]) || !is_cont(s[i + 3]))
            return fail();
        const unsigned char b1 = static_cast<unsigned char>(s[i + 1]);
        if (b0 == 0xF0 && b1 < 0x90) return fail();            // overlong
        if (b0 == 0xF4 && b1 > 0x8F) return fail();            // > U+10FFFF
        const std::uint32_t cp = ((b0 & 0x07u) << 18) | ((b1 & 0x3Fu) << 12) |
                                 ((s[i + 2] & 0x3Fu) << 6) | (s[i + 3] & 0x3Fu);
        i += 4;
        return cp;
    }
    return fail();
}

} // namespace detail

inline std::vector<std::uint32_t> utf8_codepoints(std::string_view s) {
    std::vector<std::uint32_t> out;
    std::size_t i = 0;
    while (i < s.size()) out.push_back(detail::utf8_next(s, i));
    return out;
}

// Re-encodes with every malformed sequence replaced by U+FFFD.
inline std::string utf8_sanitize(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const std::size_t start = i;
        const std::uint32_t cp = detail::utf8_next(s, i);
        // a malformed sequence always consumes exactly one byte
        if (cp == 0xFFFD && i == start + 1) {
            out += "\xEF\xBF\xBD";
        } else {
            out.append(s.substr(start, i - start));
        }
    }
    return out;
}

} // namespace chirplink
