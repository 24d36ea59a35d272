#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>

#include "bowkit/unicode_data.hpp"

namespace bowkit::uni {

inline constexpr char32_t kReplacement = 0xFFFD;

// Decodes the codepoint starting at s[i] and advances i. Malformed bytes
// decode as U+FFFD one byte at a time so the scan always makes progress.
inline char32_t decode(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return kReplacement;
  }
  if (i + len > s.size()) {
    ++i;
    return kReplacement;
  }
  for (int k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return kReplacement;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  // overlongs and surrogates are invalid input, not valid alternates
  static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    ++i;
    return kReplacement;
  }
  i += len;
  return cp;
}

inline void append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::u32string decode_all(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) out.push_back(decode(s, i));
  return out;
}

inline std::string encode(const std::u32string& s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : s) append(out, cp);
  return out;
}

inline std::size_t codepoint_count(std::string_view s) {
  std::size_t n = 0, i = 0;
  while (i < s.size()) {
    decode(s, i);
    ++n;
  }
  return n;
}

namespace detail {

inline bool in_ranges(const unicode_data::Range* first, const unicode_data::Range* last, char32_t cp) {
  auto it = std::upper_bound(first, last, cp, [](char32_t c, const unicode_data::Range& r) { return c < r.lo; });
  return it != first && cp <= (it - 1)->hi;
}

}  // namespace detail

// General categories L*, M*, N* — the characters tokens are made of.
inline bool is_token_char(char32_t cp) {
  return detail::in_ranges(std::begin(unicode_data::kTokenRanges), std::end(unicode_data::kTokenRanges), cp);
}

inline bool is_number(char32_t cp) {
  return detail::in_ranges(std::begin(unicode_data::kNumberRanges), std::end(unicode_data::kNumberRanges), cp);
}

inline char32_t simple_lower(char32_t cp) {
  auto it = std::lower_bound(std::begin(unicode_data::kSimpleLower), std::end(unicode_data::kSimpleLower), cp,
                             [](const unicode_data::Pair32& p, char32_t c) { return p.cp < c; });
  if (it != std::end(unicode_data::kSimpleLower) && it->cp == cp) return it->to;
  return cp;
}

inline std::uint8_t combining_class(char32_t cp) {
  auto it = std::lower_bound(std::begin(unicode_data::kCombiningClasses), std::end(unicode_data::kCombiningClasses),
                             cp, [](const unicode_data::CombiningClass& p, char32_t c) { return p.cp < c; });
  if (it != std::end(unicode_data::kCombiningClasses) && it->cp == cp) return it->ccc;
  return 0;
}

namespace detail {

inline constexpr char32_t kHangulSBase = 0xAC00;
inline constexpr char32_t kHangulLBase = 0x1100;
inline constexpr char32_t kHangulVBase = 0x1161;
inline constexpr char32_t kHangulTBase = 0x11A7;
inline constexpr int kHangulLCount = 19;
inline constexpr int kHangulVCount = 21;
inline constexpr int kHangulTCount = 28;
inline constexpr int kHangulNCount = kHangulVCount * kHangulTCount;
inline constexpr int kHangulSCount = kHangulLCount * kHangulNCount;

inline void decompose_one(char32_t cp, std::u32string& out) {
  if (cp >= kHangulSBase && cp < kHangulSBase + kHangulSCount) {
    const int s = static_cast<int>(cp - kHangulSBase);
    out.push_back(kHangulLBase + s / kHangulNCount);
    out.push_back(kHangulVBase + (s % kHangulNCount) / kHangulTCount);
    const int t = s % kHangulTCount;
    if (t != 0) out.push_back(kHangulTBase + t);
    return;
  }
  auto it = std::lower_bound(std::begin(unicode_data::kDecompositions), std::end(unicode_data::kDecompositions), cp,
                             [](const unicode_data::Decomposition& d, char32_t c) { return d.cp < c; });
  if (it != std::end(unicode_data::kDecompositions) && it->cp == cp) {
    for (std::uint8_t k = 0; k < it->len; ++k) out.push_back(unicode_data::kDecompositionPool[it->offset + k]);
    return;
  }
  out.push_back(cp);
}

// Canonical Ordering Algorithm: stable-sort maximal nonstarter runs by ccc.
inline void canonical_order(std::u32string& s) {
  for (std::size_t i = 1; i < s.size();) {
    const std::uint8_t cc = combining_class(s[i]);
    if (cc != 0 && combining_class(s[i - 1]) > cc) {
      std::swap(s[i - 1], s[i]);
      if (i > 1)
        --i;
      else
        ++i;
    } else {
      ++i;
    }
  }
}

inline char32_t compose_pair(char32_t a, char32_t b) {
  if (a >= kHangulLBase && a < kHangulLBase + kHangulLCount && b >= kHangulVBase &&
      b < kHangulVBase + kHangulVCount) {
    return kHangulSBase + ((a - kHangulLBase) * kHangulVCount + (b - kHangulVBase)) * kHangulTCount;
  }
  if (a >= kHangulSBase && a < kHangulSBase + kHangulSCount && (a - kHangulSBase) % kHangulTCount == 0 &&
      b > kHangulTBase && b < kHangulTBase + kHangulTCount) {
    return a + (b - kHangulTBase);
  }
  const std::uint64_t key = (static_cast<std::uint64_t>(a) << 21) | b;
  auto it = std::lower_bound(std::begin(unicode_data::kCompositions), std::end(unicode_data::kCompositions), key,
                             [](const unicode_data::Composition& c, std::uint64_t k) { return c.key < k; });
  if (it != std::end(unicode_data::kCompositions) && it->key == key) return it->to;
  return 0;
}

// Canonical Composition Algorithm over a decomposed, canonically ordered string.
inline void compose(std::u32string& s) {
  if (s.empty()) return;
  std::size_t starter = 0;
  std::size_t write = 1;
  int last_cc = combining_class(s[0]);
  if (last_cc != 0) last_cc = 256;  // string starts mid combining sequence
  for (std::size_t i = 1; i < s.size(); ++i) {
    const char32_t ch = s[i];
    const int cc = combining_class(ch);
    const char32_t composite = compose_pair(s[starter], ch);
    if (composite != 0 && (last_cc < cc || last_cc == 0)) {
      s[starter] = composite;
    } else {
      if (cc == 0) starter = write;
      last_cc = cc;
      s[write++] = ch;
    }
  }
  s.resize(write);
}

}  // namespace detail

inline std::string nfc(std::string_view s) {
  bool ascii = true;
  for (char c : s) {
    if (static_cast<unsigned char>(c) >= 0x80) {
      ascii = false;
      break;
    }
  }
  if (ascii) return std::string(s);
  std::u32string decomposed;
  decomposed.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) detail::decompose_one(decode(s, i), decomposed);
  detail::canonical_order(decomposed);
  detail::compose(decomposed);
  return encode(decomposed);
}

}  // namespace bowkit::uni
