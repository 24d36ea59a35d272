#!/usr/bin/env python3
"""Regenerates include/bowkit/unicode_data.hpp from Python's unicodedata.

The tables cover exactly what the tokenizer and normalizer consume:
token-character ranges (general categories L*, M*, N*), number ranges (N*),
single-codepoint lowercase mappings, canonical combining classes, fully
expanded canonical decompositions (Hangul handled algorithmically at runtime),
and primary composition pairs. Run with the CPython whose unicodedata matches
the Unicode version you want to ship.
"""

import sys
import unicodedata

MAX_CP = 0x110000
HANGUL_S_BASE, HANGUL_S_COUNT = 0xAC00, 11172


def categories():
    for cp in range(MAX_CP):
        yield cp, unicodedata.category(chr(cp))


def merged_ranges(pred):
    ranges = []
    start = None
    for cp in range(MAX_CP):
        if pred(cp):
            if start is None:
                start = cp
        elif start is not None:
            ranges.append((start, cp - 1))
            start = None
    if start is not None:
        ranges.append((start, MAX_CP - 1))
    return ranges


def primary_decomposition(cp):
    d = unicodedata.decomposition(chr(cp))
    if not d or d.startswith("<"):
        return None
    return [int(x, 16) for x in d.split()]


def full_decomposition(cp, memo):
    if cp in memo:
        return memo[cp]
    prim = primary_decomposition(cp)
    if prim is None:
        out = [cp]
    else:
        out = []
        for c in prim:
            out.extend(full_decomposition(c, memo))
    memo[cp] = out
    return out


def main(out_path):
    cat = {}
    for cp, c in categories():
        cat[cp] = c

    is_token = lambda cp: cat[cp][0] in "LMN"
    is_number = lambda cp: cat[cp][0] == "N"
    token_ranges = merged_ranges(is_token)
    number_ranges = merged_ranges(is_number)

    lower = []
    for cp in range(MAX_CP):
        c = chr(cp)
        l = c.lower()
        if len(l) == 1 and l != c:
            # the mapping must be idempotent for normalize() to be
            assert l.lower() == l, hex(cp)
            lower.append((cp, ord(l)))

    ccc = []
    for cp in range(MAX_CP):
        k = unicodedata.combining(chr(cp))
        if k:
            ccc.append((cp, k))

    memo = {}
    decomp = []
    pool = []
    for cp in range(MAX_CP):
        if HANGUL_S_BASE <= cp < HANGUL_S_BASE + HANGUL_S_COUNT:
            continue
        if primary_decomposition(cp) is None:
            continue
        seq = full_decomposition(cp, memo)
        decomp.append((cp, len(pool), len(seq)))
        pool.extend(seq)

    comp = []
    for cp in range(MAX_CP):
        if HANGUL_S_BASE <= cp < HANGUL_S_BASE + HANGUL_S_COUNT:
            continue
        prim = primary_decomposition(cp)
        if prim is None or len(prim) != 2:
            continue
        a, b = prim
        if unicodedata.combining(chr(a)) != 0:
            continue
        # normalize() re-composing the pair means cp is not composition-excluded
        if unicodedata.normalize("NFC", chr(a) + chr(b)) == chr(cp):
            comp.append(((a << 21) | b, cp))
    comp.sort()

    with open(out_path, "w") as f:
        w = f.write
        w("// Generated by scripts/gen_unicode_data.py — do not edit by hand.\n")
        w("// Unicode %s via CPython unicodedata.\n" % unicodedata.unidata_version)
        w("#pragma once\n\n#include <cstdint>\n\n")
        w("namespace bowkit::unicode_data {\n\n")
        w("struct Range { char32_t lo; char32_t hi; };\n")
        w("struct Pair32 { char32_t cp; char32_t to; };\n")
        w("struct CombiningClass { char32_t cp; std::uint8_t ccc; };\n")
        w("struct Decomposition { char32_t cp; std::uint32_t offset; std::uint8_t len; };\n")
        w("struct Composition { std::uint64_t key; char32_t to; };\n\n")

        def dump(name, type_, rows, fmt):
            w("inline constexpr %s %s[] = {\n" % (type_, name))
            line = []
            for r in rows:
                line.append(fmt % r)
                if len(line) == 6:
                    w("    " + " ".join(line) + "\n")
                    line = []
            if line:
                w("    " + " ".join(line) + "\n")
            w("};\n\n")

        dump("kTokenRanges", "Range", token_ranges, "{0x%X, 0x%X},")
        dump("kNumberRanges", "Range", number_ranges, "{0x%X, 0x%X},")
        dump("kSimpleLower", "Pair32", lower, "{0x%X, 0x%X},")
        dump("kCombiningClasses", "CombiningClass", ccc, "{0x%X, %d},")
        dump("kDecompositions", "Decomposition", decomp, "{0x%X, %d, %d},")
        dump("kDecompositionPool", "char32_t", [(p,) for p in pool], "0x%X,")
        dump("kCompositions", "Composition", comp, "{0x%X, 0x%X},")
        w("}  // namespace bowkit::unicode_data\n")

    sys.stderr.write(
        "token ranges %d, number ranges %d, lower %d, ccc %d, decomp %d (pool %d), comp %d\n"
        % (len(token_ranges), len(number_ranges), len(lower), len(ccc), len(decomp), len(pool), len(comp))
    )


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "include/bowkit/unicode_data.hpp")
