#!/usr/bin/env python3
"""Regenerates tests/data/unicode_cases.tsv.

Reference implementations of tokenize() and normalize() written directly
against Python's unicodedata, used to freeze expected outputs for the C++
implementation. Strings are encoded as space-separated hex code points so the
file survives editors, diffs, and whitespace normalization untouched.

Row formats:
    TOK\t<input cps>\t<token cps>|<token cps>|...
    NRM\t<keep|drop>\t<input cps>\t<output cps>
"""

import random
import sys
import unicodedata

ZWNJ, ZWJ = "‌", "‍"


def is_token_char(ch):
    return unicodedata.category(ch)[0] in "LMN" or ch in (ZWNJ, ZWJ)


def tokenize(text):
    tokens, cur = [], []
    for ch in text:
        if is_token_char(ch):
            cur.append(ch)
        elif cur:
            tokens.append("".join(cur))
            cur = []
    if cur:
        tokens.append("".join(cur))
    return tokens


def simple_lower(ch):
    low = ch.lower()
    return low if len(low) == 1 else ch


def normalize(token, digits):
    t = "".join(ch for ch in token if ch not in (ZWNJ, ZWJ))
    t = "".join(simple_lower(ch) for ch in t)
    t = unicodedata.normalize("NFC", t)
    if digits == "drop" and t and all(unicodedata.category(ch)[0] == "N" for ch in t):
        return ""
    return t


def cps(s):
    return " ".join("%04X" % ord(ch) for ch in s)


CURATED_TEXTS = [
    "cat chases rat",
    "",
    "રમત, રમતો; રમશે.",
    "  leading and trailing  ",
    "co‍operate",          # ZWJ inside a Latin token
    "‍",                    # lone joiner is a (strippable) token
    "‌‍",              # joiners only
    "a‌‍b",
    "étude",               # combining acute
    "́edge",                # mark at start of text
    "tab\tsep\nline",
    "price: $42.50 (approx)",
    "ABC-def_ghi",               # underscore is punctuation: splits
    "가힣 가", # Hangul syllables + decomposed jamo
    "x² y₂ z2",
    "સ્ત્રી‌ઓ અને બાળકો",
    "१२३ ٤٥٦ 123",
    "Ω≠ω; Σσς",
    "ﬁle ﬂow",                   # ligature codepoints are letters
    "don't stop",
    "Ångström Ångstrom",
]

CURATED_NORM = [
    ("The", "keep"), ("The", "drop"),
    ("રમત‌ઓ", "keep"),
    ("2010", "keep"), ("2010", "drop"),
    ("a2010", "drop"), ("x²", "drop"), ("²³", "drop"), ("١٢٣", "drop"),
    ("Press", "keep"), ("STRASSE", "keep"), ("straße", "keep"),
    ("İstanbul", "keep"), ("ÇİFT", "keep"),
    ("é", "keep"), ("É", "keep"), ("É", "keep"),
    ("ÅB̈", "keep"), ("Å", "keep"),
    ("각", "keep"),  # composes to 각
    ("ΣΟΦΟΣ", "keep"), ("ό,τι", "keep"),
    ("‍", "keep"), ("‌‍", "drop"),
    ("રમ‍ત", "keep"), ("રાં", "keep"),
    ("MixedCASE123", "drop"), ("", "keep"),
]

ASCII_LETTERS = "abcdefghijKLMNOPqrstUVwxyz"
GUJARATI = [chr(c) for c in range(0x0A85, 0x0AB9) if unicodedata.category(chr(c))[0] == "L"]
GUJ_MARKS = [chr(c) for c in range(0x0ABE, 0x0ACE) if unicodedata.category(chr(c)).startswith("M")]
COMBINING = ["̀", "́", "̈", "̊", "̧"]
PRECOMPOSED = ["é", "Å", "ü", "ṩ", "Å", "Ǆ"]
DIGITS = "0123456789" + "૦૧૨૩" + "١٢٣" + "²³"
PUNCT_WS = " \t\n.,;:!?()[]\"'-_/\\|@#$%^&*+=~` "
SPECIAL = [ZWJ, ZWNJ, "İ", "ı", "ß", "Σ", "ς", "ﬁ",
           "ᄀ", "ᅡ", "ᆨ", "각", "\U0001d400", "\U00010330"]

POOL = list(ASCII_LETTERS) + GUJARATI + GUJ_MARKS + COMBINING + PRECOMPOSED + \
    list(DIGITS) + list(PUNCT_WS) + SPECIAL


def random_text(rng, lo, hi):
    return "".join(rng.choice(POOL) for _ in range(rng.randint(lo, hi)))


def random_token(rng, lo, hi):
    while True:
        t = "".join(rng.choice([c for c in POOL if is_token_char(c)])
                    for _ in range(rng.randint(lo, hi)))
        if t:
            return t


def main(out_path):
    rng = random.Random(926)
    rows = []
    for text in CURATED_TEXTS:
        rows.append("TOK\t%s\t%s" % (cps(text), "|".join(cps(t) for t in tokenize(text))))
    for _ in range(1600):
        text = random_text(rng, 0, 40)
        rows.append("TOK\t%s\t%s" % (cps(text), "|".join(cps(t) for t in tokenize(text))))
    for tok, pol in CURATED_NORM:
        rows.append("NRM\t%s\t%s\t%s" % (pol, cps(tok), cps(normalize(tok, pol))))
    for _ in range(1600):
        tok = random_token(rng, 1, 12)
        pol = rng.choice(["keep", "drop"])
        rows.append("NRM\t%s\t%s\t%s" % (pol, cps(tok), cps(normalize(tok, pol))))
    with open(out_path, "w", encoding="utf-8") as f:
        f.write("# generated by scripts/gen_unicode_cases.py — do not edit\n")
        f.write("\n".join(rows) + "\n")
    sys.stderr.write("%d rows (unicodedata %s)\n" % (len(rows), unicodedata.unidata_version))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data/unicode_cases.tsv")
