#!/usr/bin/env python3
"""Generates the mini retrieval test collection and its golden MAP values.

Writes, under tests/data/mini/:
  corpus/a.trec, corpus/b.trec   50 ASCII documents
  topics.trec                    5 topics (title / desc / narr)
  qrels.txt                      graded judgments, binarized at grade > 0
  stoplist.txt                   stop words for the "stop" pipeline
  stemrules.tsv                  suffix rules for the "stem" pipeline
  paradigms.tsv                  variant paradigms for the "fcg" pipeline
  goldens.tsv                    MAP for every (pipeline, fields, model) cell

The golden values come from a self-contained reference implementation kept
deliberately separate from the C++ library: plain-Python tokenizing,
indexing, scoring, and metric code over the same files. The corpus is pure
ASCII so the reference tokenizer (runs of [A-Za-z0-9]) and lowercasing match
the library's Unicode-aware ones exactly.

Also prints the smallest relative score gap seen between adjacently ranked
documents, as a guard against rankings that could flip under last-ulp
differences; regenerate with a different seed if it ever falls under 1e-9.
"""

import math
import os
import random
import re

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "tests", "data", "mini")

THEMES = {
    0: ["monsoon", "rain", "flood", "river", "storm"],
    1: ["farm", "crop", "seed", "harvest", "soil"],
    2: ["market", "price", "trade", "cotton", "export"],
    3: ["school", "teacher", "student", "exam", "book"],
    4: ["doctor", "clinic", "disease", "vaccine", "patient"],
}
SUFFIXES = ["", "s", "ed", "ing"]
STOPWORDS = ["the", "of", "and", "in", "to", "a", "for", "is"]
FILLER = ["village", "city", "year", "report", "people", "district", "state", "work", "road", "water"]

TOPICS = [
    ("101", "monsoon flooding rivers",
     "damage caused by monsoon rains and river floods",
     "relevant reports describe flooded villages rising rivers and storms during the monsoon season"),
    ("102", "farming crops harvest",
     "farmers harvesting crops and preparing soil and seeds",
     "relevant reports describe farms seeding soils and the harvested crop of the year"),
    ("103", "market prices trading",
     "prices of cotton and exports traded in the market",
     "relevant reports describe markets trading cotton exporting goods and pricing"),
    ("104", "schools teachers students",
     "students and teachers in schools taking exams",
     "relevant reports describe schooling examined students teaching and books"),
    ("105", "doctors clinics vaccines",
     "doctors treating patients and vaccines in clinics",
     "relevant reports describe diseases vaccinated patients and clinics"),
]

STEM_RULES = [("ing", 3), ("ed", 3), ("s", 3)]  # longest match first, min stem 3
PARADIGM_LINES = ["ing\t0,s,ed,ing", "ed\t0,s,ed,ing", "s\t0,s,ed,ing", "*\t0,s,ed,ing"]
PARADIGMS = [("ing", ["", "s", "ed", "ing"]), ("ed", ["", "s", "ed", "ing"]),
             ("s", ["", "s", "ed", "ing"]), ("", ["", "s", "ed", "ing"])]


def pick_inflected(rng, theme):
    base = rng.choice(THEMES[theme])
    r = rng.random()
    if r < 0.40:
        suffix = ""
    elif r < 0.70:
        suffix = "s"
    elif r < 0.85:
        suffix = "ed"
    else:
        suffix = "ing"
    return base + suffix


def gen_corpus(rng):
    """Docs mix a primary theme, often a secondary one, and cross-theme noise,
    at two strengths, so topical relevance is graded rather than binary."""
    docs = []
    for i in range(50):
        primary = i % 5
        secondary = None
        if rng.random() < 0.6:
            secondary = rng.randrange(5)
            if secondary == primary:
                secondary = None
        primary_share = 0.45 if rng.random() < 0.65 else 0.18
        n_words = rng.randrange(30, 61)
        words = []
        for _ in range(n_words):
            r = rng.random()
            if r < primary_share:
                words.append(pick_inflected(rng, primary))
            elif r < primary_share + 0.15 and secondary is not None:
                words.append(pick_inflected(rng, secondary))
            elif r < primary_share + 0.27:
                words.append(pick_inflected(rng, rng.randrange(5)))  # cross-theme noise
            elif r < primary_share + 0.40:
                words.append(rng.choice(FILLER))
            else:
                words.append(rng.choice(STOPWORDS))
        docid = "MINI-%03d" % (i + 1)
        docs.append((docid, " ".join(words)))
    return docs


def theme_token_count(text, theme):
    bases = set(THEMES[theme])
    count = 0
    for tok in TOKEN.findall(text):
        if stem(tok.lower()) in bases:
            count += 1
    return count


def gen_qrels(docs):
    """Judged by how much of the document is about the topic's theme:
    grade 2 for clearly on-topic, 1 for substantially on-topic, an explicit 0
    for near misses an assessor would have looked at, unjudged otherwise."""
    rows = []
    for t, (qid, _, _, _) in enumerate(TOPICS):
        for docid, text in docs:
            c = theme_token_count(text, t)
            if c >= 14:
                rows.append((qid, docid, 2))
            elif c >= 8:
                rows.append((qid, docid, 1))
            elif c >= 3:
                rows.append((qid, docid, 0))
    return rows


# ---------------- reference retrieval stack ----------------

TOKEN = re.compile(r"[A-Za-z0-9]+")


def stem(term):
    for suf, minstem in sorted(STEM_RULES, key=lambda r: (-len(r[0]), r[0])):
        if len(term) > len(suf) and len(term) - len(suf) >= minstem and term.endswith(suf):
            return term[: -len(suf)]
    return term


def pipeline(text, use_stop, use_stem, stopset):
    terms = []
    for tok in TOKEN.findall(text):
        term = tok.lower()
        if use_stop and term in stopset:
            continue
        if use_stem:
            term = stem(term)
        terms.append(term)
    return terms


def variants(term):
    out = {term}
    for match, sufs in PARADIGMS:
        if term.endswith(match):
            base = term[: len(term) - len(match)] if match else term
            for s in sufs:
                out.add(base + s)
            break
    return out


class Index:
    def __init__(self, docs, use_stop, use_stem, stopset):
        self.docids = [d[0] for d in docs]
        self.term_counts = []
        self.doclens = []
        self.df = {}
        self.cf = {}
        for _docid, text, *_ in docs:
            terms = pipeline(text, use_stop, use_stem, stopset)
            counts = {}
            for t in terms:
                counts[t] = counts.get(t, 0) + 1
            self.term_counts.append(counts)
            self.doclens.append(len(terms))
            for t, c in counts.items():
                self.df[t] = self.df.get(t, 0) + 1
                self.cf[t] = self.cf.get(t, 0) + c
        self.N = len(docs)
        self.total = sum(self.doclens)
        self.avdl = self.total / self.N


K1, B, MU, LAMBDA, C = 1.2, 0.75, 2500.0, 0.15, 1.0


def weight(model, tf, df, F, dl, N, avdl, total):
    if model == "tfidf":
        K = K1 * (1 - B + B * dl / avdl)
        return (tf / (tf + K)) * math.log(1 + N / df)
    if model == "bm25":
        idf = math.log((N - df + 0.5) / (df + 0.5) + 1)
        K = K1 * (1 - B + B * dl / avdl)
        return idf * tf * (K1 + 1) / (tf + K)
    if model == "dirichlet_lm":
        return math.log((tf + MU * F / total) / (dl + MU))
    if model == "hiemstra_lm":
        return math.log(1 + LAMBDA * tf * total / ((1 - LAMBDA) * F * dl))
    if model == "in_expb2":
        tfn = tf * math.log2(1 + C * avdl / dl)
        n_e = N * (1 - ((N - 1) / N) ** F)
        Bae = (F + 1) / (df * (tfn + 1))
        return Bae * tfn * math.log2((N + 1) / (n_e + 0.5))
    raise ValueError(model)


def run_query(index, qterms, model):
    """All-documents enumeration; candidates are docs holding >= 1 query term."""
    scored = []
    min_gap = math.inf
    for ordinal in range(index.N):
        counts = index.term_counts[ordinal]
        score = 0.0
        matched = False
        for term, qtf in sorted(qterms.items()):
            tf = counts.get(term, 0)
            if tf == 0:
                continue
            matched = True
            score += qtf * weight(model, tf, index.df[term], index.cf[term],
                                  index.doclens[ordinal], index.N, index.avdl, index.total)
        if matched:
            scored.append((score, ordinal))
    scored.sort(key=lambda s: (-s[0], s[1]))
    for i in range(1, len(scored)):
        a, b = scored[i - 1][0], scored[i][0]
        if a != b:
            gap = abs(a - b) / max(1.0, abs(a), abs(b))
            min_gap = min(min_gap, gap)
    return [index.docids[o] for _score, o in scored], min_gap


def average_precision(ranked, relevant):
    hits = 0
    total = 0.0
    for r, docid in enumerate(ranked, start=1):
        if docid in relevant:
            hits += 1
            total += hits / r
    return total / len(relevant)


def main():
    rng = random.Random(20260822)
    docs = gen_corpus(rng)
    qrels_rows = gen_qrels(docs)
    for t in range(5):
        mj = sum(1 for q, _d, g in qrels_rows if q == TOPICS[t][0] and g > 0)
        assert 6 <= mj <= 18, (t, mj)

    os.makedirs(os.path.join(OUT, "corpus"), exist_ok=True)

    def doc_block(docid, text):
        return "<DOC>\n<DOCNO>%s</DOCNO>\n<TEXT>\n%s\n</TEXT>\n</DOC>\n" % (docid, text)

    with open(os.path.join(OUT, "corpus", "a.trec"), "w") as f:
        for docid, text, *_ in docs[:25]:
            f.write(doc_block(docid, text))
    with open(os.path.join(OUT, "corpus", "b.trec"), "w") as f:
        for docid, text, *_ in docs[25:]:
            f.write(doc_block(docid, text))

    with open(os.path.join(OUT, "topics.trec"), "w") as f:
        for qid, title, desc, narr in TOPICS:
            f.write("<top>\n<num>%s</num>\n<title>%s</title>\n<desc>%s</desc>\n<narr>%s</narr>\n</top>\n"
                    % (qid, title, desc, narr))

    with open(os.path.join(OUT, "qrels.txt"), "w") as f:
        for qid, docid, grade in qrels_rows:
            f.write("%s 0 %s %d\n" % (qid, docid, grade))

    with open(os.path.join(OUT, "stoplist.txt"), "w") as f:
        for w in STOPWORDS:
            f.write(w + "\n")

    with open(os.path.join(OUT, "stemrules.tsv"), "w") as f:
        f.write("! min_stem_len_default 3\n")
        for suf, _min in STEM_RULES:
            f.write("%s\t3\n" % suf)

    with open(os.path.join(OUT, "paradigms.tsv"), "w") as f:
        for line in PARADIGM_LINES:
            f.write(line + "\n")

    for _docid, text, *_ in docs:
        assert text.isascii()

    stopset = set(STOPWORDS)
    relevant = {}
    for qid, docid, grade in qrels_rows:
        if grade > 0:
            relevant.setdefault(qid, set()).add(docid)

    indexes = {
        "baseline": Index(docs, False, False, stopset),
        "stop": Index(docs, True, False, stopset),
        "stem": Index(docs, False, True, stopset),
    }
    indexes["fcg"] = indexes["baseline"]

    worst_gap = math.inf
    golden_rows = []
    for pipe in ["baseline", "stop", "stem", "fcg"]:
        index = indexes[pipe]
        use_stop = pipe == "stop"
        use_stem = pipe == "stem"
        for fields in ["T", "TD", "TDN"]:
            for model in ["tfidf", "bm25", "dirichlet_lm", "hiemstra_lm", "in_expb2"]:
                aps = []
                for qid, title, desc, narr in TOPICS:
                    text = title
                    if len(fields) >= 2:
                        text += " " + desc
                    if len(fields) >= 3:
                        text += " " + narr
                    qterms = {}
                    for t in pipeline(text, use_stop, use_stem, stopset):
                        qterms[t] = qterms.get(t, 0) + 1
                    if pipe == "fcg":
                        expanded = {}
                        for t, qtf in qterms.items():
                            for v in variants(t):
                                expanded[v] = expanded.get(v, 0) + qtf
                        qterms = expanded
                    ranked, gap = run_query(index, qterms, model)
                    worst_gap = min(worst_gap, gap)
                    aps.append(average_precision(ranked, relevant[qid]))
                golden_rows.append((pipe, fields, model, sum(aps) / len(aps)))

    with open(os.path.join(OUT, "goldens.tsv"), "w") as f:
        f.write("pipeline\tfields\tmodel\tmap\n")
        for pipe, fields, model, value in golden_rows:
            f.write("%s\t%s\t%s\t%s\n" % (pipe, fields, model, repr(value)))

    maps = [v for *_k, v in golden_rows]
    print("wrote %d documents, %d qrels rows, %d golden cells" % (len(docs), len(qrels_rows), len(golden_rows)))
    print("MAP range: %.4f .. %.4f" % (min(maps), max(maps)))
    print("smallest adjacent score gap (relative): %.3g" % worst_gap)
    assert worst_gap > 1e-9, "score gap too small; regenerate with a new seed"
    assert len(set(maps)) > 30, "suspiciously degenerate MAP values"


if __name__ == "__main__":
    main()
