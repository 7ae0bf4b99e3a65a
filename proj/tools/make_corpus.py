#!/usr/bin/env python3
"""Builds the bundled synthetic corpus (data/corpus.txt).

Sentences are sampled from a fixed Markov chain over ~2.7k word types whose
transition structure mimics natural language:

  * a Zipf-weighted function-word core shared by every row,
  * per-word content successor sets with jittered Zipf weights,
  * ~130 strong collocations (one content word strongly predicting another),
  * ~60 reciprocal pairs (strong forward link plus a weaker reverse link)
    that put real loop mass into the chain,
  * a deliberately overloaded successor hub ("the"): about half of the
    content words transit to it with probability 0.14, and several
    prepositions with probability ~0.3.

The hub keeps the corpus-derived transition matrix rich in pairs above the
0.1 threshold used by the rebalancing experiments, while the rest of each row
stays below it. Output is deterministic for the fixed seed.
"""

import numpy as np

SEED = 20240811
N_CONTENT = 2820
N_SENTENCES = 10500
MAX_LEN = 60
OUT = "data/corpus.txt"

FUNCTION_WORDS = [
    "the", "of", "and", "to", "in", "a", "is", "was", "that", "it",
    "for", "on", "with", "as", "by", "at", "from", "his", "her", "their",
    "this", "these", "those", "an", "be", "are", "were", "has", "have", "had",
    "not", "but", "or", "which", "who", "when", "where", "also", "its", "into",
    "during", "after", "before", "between", "under", "over", "about", "than",
    "then", "them", "they", "he", "she", "we", "you", "all", "some", "many",
    "most", "other", "more", "such", "no", "nor", "only", "own", "same", "so",
    "too", "very", "can", "will", "just", "should", "now", "each", "few",
    "both", "any", "because", "while", "through", "against", "without",
    "within", "along", "across", "behind", "beyond", "near", "since", "until",
    "although", "however", "therefore", "thus", "moreover", "further",
    "indeed", "perhaps", "often", "always", "never", "sometimes", "usually",
    "together", "around", "toward", "upon", "among", "amid",
]

PREPOSITION_HUB = ["of", "in", "on", "at", "from", "with", "by", "under",
                   "over", "into", "through", "between"]

ONSETS = ["b", "c", "d", "f", "g", "h", "j", "k", "l", "m", "n", "p", "r",
          "s", "t", "v", "w", "z", "br", "cr", "dr", "fr", "gr", "pr", "tr",
          "bl", "cl", "fl", "gl", "pl", "sl", "sh", "ch", "th", "st", "sp",
          "sk", "sm", "sn", "sw"]
NUCLEI = ["a", "e", "i", "o", "u", "ai", "ea", "ee", "oa", "ou", "io", "ia"]
CODAS = ["", "n", "r", "s", "t", "l", "m", "d", "k", "p", "nd", "nt", "st",
         "rd", "rk", "ss", "ll", "tion", "ment", "ness", "er", "ing", "ed"]


def make_content_words(n, rng):
    words = []
    seen = set(FUNCTION_WORDS)
    while len(words) < n:
        syllables = 2 if rng.random() < 0.72 else 3
        word = ""
        for s in range(syllables):
            word += ONSETS[rng.integers(len(ONSETS))]
            word += NUCLEI[rng.integers(len(NUCLEI))]
            if s == syllables - 1:
                word += CODAS[rng.integers(len(CODAS))]
        if len(word) >= 3 and word not in seen:
            seen.add(word)
            words.append(word)
    return words


def zipf_weights(n, exponent):
    w = 1.0 / np.arange(1, n + 1, dtype=float) ** exponent
    return w / w.sum()


def main():
    rng = np.random.default_rng(SEED)
    content = make_content_words(N_CONTENT, rng)

    n_fun = len(FUNCTION_WORDS)
    fun_w = zipf_weights(n_fun, 1.0)
    # "the" is the hub; keep its base weight high but below the 0.1 threshold
    # once scaled by the function-mass share of a row.
    fun_w[0] = 0.185 / (1.0 - 0.185) * (fun_w[1:].sum())
    fun_w = fun_w / fun_w.sum()

    # Content frequencies are only mildly tilted: every type keeps a count
    # high enough that observed transition probabilities are not dominated by
    # small-sample saturation.
    content_w = zipf_weights(N_CONTENT, 0.3)
    # Successor sets are drawn from a flattened mixture so the tail still
    # appears as a successor somewhere.
    content_pick = 0.3 * content_w + 0.7 / N_CONTENT

    vocab = FUNCTION_WORDS + content
    fun_ids = np.arange(n_fun)
    content_ids = np.arange(n_fun, n_fun + N_CONTENT)
    the_id = 0

    # Hub membership: half of the content words transit to "the" at 0.14.
    hub_member = rng.random(N_CONTENT) < 0.5

    # Content -> content collocations: mid-frequency sources, attractor targets.
    colloc = {}
    sources = rng.choice(np.arange(50, 1200), size=130, replace=False)
    attractors = np.arange(10, 120)
    boosts = [0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50]
    for k, src in enumerate(np.sort(sources)):
        tgt = attractors[rng.integers(len(attractors))]
        colloc[int(src)] = (int(content_ids[tgt]), boosts[k % len(boosts)])

    # Reciprocal pairs: a strong forward link and a weaker reverse link
    # between frequent content words. These carry the loop mass that makes
    # sharpened sampling measurably more repetitive.
    pool = [c for c in range(20, 420) if c not in colloc]
    pool = rng.permutation(np.array(pool, dtype=int))
    for k in range(60):
        v = int(pool[2 * k])
        w = int(pool[2 * k + 1])
        colloc[v] = (int(content_ids[w]), 0.35)
        colloc[w] = (int(content_ids[v]), 0.18)

    # Preposition -> "the" boosts, the classic joined pairs.
    prep_boost = {FUNCTION_WORDS.index(p): 0.22 + 0.02 * (k % 7)
                  for k, p in enumerate(PREPOSITION_HUB)}

    rows_ids = []
    rows_cum = []

    def finish_row(ids, probs):
        ids = np.asarray(ids, dtype=np.int32)
        probs = np.asarray(probs, dtype=float)
        order = np.argsort(ids, kind="stable")
        ids = ids[order]
        probs = probs[order]
        cum = np.cumsum(probs)
        cum[-1] = min(cum[-1], 1.0)
        rows_ids.append(ids)
        rows_cum.append(cum)

    eos_id = n_fun + N_CONTENT

    # Function-word rows: mostly content successors, some function chaining.
    for f in range(n_fun):
        ids = []
        probs = []
        override = prep_boost.get(f, 0.0)
        if override:
            ids.append(the_id)
            probs.append(override)
        eos_p = 0.001 if FUNCTION_WORDS[f] in ("the", "a", "an", "of") else 0.035
        remaining = 1.0 - override - eos_p

        fun_share = 0.18 * remaining
        mask = np.ones(n_fun, dtype=bool)
        mask[f] = False
        if override:
            mask[the_id] = False
        fw = fun_w[mask]
        fw = fw / fw.sum() * fun_share
        ids.extend(fun_ids[mask].tolist())
        probs.extend(fw.tolist())

        content_share = remaining - fun_share
        succ = rng.choice(N_CONTENT, size=90, replace=False, p=content_pick)
        sw = content_w[succ] ** 0.4 * np.exp(rng.normal(0.0, 0.35, size=90))
        sw = sw / sw.sum() * content_share
        ids.extend(content_ids[succ].tolist())
        probs.extend(sw.tolist())

        ids.append(eos_id)
        probs.append(eos_p)
        finish_row(ids, probs)

    # Content-word rows.
    for c in range(N_CONTENT):
        ids = []
        probs = []
        override = 0.0
        if hub_member[c]:
            ids.append(the_id)
            probs.append(0.14)
            override += 0.14
        if c in colloc:
            tgt, boost = colloc[c]
            ids.append(tgt)
            probs.append(boost)
            override += boost
        eos_p = 0.075
        remaining = 1.0 - override - eos_p

        fun_share = 0.52 * remaining
        mask = np.ones(n_fun, dtype=bool)
        if hub_member[c]:
            mask[the_id] = False
        fw = fun_w[mask]
        fw = fw / fw.sum() * fun_share
        ids.extend(fun_ids[mask].tolist())
        probs.extend(fw.tolist())

        content_share = remaining - fun_share
        pick = content_pick.copy()
        pick[c] = 0.0  # no self-transition
        pick = pick / pick.sum()
        succ = rng.choice(N_CONTENT, size=24, replace=False, p=pick)
        sw = content_w[succ] ** 0.4 * np.exp(rng.normal(0.0, 0.5, size=24))
        sw = sw / sw.sum() * content_share
        ids.extend(content_ids[succ].tolist())
        probs.extend(sw.tolist())

        ids.append(eos_id)
        probs.append(eos_p)
        finish_row(ids, probs)

    # Sentence starts: function words open 30% of sentences.
    start_ids = np.concatenate([fun_ids, content_ids])
    start_w = np.concatenate([fun_w * 0.30, content_w * 0.70])
    start_cum = np.cumsum(start_w / start_w.sum())

    lines = []
    token_count = 0
    for _ in range(N_SENTENCES):
        u = int(start_ids[np.searchsorted(start_cum, rng.random(), side="right")])
        sent = [vocab[u]]
        while len(sent) < MAX_LEN:
            ids = rows_ids[u]
            cum = rows_cum[u]
            nxt = int(ids[np.searchsorted(cum, rng.random() * cum[-1], side="right")])
            if nxt == eos_id:
                break
            sent.append(vocab[nxt])
            u = nxt
        lines.append(" ".join(sent))
        token_count += len(sent)

    with open(OUT, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")

    types = set()
    for line in lines:
        types.update(line.split())
    size = sum(len(line) + 1 for line in lines)
    print(f"sentences={len(lines)} tokens={token_count} types={len(types)} "
          f"bytes={size}")


if __name__ == "__main__":
    main()
