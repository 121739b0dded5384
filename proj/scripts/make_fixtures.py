#!/usr/bin/env python3
"""Generate the bundled catalog and stand-in typo corpora.

The public GitHub and Twitter typo corpora cannot be redistributed here and
the marketplace search logs are proprietary, so the repository ships
synthetic stand-ins. Each corpus is produced by a hand-written behaviour
profile (edit-type mix, position preference, key choice) applied to English
words or catalog tokens, plus a small amount of noise (multi-edit pairs,
identical pairs, malformed lines) so the ingest path sees realistic input.

Everything is seeded, so re-running the script reproduces the files.

    python3 scripts/make_fixtures.py --dictionary data/dictionaries/en_top20k.tsv --out data
"""

import argparse
import json
import os
import random

QWERTY_ROWS = [("1234567890", 0.0), ("qwertyuiop", 0.5), ("asdfghjkl", 0.75), ("zxcvbnm", 1.25)]


def keyboard_neighbours():
    pos = {}
    for r, (keys, offset) in enumerate(QWERTY_ROWS):
        for c, k in enumerate(keys):
            pos[k] = (r, c + offset)
    out = {}
    for k, (r, x) in pos.items():
        out[k] = sorted(
            o for o, (r2, x2) in pos.items()
            if o != k and ((r2 == r and abs(x2 - x) == 1) or (abs(r2 - r) == 1 and abs(x2 - x) < 1))
        )
    return out


NEIGHBOURS = keyboard_neighbours()
VOWEL_SWAPS = {"a": "e", "e": "a", "i": "e", "o": "u", "u": "o", "y": "i"}
LETTERS = "abcdefghijklmnopqrstuvwxyz"

# Edit-type mix, position preference (beta parameters over the word) and key
# choice for substitutions / insertions.
PROFILES = {
    "github": {
        "types": {"deletion": 0.42, "substitution": 0.25, "insertion": 0.13,
                  "transposition": 0.12, "replication": 0.08},
        "position": (3.0, 1.4),
        "substitution_vowel": 0.6,
        "insertion_neighbour": 0.7,
    },
    "twitter": {
        "types": {"replication": 0.45, "deletion": 0.20, "substitution": 0.15,
                  "insertion": 0.10, "transposition": 0.10},
        "position": (1.6, 1.2),
        "substitution_vowel": 0.2,
        "insertion_neighbour": 0.8,
    },
    "marketplace": {
        "types": {"substitution": 0.32, "deletion": 0.28, "insertion": 0.15,
                  "transposition": 0.15, "replication": 0.10},
        "position": (1.3, 1.6),
        "substitution_vowel": 0.15,
        "insertion_neighbour": 0.85,
    },
    "heldout": {
        "types": {"deletion": 0.33, "substitution": 0.30, "insertion": 0.14,
                  "transposition": 0.13, "replication": 0.10},
        "position": (2.0, 1.5),
        "substitution_vowel": 0.2,
        "insertion_neighbour": 0.8,
    },
}


def draw(rng, weights):
    items = sorted(weights.items())
    total = sum(w for _, w in items)
    u = rng.random() * total
    acc = 0.0
    for key, w in items:
        acc += w
        if u < acc:
            return key
    return items[-1][0]


def single_edit(word, profile, rng):
    """One typo in `word` or None when the draw does not apply."""
    kind = draw(rng, profile["types"])
    a, b = profile["position"]
    i = min(len(word) - 1, int(rng.betavariate(a, b) * len(word)))
    c = word[i]
    if kind == "deletion":
        if len(word) < 3:
            return None
        return word[:i] + word[i + 1:]
    if kind == "replication":
        return word[:i + 1] + c + word[i + 1:]
    if kind == "insertion":
        if rng.random() < profile["insertion_neighbour"] and NEIGHBOURS.get(c):
            k = rng.choice([n for n in NEIGHBOURS[c] if n.isalpha()] or NEIGHBOURS[c])
        else:
            k = rng.choice(LETTERS)
        if k == c or (i + 1 < len(word) and word[i + 1] == k):
            return None
        return word[:i + 1] + k + word[i + 1:]
    if kind == "substitution":
        if c in VOWEL_SWAPS and rng.random() < profile["substitution_vowel"]:
            k = VOWEL_SWAPS[c]
        elif NEIGHBOURS.get(c):
            k = rng.choice(NEIGHBOURS[c])
        else:
            return None
        return word[:i] + k + word[i + 1:]
    if kind == "transposition":
        j = i + 1 if i + 1 < len(word) else i - 1
        if j < 0 or word[i] == word[j]:
            return None
        lo, hi = min(i, j), max(i, j)
        return word[:lo] + word[hi] + word[lo] + word[hi + 1:]
    raise ValueError(kind)


def typo(word, profile, rng, edits=1):
    out = word
    for _ in range(edits):
        for _ in range(20):
            t = single_edit(out, profile, rng)
            if t is not None and t != out:
                out = t
                break
    return out


def load_words(path, lo, hi, min_len):
    words = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                continue
            w = line.split("\t")[0]
            words.append(w)
    return [w for w in words[lo:hi] if len(w) >= min_len]


# --------------------------------------------------------------------------
# Catalog

BRANDS = [
    "contoso", "fabrikam", "northwind", "adatum", "tailspin", "litware",
    "proseware", "woodgrove", "wingtip", "lucerne", "relecloud", "coho",
    "humongous", "trey", "alpine", "margies", "fourth coffee", "wide world",
    "blue yonder", "graphic design", "southridge", "consolidated", "bellows",
    "datum", "vanarsdel", "lamna", "nod publishers", "first up", "tasmanian",
    "fincher", "munson", "school of fine art",
]
SYLLABLES = ["zen", "flow", "sync", "data", "cloud", "nova", "pulse", "stack",
             "bright", "kin", "vox", "loop", "quant", "signal", "orbit", "peak",
             "spark", "mint", "core", "grid", "lumen", "tera", "apex", "hive"]
ENDINGS = ["ly", "io", "ify", "base", "works", "labs", "hub", "wise", "desk", "ware"]
PRODUCTS = [
    "crm connector", "invoice manager", "project tracker", "hr portal",
    "expense reports", "time sheets", "sales dashboard", "inventory sync",
    "contract management", "help desk", "survey builder", "email marketing",
    "payroll", "asset tracking", "field service", "document signing",
    "lead scoring", "customer portal", "chat assistant", "form builder",
    "backup manager", "password vault", "meeting notes", "task board",
    "knowledge base", "social listening", "data connector", "report builder",
    "budget planner", "shift scheduler", "learning hub", "sms gateway",
    "translation", "quote builder", "ticketing", "analytics", "compliance",
    "ecommerce connector", "calendar sync", "workflow automation",
    "power bi connector", "dynamics 365 connector", "teams bot",
    "sharepoint migration", "identity manager", "onboarding", "recruiting",
    "route planner", "warehouse", "pos integration", "erp bridge",
]
SUFFIXES = ["", "", "", "pro", "lite", "360", "cloud", "for teams", "plus",
            "enterprise", "online", "2", "express", "suite"]


def make_catalog(rng, count):
    brands = list(BRANDS)
    while len(brands) < 140:
        b = rng.choice(SYLLABLES) + rng.choice(SYLLABLES + ENDINGS)
        if b not in brands:
            brands.append(b)
    names = set()
    while len(names) < count:
        parts = [rng.choice(brands), rng.choice(PRODUCTS), rng.choice(SUFFIXES)]
        name = " ".join(p for p in parts if p)
        if len(name) <= 32:
            names.add(name)
    out = sorted(names)
    rng.shuffle(out)
    return out


# --------------------------------------------------------------------------
# Corpora


def noisy_pairs(words, profile, rng, count):
    """(wrong, correct) pairs: mostly single edits, some multi-edit and identical."""
    pairs = []
    for _ in range(count):
        w = rng.choice(words)
        r = rng.random()
        if r < 0.05:
            pairs.append((typo(w, profile, rng, edits=2), w))
        elif r < 0.07:
            pairs.append((w, w))
        else:
            pairs.append((typo(w, profile, rng), w))
    return pairs


def write_github(path, words, rng):
    profile = PROFILES["github"]
    fillers = ["fix", "the", "in", "docs", "readme", "comment", "update", "of", "for", "typo"]
    with open(path, "w", encoding="utf-8") as out:
        out.write("# synthetic stand-in; github-like profile; see scripts/make_fixtures.py\n")
        for n in range(2500):
            edits = []
            for _ in range(rng.choice([1, 1, 1, 2, 3])):
                w = rng.choice(words)
                sentence = [rng.choice(fillers) for _ in range(rng.randint(2, 6))]
                at = rng.randint(0, len(sentence))
                r = rng.random()
                if r < 0.04:
                    wrong, is_typo = rng.choice(words), False
                elif r < 0.08:
                    wrong, is_typo = typo(w, profile, rng, edits=2), True
                else:
                    wrong, is_typo = typo(w, profile, rng), True
                src = sentence[:at] + [wrong] + sentence[at:]
                tgt = sentence[:at] + [w] + sentence[at:]
                edits.append({"src": {"text": " ".join(src), "lang": "eng"},
                              "tgt": {"text": " ".join(tgt), "lang": "eng"},
                              "is_typo": is_typo})
            record = {"repo": "example/repo%d" % (n % 97), "commit": "%040x" % rng.getrandbits(160),
                      "edits": edits}
            out.write(json.dumps(record, sort_keys=True) + "\n")
        out.write("{not json\n")


def write_twitter(path, words, rng):
    pairs = noisy_pairs(words, PROFILES["twitter"], rng, 3000)
    with open(path, "w", encoding="utf-8") as out:
        out.write("# synthetic stand-in; twitter-like profile; typo<TAB>correction<TAB>context\n")
        for wrong, correct in pairs:
            out.write("%s\t%s\tctx%d\n" % (wrong, correct, rng.randint(0, 9999)))
        out.write("lonely-column\n")
        out.write("café\tcafe\tutf8\n")


def write_tsv(path, words, profile_name, rng, count, weighted):
    pairs = noisy_pairs(words, PROFILES[profile_name], rng, count)
    with open(path, "w", encoding="utf-8") as out:
        out.write("# synthetic stand-in; %s profile; wrong<TAB>correct%s\n"
                  % (profile_name, "<TAB>count" if weighted else ""))
        for wrong, correct in pairs:
            if weighted:
                out.write("%s\t%s\t%d\n" % (wrong, correct, rng.choice([1, 1, 1, 2, 3, 5])))
            else:
                out.write("%s\t%s\n" % (wrong, correct))
        out.write("bad\tline\tnot-a-number\n")


def main():
    parser = argparse.ArgumentParser(description="generate catalog and stand-in corpora")
    parser.add_argument("--dictionary", default="data/dictionaries/en_top20k.tsv")
    parser.add_argument("--out", default="data")
    parser.add_argument("--seed", type=int, default=20240611)
    args = parser.parse_args()

    catalog_dir = os.path.join(args.out, "catalog")
    corpus_dir = os.path.join(args.out, "corpora")
    os.makedirs(catalog_dir, exist_ok=True)
    os.makedirs(corpus_dir, exist_ok=True)

    rng = random.Random(args.seed)
    catalog = make_catalog(rng, 1000)
    with open(os.path.join(catalog_dir, "catalog_1000.txt"), "w", encoding="utf-8") as out:
        out.write("# synthetic marketplace product names\n")
        out.write("\n".join(catalog) + "\n")
    with open(os.path.join(catalog_dir, "desk_200.txt"), "w", encoding="utf-8") as out:
        out.write("# first 200 entries of catalog_1000.txt\n")
        out.write("\n".join(catalog[:200]) + "\n")

    english_a = load_words(args.dictionary, 100, 8000, 4)
    english_b = load_words(args.dictionary, 8000, 20000, 4)
    tokens = sorted({t for name in catalog for t in name.split() if len(t) >= 3 and t.isalpha()})

    write_github(os.path.join(corpus_dir, "github.jsonl"), english_a, random.Random(args.seed + 1))
    write_twitter(os.path.join(corpus_dir, "twitter.tsv"), english_a, random.Random(args.seed + 2))
    write_tsv(os.path.join(corpus_dir, "marketplace.tsv"), tokens + english_a[:2000], "marketplace",
              random.Random(args.seed + 3), 2500, weighted=True)
    write_tsv(os.path.join(corpus_dir, "heldout.tsv"), english_b, "heldout",
              random.Random(args.seed + 4), 3000, weighted=False)


if __name__ == "__main__":
    main()
