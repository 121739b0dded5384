#!/usr/bin/env python3
"""Export the top-N words of pyspellchecker's English frequency list as TSV.

pyspellchecker (MIT licensed) ships `resources/en.json.gz`, a JSON object
mapping words to corpus counts. Only lowercase a-z words are kept.

    pip download pyspellchecker==0.9.1 --no-deps
    python3 scripts/export_dictionary.py path/to/en.json.gz \
        data/dictionaries/en_top20k.tsv --top 20000
"""

import argparse
import gzip
import json
import re


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("source", help="pyspellchecker en.json.gz")
    parser.add_argument("output", help="word<TAB>frequency output file")
    parser.add_argument("--top", type=int, default=20000)
    args = parser.parse_args()

    with gzip.open(args.source, "rt", encoding="utf-8") as fh:
        counts = json.load(fh)

    word_re = re.compile(r"^[a-z]+$")
    words = [(w, int(c)) for w, c in counts.items() if word_re.match(w) and int(c) > 0]
    words.sort(key=lambda wc: (-wc[1], wc[0]))

    with open(args.output, "w", encoding="utf-8") as out:
        out.write("# Top {} words of pyspellchecker 0.9.1 en.json.gz (MIT)\n".format(args.top))
        for word, count in words[: args.top]:
            out.write("{}\t{}\n".format(word, count))


if __name__ == "__main__":
    main()
