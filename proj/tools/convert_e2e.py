#!/usr/bin/env python3
"""Convert the public E2E 5-way human ranking release to the rankings TSV.

The library ingests a fixed canonical format (``nlgqe ingest --format e2e``):

    mr<TAB>system_1<TAB>text_1<TAB>rank_1<TAB>... (up to 5 triples per line)

This adapter assumes the downloaded CSV has one row per ranking item with
  * an MR column in the E2E attribute style, e.g. ``name[The Vaults], eatType[pub]``
  * five (system, text, rank) column groups.
Column names differ between mirrors of the release, so they are flags rather
than hardcoded. Ranks must be 1 (best) to 5; ties are allowed and are dropped
later during ingestion. Tabs and newlines inside texts are replaced by
spaces, since the canonical format is tab-separated.

Example:
    tools/convert_e2e.py rankings.csv e2e.tsv \
        --mr-col mr \
        --system-cols sys1,sys2,sys3,sys4,sys5 \
        --text-cols text1,text2,text3,text4,text5 \
        --rank-cols rank1,rank2,rank3,rank4,rank5
"""

import argparse
import csv
import re
import sys

ATTR_RE = re.compile(r"\s*([^\[\],]+)\[([^\]]*)\]\s*")


def convert_mr(raw, intent):
    """``name[X], food[Y]`` -> ``inform(name='X', food='Y')``."""
    slots = []
    for part in ATTR_RE.finditer(raw):
        name = part.group(1).strip()
        value = part.group(2).strip().replace("'", "")
        slots.append("%s='%s'" % (name, value))
    if not slots:
        raise ValueError("unparseable MR: %r" % raw)
    return "%s(%s)" % (intent, ", ".join(slots))


def clean(text):
    return re.sub(r"\s+", " ", text).strip()


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("input", help="downloaded CSV file")
    ap.add_argument("output", help="rankings TSV to write")
    ap.add_argument("--mr-col", default="mr")
    ap.add_argument("--system-cols", default="sys1,sys2,sys3,sys4,sys5")
    ap.add_argument("--text-cols", default="text1,text2,text3,text4,text5")
    ap.add_argument("--rank-cols", default="rank1,rank2,rank3,rank4,rank5")
    ap.add_argument("--intent", default="inform",
                    help="dialogue-act intent for converted MRs")
    ap.add_argument("--delimiter", default=",")
    args = ap.parse_args()

    sys_cols = args.system_cols.split(",")
    text_cols = args.text_cols.split(",")
    rank_cols = args.rank_cols.split(",")
    if not (len(sys_cols) == len(text_cols) == len(rank_cols)):
        ap.error("system/text/rank column lists differ in length")

    n_rows = 0
    with open(args.input, newline="", encoding="utf-8") as fin, \
         open(args.output, "w", encoding="utf-8") as fout:
        header = ["mr"]
        for i in range(len(sys_cols)):
            header += ["system_%d" % (i + 1), "text_%d" % (i + 1),
                       "rank_%d" % (i + 1)]
        fout.write("\t".join(header) + "\n")
        for row in csv.DictReader(fin, delimiter=args.delimiter):
            fields = [convert_mr(row[args.mr_col], args.intent)]
            for s, t, r in zip(sys_cols, text_cols, rank_cols):
                rank = row[r].strip()
                int(rank)  # fail early on non-numeric ranks
                fields += [clean(row[s]), clean(row[t]), rank]
            fout.write("\t".join(fields) + "\n")
            n_rows += 1
    print("wrote %d ranking records to %s" % (n_rows, args.output),
          file=sys.stderr)


if __name__ == "__main__":
    main()
