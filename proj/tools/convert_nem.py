#!/usr/bin/env python3
"""Convert the public NEM rating release to the ratings TSV.

The library ingests a fixed canonical format (``nlgqe ingest --format nem``):

    mr<TAB>system<TAB>text<TAB>rating

This adapter assumes the downloaded CSV has one row per rated output with an
MR column in the E2E attribute style (``name[X], food[Y]``), a system id, the
output text, and a 1-6 quality rating. Column names are flags because they
differ between mirrors. If the release stores several judgements per output,
average them upstream or pass the per-judgement file; the toolkit treats each
row as one instance. Tabs and newlines inside texts become spaces.

Example:
    tools/convert_nem.py ratings.csv nem.tsv \
        --mr-col mr --system-col system --text-col output --rating-col quality
"""

import argparse
import csv
import sys

from convert_e2e import clean, convert_mr


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("input", help="downloaded CSV file")
    ap.add_argument("output", help="ratings TSV to write")
    ap.add_argument("--mr-col", default="mr")
    ap.add_argument("--system-col", default="system")
    ap.add_argument("--text-col", default="output")
    ap.add_argument("--rating-col", default="quality")
    ap.add_argument("--intent", default="inform")
    ap.add_argument("--delimiter", default=",")
    args = ap.parse_args()

    n_rows = 0
    with open(args.input, newline="", encoding="utf-8") as fin, \
         open(args.output, "w", encoding="utf-8") as fout:
        fout.write("mr\tsystem\ttext\trating\n")
        for row in csv.DictReader(fin, delimiter=args.delimiter):
            rating = row[args.rating_col].strip()
            float(rating)  # fail early on non-numeric ratings
            fout.write("\t".join([
                convert_mr(row[args.mr_col], args.intent),
                clean(row[args.system_col]),
                clean(row[args.text_col]),
                rating,
            ]) + "\n")
            n_rows += 1
    print("wrote %d rating records to %s" % (n_rows, args.output),
          file=sys.stderr)


if __name__ == "__main__":
    main()
