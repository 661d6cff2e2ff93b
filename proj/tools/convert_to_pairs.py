#!/usr/bin/env python3
# Copyright 2026 The skc Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Convert common public dataset dumps to the skc pairs format.

Inputs (plain or .gz):
  libsvm   "<label> idx:val idx:val ..."; indices 1-based by default
  docword  UCI bag-of-words: three header lines (D, W, NNZ), then "doc word count"
  csv      dense rows; --drop-column removes a label column

Output is 0-based `j:v` pairs, one point per line. The dimension to pass as
--dim is printed on stderr.
"""

import argparse
import csv
import gzip
import sys


def open_text(path):
    if path == "-":
        return sys.stdin
    with open(path, "rb") as f:
        magic = f.read(2)
    if magic == b"\x1f\x8b":
        return gzip.open(path, "rt", newline="")
    return open(path, "r", newline="")


def fmt(v):
    return repr(float(v)) if not float(v).is_integer() else str(int(float(v)))


def emit(out, entries):
    # The zero vector is written as a bare weight token.
    line = " ".join(f"{j}:{fmt(v)}" for j, v in sorted(entries) if float(v) != 0.0)
    out.write((line or "w=1") + "\n")


def convert_libsvm(src, out, base):
    dim = 0
    for lineno, line in enumerate(src, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if ":" in tokens[0] and not tokens[0].startswith("qid"):
            raise ValueError(f"line {lineno}: missing label")
        entries = {}
        for tok in tokens[1:]:
            key, _, val = tok.partition(":")
            if key == "qid":
                continue
            j = int(key) - base
            if j < 0:
                raise ValueError(f"line {lineno}: index {key} below base {base}")
            entries[j] = val
            dim = max(dim, j + 1)
        emit(out, entries.items())
    return dim


def convert_docword(src, out):
    header = [int(next(src)) for _ in range(3)]
    dim = header[1]
    doc, entries = None, []
    for line in src:
        parts = line.split()
        if not parts:
            continue
        d, w, c = int(parts[0]), int(parts[1]), parts[2]
        if doc is not None and d != doc:
            emit(out, entries)
            entries = []
        doc = d
        entries.append((w - 1, c))
    if doc is not None:
        emit(out, entries)
    return dim


def convert_csv(src, out, drop, header):
    dim = None
    reader = csv.reader(src)
    if header:
        next(reader, None)
    for lineno, row in enumerate(reader, 1):
        if not row:
            continue
        if drop is not None:
            del row[drop]
        if dim is None:
            dim = len(row)
        elif len(row) != dim:
            raise ValueError(f"row {lineno}: {len(row)} columns, expected {dim}")
        emit(out, ((j, v) for j, v in enumerate(row)))
    return dim or 0


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("kind", choices=["libsvm", "docword", "csv"])
    ap.add_argument("input", help="input path, or - for stdin")
    ap.add_argument("-o", "--output", default="-")
    ap.add_argument("--index-base", type=int, default=1, help="libsvm index base (default 1)")
    ap.add_argument("--drop-column", type=int, help="csv column to discard, e.g. a label")
    ap.add_argument("--header", action="store_true", help="csv has a header row")
    args = ap.parse_args(argv)

    out = sys.stdout if args.output == "-" else open(args.output, "w")
    try:
        with open_text(args.input) as src:
            if args.kind == "libsvm":
                dim = convert_libsvm(src, out, args.index_base)
            elif args.kind == "docword":
                dim = convert_docword(src, out)
            else:
                dim = convert_csv(src, out, args.drop_column, args.header)
    except (OSError, ValueError, StopIteration) as e:
        print(f"convert_to_pairs: {e}", file=sys.stderr)
        return 3
    finally:
        if out is not sys.stdout:
            out.close()
    print(f"dim={dim}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
