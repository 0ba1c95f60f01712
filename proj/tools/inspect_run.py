#!/usr/bin/env python3
"""Summarize a cdlab run directory: artifact inventory, solution extrema,
reference deviations, error/convergence tables, and optional ASCII plots.

Usage:
  python3 tools/inspect_run.py runs/fig1
  python3 tools/inspect_run.py runs/fig2 --plot eps1e-06_n100_solution.csv
"""

import argparse
import csv
import math
import os
import sys


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    parsed = []
    for row in body:
        out = []
        for cell in row:
            try:
                out.append(float(cell))
            except ValueError:
                out.append(cell)
        parsed.append(out)
    return header, parsed


def fmt(x):
    if isinstance(x, float):
        return "%.6g" % x
    return str(x)


def print_table(header, rows, indent="  "):
    cols = [header] + [[fmt(c) for c in r] for r in rows]
    widths = [max(len(row[i]) for row in cols) for i in range(len(header))]
    for row in cols:
        print(indent + "  ".join(cell.rjust(w) for cell, w in zip(row, widths)))


def summarize_solution(path):
    header, rows = read_csv(path)
    xs = [r[0] for r in rows]
    us = [r[1] for r in rows]
    print("  points=%d  x in [%g, %g]  %s in [%.6g, %.6g]"
          % (len(xs), xs[0], xs[-1], header[1], min(us), max(us)))
    for k in range(2, len(header)):
        dev = max(abs(r[1] - r[k]) for r in rows)
        print("  max |%s - %s| = %.6g" % (header[1], header[k], dev))


def summarize_generic(path):
    header, rows = read_csv(path)
    if len(rows) <= 12:
        print_table(header, rows)
    else:
        print_table(header, rows[:6])
        print("  ... (%d rows total)" % len(rows))
        print_table(header, rows[-3:])


def ascii_plot(path, width=72, height=18):
    header, rows = read_csv(path)
    xs = [r[0] for r in rows]
    series = list(range(1, len(header)))
    lo = min(min(r[k] for r in rows) for k in series)
    hi = max(max(r[k] for r in rows) for k in series)
    if hi == lo:
        hi = lo + 1.0
    grid = [[" "] * width for _ in range(height)]
    marks = "o+x*"
    for si, k in enumerate(series):
        for r in rows:
            col = round((r[0] - xs[0]) / (xs[-1] - xs[0] or 1.0) * (width - 1))
            row = round((hi - r[k]) / (hi - lo) * (height - 1))
            grid[row][col] = marks[si % len(marks)]
    print("  %s vs %s   [%.4g, %.4g]" % (", ".join(
        "%s(%s)" % (header[k], marks[i % len(marks)]) for i, k in enumerate(series)),
        header[0], lo, hi))
    for line in grid:
        print("  |" + "".join(line) + "|")
    print("  +" + "-" * width + "+")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("run_dir", help="run directory containing index.csv")
    ap.add_argument("--plot", metavar="FILE", action="append", default=[],
                    help="ASCII-plot a CSV from the run directory (repeatable)")
    args = ap.parse_args()

    index = os.path.join(args.run_dir, "index.csv")
    if not os.path.exists(index):
        sys.exit("no index.csv under %s" % args.run_dir)

    header, rows = read_csv(index)
    print("== index ==")
    print_table(header, rows)

    seen = set()
    for row in rows:
        name = row[3]
        if not name or name in seen:
            continue
        seen.add(name)
        path = os.path.join(args.run_dir, name)
        if not os.path.exists(path):
            print("\n== %s == (missing)" % name)
            continue
        print("\n== %s ==" % name)
        if "solution" in name or "section" in name:
            summarize_solution(path)
        else:
            summarize_generic(path)

    for name in args.plot:
        print("\n== plot %s ==" % name)
        ascii_plot(os.path.join(args.run_dir, name))


if __name__ == "__main__":
    main()
