#!/usr/bin/env python3
"""Plot a run directory written by `distopt report` (or `distopt run`).

    plot_run.py RUN_DIR [--output plot.png]
    plot_run.py --roundtrip RUN_DIR OUT_DIR

--roundtrip parses factors.csv and objectives.csv and writes them back to
OUT_DIR unchanged in content; the test suite uses it to check that the
columns survive this script without loss.
"""
import argparse
import csv
import os
import sys

FACTOR_COLUMNS = ["iteration", "class", "factor_normalized"]
OBJECTIVE_COLUMNS = ["iteration", "class", "mean", "mean_avg"]


def read_table(path, columns):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != columns:
            sys.exit(f"{path}: expected columns {columns}, got {reader.fieldnames}")
        rows = []
        for row in reader:
            parsed = {"iteration": int(row["iteration"]), "class": row["class"]}
            for key in columns[2:]:
                parsed[key] = float(row[key])
            rows.append(parsed)
        return rows


def write_table(path, columns, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            # repr() is the shortest text that reads back to the same double.
            writer.writerow([row["iteration"], row["class"]] + [repr(row[k]) for k in columns[2:]])


def by_class(rows, key):
    series = {}
    for row in rows:
        series.setdefault(row["class"], ([], []))
        series[row["class"]][0].append(row["iteration"])
        series[row["class"]][1].append(row[key])
    return series


def plot(run_dir, output):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    factors = read_table(os.path.join(run_dir, "factors.csv"), FACTOR_COLUMNS)
    objectives = read_table(os.path.join(run_dir, "objectives.csv"), OBJECTIVE_COLUMNS)

    fig, (top, bottom) = plt.subplots(2, 1, figsize=(9, 8), sharex=True)
    for name, (x, y) in sorted(by_class(objectives, "mean").items()):
        top.plot(x, y, label=name, linewidth=1)
    avg = {}
    for row in objectives:
        avg[row["iteration"]] = row["mean_avg"]
    top.plot(sorted(avg), [avg[k] for k in sorted(avg)], "k--", label="mean", linewidth=1.5)
    top.set_ylabel("objective (window mean)")
    top.legend(fontsize="small", ncol=2)

    for name, (x, y) in sorted(by_class(factors, "factor_normalized").items()):
        bottom.plot(x, y, label=name, linewidth=1)
    bottom.set_ylabel("normalized factor")
    bottom.set_xlabel("iteration")
    fig.tight_layout()
    fig.savefig(output, dpi=120)


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("run_dir")
    parser.add_argument("out_dir", nargs="?")
    parser.add_argument("--roundtrip", action="store_true")
    parser.add_argument("--output", default=None)
    args = parser.parse_args()

    if args.roundtrip:
        if not args.out_dir:
            parser.error("--roundtrip needs OUT_DIR")
        os.makedirs(args.out_dir, exist_ok=True)
        for name, columns in (("factors.csv", FACTOR_COLUMNS), ("objectives.csv", OBJECTIVE_COLUMNS)):
            rows = read_table(os.path.join(args.run_dir, name), columns)
            write_table(os.path.join(args.out_dir, name), columns, rows)
        return
    plot(args.run_dir, args.output or os.path.join(args.run_dir, "plot.png"))


if __name__ == "__main__":
    main()
