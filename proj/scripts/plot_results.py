#!/usr/bin/env python3
# Copyright 2026 The flsim Authors
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
"""Quick-look plots of flsim CSV output.

Usage: plot_results.py <csv> [--x COLUMN] [--y COLUMN ...] [--out FILE]
"""

import argparse
import csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def read_table(path):
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    names, units, data = rows[0], rows[1], rows[2:]
    columns = {n: [float(r[i]) for r in data] for i, n in enumerate(names)}
    return names, dict(zip(names, units)), columns


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("csv")
    parser.add_argument("--x", help="column for the horizontal axis (default: first)")
    parser.add_argument("--y", nargs="*", help="columns to plot (default: all others)")
    parser.add_argument("--out", help="output image (default: <csv>.png)")
    args = parser.parse_args()

    names, units, cols = read_table(args.csv)
    x = args.x or names[0]
    ys = args.y or [n for n in names if n != x]
    fig, ax = plt.subplots(figsize=(6, 4))
    for y in ys:
        ax.plot(cols[x], cols[y], label=y)
    ax.set_xlabel(f"{x} [{units[x]}]")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out or args.csv + ".png", dpi=150)


if __name__ == "__main__":
    main()
