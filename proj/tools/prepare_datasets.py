#!/usr/bin/env python3
"""Assemble the benchmark CSV files used by the acceptance checks.

The published source files are not bundled with this repository; download
them first (they are distributed with "The Elements of Statistical Learning",
https://hastie.su.domains/ElemStatLearn/datasets/) and point --source-dir at
the directory that holds them:

    vowel.train, vowel.test      -> data/vowel.csv
    spam.data, spam.traintest    -> data/spam.csv
    zip.train, zip.test          -> data/zipusps.csv   (.gz also accepted)

Each output is a single CSV with a `label` column, a `predefined` column
("train" or "test", the published split), and one column per feature. Feature
cells are copied verbatim from the sources, so no precision is lost.
"""

import argparse
import csv
import gzip
import sys
from pathlib import Path


def fail(message: str) -> None:
    sys.exit(f"error: {message}")


def open_source(source_dir: Path, name: str):
    """Open a source file as text, accepting a gzipped variant."""
    plain = source_dir / name
    if plain.exists():
        return plain.open("r", newline="")
    gz = source_dir / (name + ".gz")
    if gz.exists():
        return gzip.open(gz, "rt", newline="")
    fail(f"{plain} not found (nor {gz.name}); see the module docstring for sources")


def write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    print(f"wrote {path}: {len(rows)} rows, {len(header)} columns")


def prepare_vowel(source_dir: Path, out_dir: Path) -> None:
    """vowel.train/vowel.test: CSV with row.names, y, x.1..x.10."""
    rows: list[list[str]] = []
    feature_names: list[str] = []
    for name, split in (("vowel.train", "train"), ("vowel.test", "test")):
        with open_source(source_dir, name) as handle:
            reader = csv.reader(handle)
            header = next(reader)
            if header[:2] != ["row.names", "y"]:
                fail(f"{name}: unexpected header {header[:2]}, wanted row.names,y")
            if not feature_names:
                feature_names = header[2:]
            elif feature_names != header[2:]:
                fail(f"{name}: feature columns differ from vowel.train")
            for record in reader:
                if len(record) != 2 + len(feature_names):
                    fail(f"{name}: row with {len(record)} fields")
                rows.append([record[1], split] + record[2:])
    if len(rows) != 990:
        fail(f"vowel: expected 990 rows total, got {len(rows)}")
    write_csv(out_dir / "vowel.csv", ["label", "predefined"] + feature_names, rows)


def prepare_spam(source_dir: Path, out_dir: Path) -> None:
    """spam.data: 57 whitespace-separated features + 0/1 label per row.
    spam.traintest: one 0/1 per row; the majority value (3065) is the
    published training half."""
    with open_source(source_dir, "spam.data") as handle:
        data = [line.split() for line in handle if line.strip()]
    with open_source(source_dir, "spam.traintest") as handle:
        indicator = [line.strip() for line in handle if line.strip()]
    if len(data) != 4601 or len(indicator) != 4601:
        fail(f"spam: expected 4601 rows, got {len(data)} data / {len(indicator)} indicator")
    counts = {value: indicator.count(value) for value in set(indicator)}
    if sorted(counts.values()) != [1536, 3065]:
        fail(f"spam.traintest: unexpected split sizes {counts}")
    train_value = max(counts, key=counts.get)
    rows = []
    for record, flag in zip(data, indicator):
        if len(record) != 58:
            fail(f"spam.data: row with {len(record)} fields, wanted 58")
        label = {"0": "nonspam", "1": "spam"}.get(record[-1])
        if label is None:
            fail(f"spam.data: unexpected label {record[-1]!r}")
        split = "train" if flag == train_value else "test"
        rows.append([label, split] + record[:-1])
    header = ["label", "predefined"] + [f"f{j}" for j in range(1, 58)]
    write_csv(out_dir / "spam.csv", header, rows)


def prepare_zipusps(source_dir: Path, out_dir: Path) -> None:
    """zip.train/zip.test: digit label then 256 gray values per row."""
    rows = []
    for name, split, expected in (("zip.train", "train", 7291), ("zip.test", "test", 2007)):
        count = 0
        with open_source(source_dir, name) as handle:
            for line in handle:
                record = line.split()
                if not record:
                    continue
                if len(record) != 257:
                    fail(f"{name}: row with {len(record)} fields, wanted 257")
                digit = int(float(record[0]))
                rows.append([str(digit), split] + record[1:])
                count += 1
        if count != expected:
            fail(f"{name}: expected {expected} rows, got {count}")
    header = ["label", "predefined"] + [f"p{j}" for j in range(1, 257)]
    write_csv(out_dir / "zipusps.csv", header, rows)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--source-dir", type=Path, required=True,
                        help="directory holding the downloaded source files")
    parser.add_argument("--out-dir", type=Path, default=Path(__file__).parent.parent / "data",
                        help="where to write the assembled CSVs (default: <repo>/data)")
    parser.add_argument("--only", choices=["vowel", "spam", "zipusps"],
                        help="assemble a single dataset instead of all three")
    args = parser.parse_args()

    steps = {"vowel": prepare_vowel, "spam": prepare_spam, "zipusps": prepare_zipusps}
    for name, step in steps.items():
        if args.only and name != args.only:
            continue
        step(args.source_dir, args.out_dir)


if __name__ == "__main__":
    main()
