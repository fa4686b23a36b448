#!/usr/bin/env python3
"""Fetch the original Wisconsin breast-cancer data file (UCI format).

Tries the UCI repository mirrors first; if the network is unavailable but
the `pydataset` package is installed, rebuilds the file from R's `biopsy`
table (same 699 records, 16 rows with the '?' missing marker).

Usage: python3 scripts/fetch_wbc.py [DEST_DIR]   (default: ./data)
"""

import sys
import urllib.request
from pathlib import Path

URLS = [
    "https://archive.ics.uci.edu/ml/machine-learning-databases/"
    "breast-cancer-wisconsin/breast-cancer-wisconsin.data",
    "https://archive.ics.uci.edu/static/public/15/data.csv",
]

EXPECTED_ROWS = 699
EXPECTED_MISSING = 16


def verify(text: str) -> None:
    rows = [r for r in text.strip().splitlines() if r.strip()]
    if len(rows) != EXPECTED_ROWS:
        raise ValueError(f"expected {EXPECTED_ROWS} rows, got {len(rows)}")
    missing = sum("?" in r for r in rows)
    if missing != EXPECTED_MISSING:
        raise ValueError(f"expected {EXPECTED_MISSING} rows with '?', "
                         f"got {missing}")
    for r in rows:
        if len(r.split(",")) != 11:
            raise ValueError(f"malformed row: {r!r}")


def from_uci() -> str | None:
    for url in URLS:
        try:
            with urllib.request.urlopen(url, timeout=30) as resp:
                text = resp.read().decode("utf-8")
        except Exception as exc:  # noqa: BLE001
            print(f"  {url}: {exc}")
            continue
        if url.endswith("data.csv"):
            # the newer UCI export has a header and unquoted NA cells
            lines = text.strip().splitlines()[1:]
            text = "\n".join(line.replace("NA", "?") for line in lines)
        try:
            verify(text)
            return text
        except ValueError as exc:
            print(f"  {url}: {exc}")
    return None


def from_pydataset() -> str | None:
    try:
        from pydataset import data
    except ImportError:
        return None
    df = data("biopsy")
    lines = []
    for _, row in df.iterrows():
        sample_id = str(row["ID"]).strip('"')
        feats = []
        for col in [f"V{i}" for i in range(1, 10)]:
            v = row[col]
            feats.append("?" if v != v else str(int(v)))  # NaN -> '?'
        label = "2" if row["class"] == "benign" else "4"
        lines.append(",".join([sample_id, *feats, label]))
    text = "\n".join(lines)
    verify(text)
    return text


def main() -> int:
    dest_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("data")
    dest = dest_dir / "breast-cancer-wisconsin.data"
    if dest.exists():
        print(f"{dest} already present")
        return 0
    print("trying UCI mirrors...")
    text = from_uci()
    if text is None:
        print("trying pydataset fallback...")
        text = from_pydataset()
    if text is None:
        print("could not obtain the data file: no network and pydataset "
              "not installed.\nObtain breast-cancer-wisconsin.data manually "
              f"and place it at {dest}")
        return 1
    dest_dir.mkdir(parents=True, exist_ok=True)
    dest.write_text(text + "\n")
    print(f"wrote {dest} ({EXPECTED_ROWS} rows, {EXPECTED_MISSING} with "
          f"missing values)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
