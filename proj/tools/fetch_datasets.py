#!/usr/bin/env python3
"""Fetch the UCI datasets used by the acceptance suite into tests/data/.

Sources, in order of preference:
  * agaricus-lepiota.data   UCI mushroom (8124 rows), straight from the UCI archive
  * census-income.csv       UCI adult/census-income (48842 rows), from the UCI archive,
                            falling back to the copy bundled in the pytorch-widedeep wheel
  * mushroom-keel.csv       KEEL mushroom (UCI rows without missing values), from the
                            keel-ds wheel
"""
import csv
import io
import pathlib
import subprocess
import sys
import tempfile
import urllib.request
import zipfile

DATA = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data"

MUSHROOM_COLUMNS = [
    "cap-shape", "cap-surface", "cap-color", "bruises", "odor", "gill-attachment",
    "gill-spacing", "gill-size", "gill-color", "stalk-shape", "stalk-root",
    "stalk-surface-above-ring", "stalk-surface-below-ring", "stalk-color-above-ring",
    "stalk-color-below-ring", "veil-type", "veil-color", "ring-number", "ring-type",
    "spore-print-color", "population", "habitat",
]
CENSUS_COLUMNS = [
    "age", "workclass", "fnlwgt", "education", "education-num", "marital-status",
    "occupation", "relationship", "race", "sex", "capital-gain", "capital-loss",
    "hours-per-week", "native-country", "income",
]
UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"


def try_url(url):
    try:
        with urllib.request.urlopen(url, timeout=20) as r:
            return r.read()
    except Exception as e:  # noqa: BLE001
        print(f"  unreachable: {url} ({e})", file=sys.stderr)
        return None


def wheel(package, version):
    tmp = pathlib.Path(tempfile.mkdtemp())
    subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps", "-q", "-d", str(tmp),
                    f"{package}=={version}"], check=True)
    return zipfile.ZipFile(next(tmp.glob("*.whl")))


def mushroom_uci():
    out = DATA / "agaricus-lepiota.data"
    if out.exists():
        return
    raw = try_url(f"{UCI}/mushroom/agaricus-lepiota.data")
    if raw:
        out.write_bytes(raw)
        print(f"wrote {out}")
    else:
        print("UCI mushroom unavailable; the full-mushroom acceptance check will report it")


def mushroom_keel():
    out = DATA / "mushroom-keel.csv"
    if out.exists():
        return
    z = wheel("keel-ds", "0.2.5")
    lines = z.read("keel_ds/data/balanced/raw/mushroom.dat").decode().splitlines()
    with out.open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(MUSHROOM_COLUMNS + ["class"])
        for line in lines:
            if line.strip():
                w.writerow(line.strip().split(","))
    print(f"wrote {out}")


def census():
    out = DATA / "census-income.csv"
    if out.exists():
        return
    rows = []
    train = try_url(f"{UCI}/adult/adult.data")
    test = try_url(f"{UCI}/adult/adult.test")
    if train and test:
        for blob in (train, test):
            for line in blob.decode().splitlines():
                if not line.strip() or line.startswith("|"):
                    continue
                cells = [c.strip() for c in line.split(",")]
                cells[-1] = cells[-1].rstrip(".")
                rows.append(cells)
    else:
        import pandas as pd
        z = wheel("pytorch-widedeep", "1.7.0")
        df = pd.read_parquet(io.BytesIO(z.read("pytorch_widedeep/datasets/data/adult.parquet.brotli")))
        rows = [[str(v) for v in r] for r in df.itertuples(index=False)]
    with out.open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(CENSUS_COLUMNS)
        w.writerows(rows)
    print(f"wrote {out} ({len(rows)} rows)")


if __name__ == "__main__":
    DATA.mkdir(parents=True, exist_ok=True)
    mushroom_uci()
    mushroom_keel()
    census()
