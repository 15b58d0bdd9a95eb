"""Readers and writers for market files, path CSVs and result tables."""

import csv
import json
from pathlib import Path

import numpy as np

from ._validation import check_price_relatives
from .market import DiscreteMarket, validate_market

FLOAT_FMT = "{:.12g}"


def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return FLOAT_FMT.format(float(x))


def read_market(path):
    """Load a market from JSON with keys ``samples``, ``pmf1``, ``pmf2`` (``pmf3``, ...).

    A ``pmfs`` list may be given instead of numbered keys.
    """
    with open(path) as fh:
        data = json.load(fh)
    if "samples" not in data:
        raise ValueError(f"{path}: market file needs a 'samples' key")
    if "pmfs" in data:
        pmfs = data["pmfs"]
    else:
        pmfs = []
        i = 1
        while f"pmf{i}" in data:
            pmfs.append(data[f"pmf{i}"])
            i += 1
    if len(pmfs) < 2:
        raise ValueError(f"{path}: market file needs at least 'pmf1' and 'pmf2'")
    return validate_market(DiscreteMarket(np.asarray(data["samples"], dtype=float),
                                          tuple(np.asarray(p, dtype=float) for p in pmfs)))


def write_market(market, path):
    with open(path, "w") as fh:
        json.dump(market.to_dict(), fh, indent=2)
        fh.write("\n")


def read_path(path):
    """Load a ``period,x1,x2[,...]`` CSV as an ``(n, m)`` array."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[0].strip() != "period" or len(header) < 3:
            raise ValueError(f"{path}: expected header 'period,x1,x2[,...]'")
        m = len(header) - 1
        rows = [[float(v) for v in row[1:]] for row in reader if row]
    X = np.asarray(rows, dtype=float).reshape(len(rows), m)
    return check_price_relatives(X, n_assets=m)


def write_path(X, path):
    X = np.asarray(X, dtype=float)
    m = X.shape[1] if X.ndim == 2 else 2
    write_table(path, ["period"] + [f"x{i}" for i in range(1, m + 1)],
                ([n] + list(row) for n, row in enumerate(X, start=1)))


def write_table(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def write_frame(df, path):
    write_table(path, list(df.columns), df.itertuples(index=False, name=None))


def ensure_dir(path):
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p
