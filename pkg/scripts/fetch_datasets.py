"""Download the external networks into ``$RCDMAP_DATA`` (default ./data).

    python scripts/fetch_datasets.py [jazz email wiki]

Each archive is converted to a plain whitespace edge list that
``rcdmap.datasets.load`` reads. Karate ships with the package.
"""

import argparse
import gzip
import io
import os
import sys
import urllib.request
import zipfile
from pathlib import Path

SOURCES = {
    "jazz": ("https://deim.urv.cat/~alexandre.arenas/data/xarxes/jazz.zip", "jazz.txt"),
    "email": ("https://deim.urv.cat/~alexandre.arenas/data/xarxes/email.zip", "email.txt"),
    "wiki": ("https://snap.stanford.edu/data/wiki-Vote.txt.gz", "wiki-vote.txt"),
}


def _pajek_arcs(text):
    # Arenas' files are Pajek .net: a *Vertices header then *Arcs/*Edges rows
    in_edges = False
    for line in text.splitlines():
        low = line.strip().lower()
        if low.startswith("*"):
            in_edges = low.startswith(("*arcs", "*edges"))
            continue
        if in_edges and low:
            u, v = low.split()[:2]
            yield u, v


def _plain(text):
    for line in text.splitlines():
        if line.strip() and not line.startswith("#"):
            u, v = line.split()[:2]
            yield u, v


def convert(name, payload):
    if name == "wiki":
        return _plain(gzip.decompress(payload).decode())
    with zipfile.ZipFile(io.BytesIO(payload)) as zf:
        member = next(n for n in zf.namelist() if n.endswith((".net", ".txt")))
        text = zf.read(member).decode(errors="replace")
    return _pajek_arcs(text) if member.endswith(".net") else _plain(text)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("names", nargs="*", default=list(SOURCES), choices=list(SOURCES))
    args = ap.parse_args(argv)
    dest = Path(os.environ.get("RCDMAP_DATA", "data"))
    dest.mkdir(parents=True, exist_ok=True)
    status = 0
    for name in args.names:
        url, filename = SOURCES[name]
        try:
            with urllib.request.urlopen(url, timeout=60) as resp:
                payload = resp.read()
        except OSError as exc:
            print(f"{name}: download failed ({exc})", file=sys.stderr)
            status = 1
            continue
        edges = list(convert(name, payload))
        (dest / filename).write_text("".join(f"{u} {v}\n" for u, v in edges))
        print(f"{name}: {len(edges)} edges -> {dest / filename}")
    return status


if __name__ == "__main__":
    sys.exit(main())
