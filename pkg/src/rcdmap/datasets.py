"""Bundled and locally available benchmark networks."""

from __future__ import annotations

import os
from importlib import resources
from pathlib import Path

from .community import Cover, cover_from_sets
from .graph import Graph, largest_connected_component, read_edge_list

DATA_ENV = "RCDMAP_DATA"

# files looked up under $RCDMAP_DATA (see scripts/fetch_datasets.py)
EXTERNAL = {
    "jazz": "jazz.txt",
    "email": "email.txt",
    "wiki": "wiki-vote.txt",
}

# Three-module split of the karate club used for the worked example: the
# 0-led faction, the satellite around 5/6, and the 33-led faction.
KARATE_THREE_COMMUNITIES = (
    (0, 1, 2, 3, 7, 11, 12, 13, 17, 19, 21),
    (4, 5, 6, 10, 16),
    (8, 9, 14, 15, 18, 20, 22, 23, 24, 25, 26, 27, 28, 29, 30, 31, 32, 33),
)


def karate() -> Graph:
    with resources.as_file(resources.files("rcdmap") / "data" / "karate.txt") as p:
        return read_edge_list(p)


def karate_planted_cover() -> Cover:
    return cover_from_sets(34, KARATE_THREE_COMMUNITIES, overlapping=False)


def data_dir() -> Path:
    return Path(os.environ.get(DATA_ENV, Path.cwd() / "data"))


def load(name: str) -> Graph:
    """Largest connected component of a named network, or of an edge-list path."""
    if name == "karate":
        return karate()
    if name in EXTERNAL:
        path = data_dir() / EXTERNAL[name]
        if not path.exists():
            raise FileNotFoundError(
                f"{name} network not found at {path}; run scripts/fetch_datasets.py or set {DATA_ENV}"
            )
    else:
        path = Path(name)
    return largest_connected_component(read_edge_list(path))
