"""Community detectors behind one interface: ``detect(g, config) -> Cover``."""

from __future__ import annotations

from dataclasses import dataclass, replace

from ..graph import Graph
from .bigclam import detect_bigclam
from .cover import Cover, cover_from_labels, cover_from_sets, modularity
from .demon import detect_demon
from .gn import detect_gn
from .infomap import detect_infomap, map_equation
from .kclique import detect_kclique
from .lpa import detect_lpa

NON_OVERLAPPING = ("infomap", "gn", "lpa")
OVERLAPPING = ("demon", "kclique", "bigclam")
ALGORITHMS = NON_OVERLAPPING + OVERLAPPING

DISPLAY_NAMES = {
    "infomap": "Infomap",
    "gn": "GN",
    "lpa": "LPA",
    "demon": "DEMON",
    "kclique": "K-clique",
    "bigclam": "BigCLAM",
}


@dataclass(frozen=True)
class DetectorConfig:
    algorithm: str = "infomap"
    seed: int | None = None
    k: int = 3
    epsilon_merge: float = 0.25
    num_communities: int | None = None
    max_iter: int = 500

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown detector {self.algorithm!r}; choose from {', '.join(ALGORITHMS)}")
        if self.k < 3:
            raise ValueError("k must be >= 3")
        if not 0.0 <= self.epsilon_merge <= 1.0:
            raise ValueError("epsilon_merge must lie in [0, 1]")
        if self.num_communities is not None and self.num_communities < 1:
            raise ValueError("num_communities must be >= 1")

    @property
    def overlapping(self) -> bool:
        return self.algorithm in OVERLAPPING

    def with_seed(self, seed) -> "DetectorConfig":
        return replace(self, seed=seed)


def detect(g: Graph, config: DetectorConfig) -> Cover:
    a = config.algorithm
    if a == "lpa":
        return detect_lpa(g, seed=config.seed)
    if a == "gn":
        return detect_gn(g)
    if a == "infomap":
        return detect_infomap(g, seed=config.seed)
    if a == "demon":
        return detect_demon(g, epsilon_merge=config.epsilon_merge, seed=config.seed)
    if a == "kclique":
        return detect_kclique(g, k=config.k)
    return detect_bigclam(g, num_communities=config.num_communities, seed=config.seed, max_iter=config.max_iter)


__all__ = [
    "ALGORITHMS",
    "Cover",
    "DetectorConfig",
    "cover_from_labels",
    "cover_from_sets",
    "detect",
    "detect_bigclam",
    "detect_demon",
    "detect_gn",
    "detect_infomap",
    "detect_kclique",
    "detect_lpa",
    "map_equation",
    "modularity",
]
