"""Splittable seed streams.

One root seed expands into named, structurally independent substreams, one per
stochastic component ("W", "B", "Z", "U") and per path index.  Streams are
derived through counter-style spawn keys fed to a counter-based bit generator
(Philox), so independence between components is guaranteed by construction
rather than by consumption order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Fixed component ids; extending the table is fine, reordering it is not,
# because ids enter the spawn key and hence the generated numbers.
COMPONENT_IDS = {"W": 0, "B": 1, "Z": 2, "U": 3}


@dataclass(frozen=True)
class SeedInfo:
    """Seed record attached to every generated path: root seed plus path index."""

    root: int
    path_index: int = 0

    def __post_init__(self):
        if self.root < 0 or self.path_index < 0:
            raise ValueError("seed root and path_index must be nonnegative integers")

    def for_path(self, path_index: int) -> "SeedInfo":
        return SeedInfo(self.root, path_index)

    def to_dict(self) -> dict:
        return {"root": int(self.root), "path_index": int(self.path_index)}

    @staticmethod
    def from_dict(d: dict) -> "SeedInfo":
        return SeedInfo(int(d["root"]), int(d.get("path_index", 0)))


def as_seed(seed) -> SeedInfo:
    """Coerce an int or SeedInfo into a SeedInfo."""
    if isinstance(seed, SeedInfo):
        return seed
    if isinstance(seed, (int, np.integer)):
        return SeedInfo(int(seed))
    raise TypeError(f"seed must be an int or SeedInfo, got {type(seed).__name__}")


def component_rng(seed, component: str) -> np.random.Generator:
    """Generator for one named component substream of one path.

    Identical (seed, component) always yields an identical stream; distinct
    components or path indices yield independent streams.
    """
    info = as_seed(seed)
    try:
        comp_id = COMPONENT_IDS[component]
    except KeyError:
        raise ValueError(f"unknown component {component!r}; known: {sorted(COMPONENT_IDS)}") from None
    ss = np.random.SeedSequence(info.root, spawn_key=(comp_id, info.path_index))
    return np.random.Generator(np.random.Philox(ss))
