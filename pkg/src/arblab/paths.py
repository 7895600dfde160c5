"""Sample paths: one D-dimensional realization on a time grid, plus export helpers."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .grids import TimeGrid
from .seeds import SeedInfo

PRICE = "price"
LOG_PRICE = "log-price"


@dataclass(frozen=True)
class SamplePath:
    """One realization of a D-dimensional process, immutable after construction.

    `values` has shape (D, steps+1), column i holding the state at grid time
    t_i.  `kind` tags whether values are prices or log-prices; `metadata`
    carries per-path scalars drawn at time 0 (for example the mixing weight U
    of the two-asset counterexample) and scheme counters.
    """

    grid: TimeGrid
    values: np.ndarray
    kind: str = PRICE
    seed: SeedInfo = SeedInfo(0)
    metadata: Mapping = field(default_factory=dict)

    def __post_init__(self):
        values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if values.shape[1] != self.grid.steps + 1:
            raise ValueError(
                f"values have {values.shape[1]} columns, grid has {self.grid.steps + 1} points"
            )
        if not np.isfinite(values).all():
            raise ValueError("path values must be finite")
        if self.kind not in (PRICE, LOG_PRICE):
            raise ValueError(f"kind must be {PRICE!r} or {LOG_PRICE!r}, got {self.kind!r}")
        if values.flags.writeable:
            values = values.copy()
            values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "metadata", MappingProxyType(dict(self.metadata)))

    @property
    def dims(self) -> int:
        return self.values.shape[0]

    def component(self, d: int = 0) -> np.ndarray:
        return self.values[d]


def readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def freeze_after(path: SamplePath, index: int) -> SamplePath:
    """Copy of the path whose values past `index` are frozen at the index value.

    Used by the no-look-ahead audit: a stopping rule may not change its answer
    when all information after its own stopping index is erased.
    """
    if not 0 <= index <= path.grid.steps:
        raise ValueError(f"index {index} outside grid")
    vals = np.array(path.values)
    vals[:, index + 1:] = vals[:, index:index + 1]
    return SamplePath(path.grid, readonly(vals), path.kind, path.seed, dict(path.metadata))


def scaled(path: SamplePath, factor: float) -> SamplePath:
    """Pointwise scaled copy; the result is tagged log-price since signs may flip."""
    return SamplePath(path.grid, readonly(factor * np.array(path.values)),
                      LOG_PRICE, path.seed, dict(path.metadata))


def path_to_csv(path: SamplePath, stream) -> None:
    """Write `t,asset_1,...,asset_D` rows with round-trip decimal formatting."""
    header = "t," + ",".join(f"asset_{d + 1}" for d in range(path.dims))
    stream.write(header + "\n")
    for i, t in enumerate(path.grid.times):
        row = [repr(float(t))] + [repr(float(v)) for v in path.values[:, i]]
        stream.write(",".join(row) + "\n")


def path_sidecar(path: SamplePath, params_dict: dict) -> str:
    """JSON sidecar describing how the exported CSV was generated."""
    doc = {
        "params": params_dict,
        "seed": path.seed.to_dict(),
        "kind": path.kind,
        "grid": {"horizon": path.grid.horizon, "steps": path.grid.steps},
        "metadata": {k: v for k, v in path.metadata.items()},
    }
    return json.dumps(doc, sort_keys=True, indent=2)


def path_from_csv(stream, grid: TimeGrid, kind: str = PRICE,
                  seed: SeedInfo = SeedInfo(0)) -> SamplePath:
    """Read back a CSV produced by `path_to_csv` (exact float round trip)."""
    header = stream.readline().strip().split(",")
    dims = len(header) - 1
    vals = np.empty((dims, grid.steps + 1))
    for i in range(grid.steps + 1):
        parts = stream.readline().strip().split(",")
        vals[:, i] = [float(p) for p in parts[1:]]
    return SamplePath(grid, readonly(vals), kind, seed)
