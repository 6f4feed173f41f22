"""Reference mappers: exact enumeration for tiny instances and uniform random placement."""

from __future__ import annotations

from itertools import islice, permutations
from math import perm

import numpy as np

from nocmap.core import Apcg, Mapping, Topology
from nocmap.errors import SizingError
from nocmap.metrics import BatchObjective, EnergyParams, objective_value

MAX_EXHAUSTIVE_CORES = 8
MAX_EXHAUSTIVE_ASSIGNMENTS = 10**7
_CHUNK = 50_000


def exhaustive(apcg: Apcg, topology: Topology, objective: str = "energy",
               params: EnergyParams = EnergyParams()) -> tuple[Mapping, float]:
    """Exact optimum over every injective assignment.

    Enumeration follows ``itertools.permutations`` order and the first
    minimum wins, so the result is deterministic.
    """
    c, d = apcg.num_cores, topology.num_tiles
    if c > d:
        raise SizingError(f"{c} cores do not fit on {d} tiles")
    if c > MAX_EXHAUSTIVE_CORES:
        raise SizingError(f"exhaustive search is limited to {MAX_EXHAUSTIVE_CORES} cores, got {c}")
    total = perm(d, c)
    if total > MAX_EXHAUSTIVE_ASSIGNMENTS:
        raise SizingError(
            f"exhaustive search would enumerate {total} assignments "
            f"(limit {MAX_EXHAUSTIVE_ASSIGNMENTS}); use a smaller mesh"
        )
    batch = BatchObjective(apcg, topology, objective, params)
    it = permutations(range(d), c)
    best_value, best = np.inf, None
    while True:
        chunk = list(islice(it, _CHUNK))
        if not chunk:
            break
        arr = np.array(chunk, dtype=np.intp).reshape(len(chunk), c)
        values = batch(arr)
        i = int(np.argmin(values))
        if values[i] < best_value:
            best_value, best = values[i], chunk[i]
    mapping = Mapping(apcg, topology, best)
    return mapping, objective_value(mapping, objective, params)


def random_mapping(apcg: Apcg, topology: Topology, rng: np.random.Generator) -> Mapping:
    """Uniformly random injective mapping."""
    if apcg.num_cores > topology.num_tiles:
        raise SizingError(f"{apcg.num_cores} cores do not fit on {topology.num_tiles} tiles")
    tiles = rng.permutation(topology.num_tiles)[: apcg.num_cores]
    return Mapping(apcg, topology, tuple(tiles.tolist()))
