"""Diagonal-seeded, lozenge-search placement heuristic for 3D meshes.

Cores are ordered by out-degree (then total traffic). The first ones go on
the interior space-diagonal tiles. Every remaining core is the unmapped one
that talks most to the already-mapped set, and it lands on the nearest empty
tile around its partner, found by sweeping diamond-shaped rings in the
partner's layer and then in neighbouring layers.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Iterator

from nocmap.core import Apcg, Mapping, TileCoord, Topology, linear_index, out_degree, rank
from nocmap.errors import SizingError


@dataclass(frozen=True)
class Placement:
    """One placement decision; ``reference`` is None for diagonal seeds."""

    core: int
    reference: int | None
    probed: tuple[int, ...]
    chosen: int


class SearchTrace(list):
    """Ordered list of :class:`Placement` records."""

    def to_json(self) -> str:
        return json.dumps([asdict(p) for p in self], indent=2)

    @classmethod
    def from_json(cls, text: str) -> "SearchTrace":
        return cls(
            Placement(d["core"], d["reference"], tuple(d["probed"]), d["chosen"])
            for d in json.loads(text)
        )


def build_order(apcg: Apcg) -> list[int]:
    """Cores by descending out-degree, then descending rank, then ascending id."""
    return sorted(apcg.cores, key=lambda c: (-out_degree(apcg, c), -rank(apcg, c), c))


def diagonal_tiles(n: int) -> list[int]:
    """Interior space-diagonal tiles, the two corner ends excluded."""
    return [(n * n + n + 1) * (i + 1) for i in range(n - 2)]


def next_core(unmapped, mapped, apcg: Apcg, order: list[int] | None = None) -> int:
    """The unmapped core exchanging the most volume with the mapped set.

    Ties go to the core appearing first in ``order`` (the placement order).
    """
    pair = apcg.pair_volume
    mapped = list(mapped)
    position = {c: i for i, c in enumerate(order if order is not None else build_order(apcg))}
    return max(unmapped, key=lambda c: (int(pair[c, mapped].sum()), -position[c]))


def reference_core(core: int, mapped: list[int], apcg: Apcg) -> int:
    """The mapped core with the largest pairwise volume with ``core``; earliest-mapped wins ties."""
    pair = apcg.pair_volume
    best = mapped[0]
    for m in mapped[1:]:
        if pair[core, m] > pair[core, best]:
            best = m
    return best


def ring(row: int, col: int, d: int, clockwise: bool) -> list[tuple[int, int]]:
    """Cells at in-layer Manhattan distance ``d``, starting due north (row - d).

    Rows grow downward and columns to the right, so clockwise heads east first.
    """
    if d == 0:
        return [(row, col)]
    east = 1 if clockwise else -1
    cells = []
    # north -> east/west corner -> south -> opposite corner -> back to north
    for k in range(d):
        cells.append((row - d + k, col + east * k))
    for k in range(d):
        cells.append((row + k, col + east * (d - k)))
    for k in range(d):
        cells.append((row + d - k, col - east * k))
    for k in range(d):
        cells.append((row - k, col - east * (d - k)))
    return cells


def layer_offsets(layer: int, n: int) -> list[int]:
    """Reference layer, then +1, -1, +2, -2, ... restricted to the mesh."""
    out = [layer]
    for k in range(1, n):
        for candidate in (layer + k, layer - k):
            if 0 <= candidate < n:
                out.append(candidate)
    return out


def lozenge_order(reference: TileCoord, n: int) -> Iterator[int]:
    """Every tile other than ``reference`` in search order, each exactly once.

    For ring distance d = 1 .. 2(n-1), the ring is swept in the reference
    layer and then in the other layers (nearest first, above before below).
    A non-reference layer also gets its not-yet-probed inner cells, so the
    tile straight above the reference is tried together with the first ring.
    Odd reference columns sweep clockwise, even ones counter-clockwise.
    """
    layer, row, col = reference
    clockwise = col % 2 == 1
    layers = layer_offsets(layer, n)
    probed = {linear_index(reference, n)}
    for d in range(1, 2 * (n - 1) + 1):
        for lay in layers:
            depths = [d] if lay == layer or d > 1 else [0, 1]
            for depth in depths:
                for r, c in ring(row, col, depth, clockwise):
                    if 0 <= r < n and 0 <= c < n:
                        idx = linear_index(TileCoord(lay, r, c), n)
                        if idx not in probed:
                            probed.add(idx)
                            yield idx
    # Every tile is within in-layer distance 2(n-1); this only guards termination.
    for idx in range(n**3):
        if idx not in probed:
            yield idx


def find_empty_tile(reference: TileCoord, occupied, n: int) -> tuple[int, tuple[int, ...]]:
    """First empty tile in :func:`lozenge_order`, with the tiles probed to reach it."""
    probed = []
    for idx in lozenge_order(reference, n):
        probed.append(idx)
        if idx not in occupied:
            return idx, tuple(probed)
    raise SizingError("no empty tile left in the mesh")


def map_heuristic(apcg: Apcg, topology: Topology) -> tuple[Mapping, SearchTrace]:
    n = topology.n
    if apcg.num_cores > topology.num_tiles:
        raise SizingError(f"{apcg.num_cores} cores do not fit on {topology.num_tiles} tiles")
    assignment = [-1] * apcg.num_cores
    trace = SearchTrace()
    if apcg.num_cores == 0:
        return Mapping(apcg, topology, ()), trace

    order = build_order(apcg)
    mapped: list[int] = []
    occupied: set[int] = set()

    def place(core, tile, reference=None, probed=()):
        assignment[core] = tile
        mapped.append(core)
        occupied.add(tile)
        trace.append(Placement(core, reference, tuple(probed), tile))

    for core, tile in zip(order, diagonal_tiles(n)):
        place(core, tile)
    if not mapped:
        # n = 2 has no interior diagonal; start the search from the origin tile.
        place(order[0], 0)

    unmapped = [c for c in order if assignment[c] < 0]
    while unmapped:
        core = next_core(unmapped, mapped, apcg, order)
        ref = reference_core(core, mapped, apcg)
        tile, probed = find_empty_tile(topology.coord_of(assignment[ref]), occupied, n)
        place(core, tile, assignment[ref], probed)
        unmapped.remove(core)

    return Mapping(apcg, topology, tuple(assignment)), trace
