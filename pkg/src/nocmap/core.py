"""Task graphs, 3D mesh topologies, mappings and XYZ routing.

Tiles of an ``n x n x n`` mesh are addressed either by a :class:`TileCoord`
``(layer, row, col)`` or by a linear index ``layer*n*n + row*n + col``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from nocmap.errors import ApcgError, MappingError, SizingError


@dataclass(frozen=True)
class Arc:
    src: int
    dst: int
    volume: int
    bandwidth: float = 0.0


@dataclass(frozen=True)
class Apcg:
    """Application characterization graph.

    Cores are the dense ids ``0..num_cores-1``. Each arc carries the
    communication volume (bits) and the bandwidth requirement from ``src``
    to ``dst``.
    """

    num_cores: int
    arcs: tuple[Arc, ...] = ()
    name: str = "apcg"

    def __post_init__(self):
        if self.num_cores < 0:
            raise ApcgError(f"negative core count {self.num_cores}")
        object.__setattr__(self, "arcs", tuple(self.arcs))
        seen = set()
        for arc in self.arcs:
            if not (0 <= arc.src < self.num_cores and 0 <= arc.dst < self.num_cores):
                raise ApcgError(f"arc {arc.src}->{arc.dst} references an unknown core")
            if arc.src == arc.dst:
                raise ApcgError(f"self-arc on core {arc.src}")
            if (arc.src, arc.dst) in seen:
                raise ApcgError(f"duplicate arc {arc.src}->{arc.dst}")
            if arc.volume < 0 or arc.bandwidth < 0:
                raise ApcgError(f"arc {arc.src}->{arc.dst} has a negative volume or bandwidth")
            seen.add((arc.src, arc.dst))

    @classmethod
    def from_edges(cls, num_cores: int, edges: Iterable[Sequence], name: str = "apcg") -> "Apcg":
        """Build from ``(src, dst, volume[, bandwidth])`` tuples."""
        return cls(num_cores, tuple(Arc(*e) for e in edges), name)

    @property
    def cores(self) -> range:
        return range(self.num_cores)

    @cached_property
    def volume_matrix(self) -> np.ndarray:
        vol = np.zeros((self.num_cores, self.num_cores), dtype=np.int64)
        for arc in self.arcs:
            vol[arc.src, arc.dst] = arc.volume
        return vol

    @cached_property
    def pair_volume(self) -> np.ndarray:
        """Symmetric matrix of volume exchanged in both directions."""
        vol = self.volume_matrix
        return vol + vol.T


class TileCoord(NamedTuple):
    layer: int
    row: int
    col: int


@dataclass(frozen=True)
class Topology:
    """Regular ``n x n x n`` 3D mesh.

    Channel bandwidth and buffer depth are uniform and kept only as
    descriptive data; no metric consumes them.
    """

    n: int
    channel_bandwidth: float = 0.0
    buffer_depth: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise SizingError(f"mesh dimension must be >= 2, got {self.n}")
        if self.channel_bandwidth < 0 or self.buffer_depth < 0:
            raise ValueError("channel bandwidth and buffer depth must be non-negative")

    @classmethod
    def for_cores(cls, num_cores: int, minimum: int = 3) -> "Topology":
        """Smallest mesh holding ``num_cores`` tiles, never below ``minimum``."""
        n = max(minimum, 2)
        while n**3 < num_cores:
            n += 1
        return cls(n)

    @property
    def num_tiles(self) -> int:
        return self.n**3

    def contains(self, coord: TileCoord) -> bool:
        return all(0 <= c < self.n for c in coord)

    def linear_index(self, coord: TileCoord) -> int:
        return linear_index(coord, self.n)

    def coord_of(self, index: int) -> TileCoord:
        return coord_of(index, self.n)

    def coords(self) -> list[TileCoord]:
        return [coord_of(i, self.n) for i in range(self.num_tiles)]

    def neighbors(self, coord: TileCoord) -> list[TileCoord]:
        out = []
        for axis in range(3):
            for step in (-1, 1):
                c = list(coord)
                c[axis] += step
                if 0 <= c[axis] < self.n:
                    out.append(TileCoord(*c))
        return out

    def adjacent(self, a: TileCoord, b: TileCoord) -> bool:
        return hop_count(a, b) == 1

    @cached_property
    def hop_matrix(self) -> np.ndarray:
        """``hop_matrix[i, j]`` is the XYZ hop count between tiles ``i`` and ``j``."""
        idx = np.arange(self.num_tiles)
        layer, rem = np.divmod(idx, self.n * self.n)
        row, col = np.divmod(rem, self.n)
        c = np.stack([layer, row, col], axis=1)
        return np.abs(c[:, None, :] - c[None, :, :]).sum(axis=2)


def linear_index(coord: TileCoord, n: int) -> int:
    layer, row, col = coord
    if not all(0 <= v < n for v in coord):
        raise ValueError(f"{tuple(coord)} is outside a mesh of dimension {n}")
    return layer * n * n + row * n + col


def coord_of(index: int, n: int) -> TileCoord:
    if not 0 <= index < n**3:
        raise ValueError(f"tile index {index} is outside a mesh of dimension {n}")
    layer, rem = divmod(index, n * n)
    row, col = divmod(rem, n)
    return TileCoord(layer, row, col)


def hop_count(a: TileCoord, b: TileCoord) -> int:
    """Hops on a minimal dimension-ordered route, i.e. the 3D Manhattan distance."""
    return abs(a[0] - b[0]) + abs(a[1] - b[1]) + abs(a[2] - b[2])


def xyz_route(a: TileCoord, b: TileCoord) -> list[TileCoord]:
    """Tiles visited from ``a`` to ``b``, both ends included.

    Corrects the column first, then the row, then the layer.
    """
    layer, row, col = a
    path = [TileCoord(layer, row, col)]
    for axis in (2, 1, 0):
        cur = [layer, row, col]
        step = 1 if b[axis] > cur[axis] else -1
        while cur[axis] != b[axis]:
            cur[axis] += step
            layer, row, col = cur
            path.append(TileCoord(layer, row, col))
    return path


def out_degree(apcg: Apcg, core: int) -> int:
    return sum(1 for arc in apcg.arcs if arc.src == core)


def rank(apcg: Apcg, core: int) -> int:
    """Total volume sent to and received from every other core."""
    return sum(arc.volume for arc in apcg.arcs if core in (arc.src, arc.dst))


@dataclass(frozen=True)
class Mapping:
    """Injective placement of every core of ``apcg`` onto a tile of ``topology``."""

    apcg: Apcg
    topology: Topology
    assignment: tuple[int, ...] = field(default=())

    def __post_init__(self):
        assignment = tuple(int(t) for t in self.assignment)
        object.__setattr__(self, "assignment", assignment)
        c, d = self.apcg.num_cores, self.topology.num_tiles
        if c > d:
            raise SizingError(f"{c} cores do not fit on {d} tiles")
        if len(assignment) < c:
            raise MappingError(f"core {len(assignment)} is unmapped", core=len(assignment))
        if len(assignment) > c:
            raise MappingError(f"assignment has {len(assignment)} entries for {c} cores")
        owner: dict[int, int] = {}
        for core, tile in enumerate(assignment):
            if tile < 0:
                raise MappingError(f"core {core} is unmapped", core=core)
            if tile >= d:
                raise MappingError(f"core {core} mapped to tile {tile} outside the mesh", core=core)
            if tile in owner:
                raise MappingError(
                    f"cores {owner[tile]} and {core} share tile {tile}", core=core
                )
            owner[tile] = core

    def tile_of(self, core: int) -> int:
        return self.assignment[core]

    def coord_of(self, core: int) -> TileCoord:
        return self.topology.coord_of(self.assignment[core])

    def hops(self, src: int, dst: int) -> int:
        return hop_count(self.coord_of(src), self.coord_of(dst))
