"""Communication energy, communication cost and average latency of a mapping."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from nocmap.core import Apcg, Mapping, Topology

# Per-bit energies in pJ for a 3D mesh tile (link, switch).
E_LINK_BIT = 0.449
E_SWITCH_BIT = 0.284


@dataclass(frozen=True)
class EnergyParams:
    e_link_bit: float = E_LINK_BIT
    e_switch_bit: float = E_SWITCH_BIT
    rho: float = 1.0

    def __post_init__(self):
        for name in ("e_link_bit", "e_switch_bit", "rho"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)}")


@dataclass(frozen=True)
class ArcReport:
    src: int
    dst: int
    hops: int
    energy: float


@dataclass(frozen=True)
class MetricsReport:
    total_energy: float
    comm_cost: float
    avg_latency: float
    per_arc: tuple[ArcReport, ...] = field(default=())

    def to_dict(self, per_arc: bool = False) -> dict:
        out = {
            "total_energy": self.total_energy,
            "comm_cost": self.comm_cost,
            "avg_latency": self.avg_latency,
        }
        if per_arc:
            out["per_arc"] = [asdict(a) for a in self.per_arc]
        return out


def bit_energy(hops: int, params: EnergyParams) -> float:
    """Energy to move one bit across ``hops`` hops: every router plus the links between them."""
    if hops <= 0:
        return 0.0
    return hops * params.e_switch_bit + (hops - 1) * params.e_link_bit


def total_energy(mapping: Mapping, params: EnergyParams = EnergyParams()) -> float:
    return sum(
        arc.volume * bit_energy(mapping.hops(arc.src, arc.dst), params)
        for arc in mapping.apcg.arcs
    )


def comm_cost(mapping: Mapping) -> float:
    return sum(arc.bandwidth * mapping.hops(arc.src, arc.dst) for arc in mapping.apcg.arcs)


def avg_latency(mapping: Mapping, params: EnergyParams = EnergyParams()) -> float:
    """Mean of ``hops * volume * rho`` over arcs; each arc counts as one transfer."""
    arcs = mapping.apcg.arcs
    if not arcs:
        return 0.0
    num = sum(mapping.hops(a.src, a.dst) * a.volume * params.rho for a in arcs)
    return num / len(arcs)


def evaluate(mapping: Mapping, params: EnergyParams = EnergyParams()) -> MetricsReport:
    per_arc = []
    for arc in mapping.apcg.arcs:
        h = mapping.hops(arc.src, arc.dst)
        per_arc.append(ArcReport(arc.src, arc.dst, h, arc.volume * bit_energy(h, params)))
    return MetricsReport(
        total_energy=sum(a.energy for a in per_arc),
        comm_cost=comm_cost(mapping),
        avg_latency=avg_latency(mapping, params),
        per_arc=tuple(per_arc),
    )


OBJECTIVES = ("energy", "cost")


def objective_value(mapping: Mapping, objective: str = "energy",
                    params: EnergyParams = EnergyParams()) -> float:
    if objective == "energy":
        return total_energy(mapping, params)
    if objective == "cost":
        return comm_cost(mapping)
    raise ValueError(f"unknown objective {objective!r}; expected one of {OBJECTIVES}")


class BatchObjective:
    """Vectorized objective over many assignments at once.

    ``self(assignments)`` takes an integer array of shape ``(k, C)`` where row
    ``r`` gives the tile of every core, and returns ``k`` objective values.
    Used by the swarm and exhaustive searches; :func:`objective_value`
    stays the reference.
    """

    def __init__(self, apcg: Apcg, topology: Topology, objective: str = "energy",
                 params: EnergyParams = EnergyParams()):
        if objective not in OBJECTIVES:
            raise ValueError(f"unknown objective {objective!r}; expected one of {OBJECTIVES}")
        self.apcg = apcg
        self.topology = topology
        self.objective = objective
        self.params = params
        self.src = np.array([a.src for a in apcg.arcs], dtype=np.intp)
        self.dst = np.array([a.dst for a in apcg.arcs], dtype=np.intp)
        hops = topology.hop_matrix
        if objective == "energy":
            per_bit = np.where(
                hops > 0, hops * params.e_switch_bit + (hops - 1) * params.e_link_bit, 0.0
            )
            self.table = per_bit
            self.weight = np.array([a.volume for a in apcg.arcs], dtype=float)
        else:
            self.table = hops.astype(float)
            self.weight = np.array([a.bandwidth for a in apcg.arcs], dtype=float)

    def __call__(self, assignments: np.ndarray) -> np.ndarray:
        assignments = np.atleast_2d(assignments)
        if self.src.size == 0:
            return np.zeros(assignments.shape[0])
        per_arc = self.table[assignments[:, self.src], assignments[:, self.dst]]
        # accumulate arc by arc so results match objective_value() bit for bit
        total = np.zeros(assignments.shape[0])
        for j, weight in enumerate(self.weight):
            total += weight * per_arc[:, j]
        return total

    def of_mapping(self, mapping: Mapping) -> float:
        return objective_value(mapping, self.objective, self.params)
