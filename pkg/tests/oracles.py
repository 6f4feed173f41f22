"""Reference computations kept independent of the code paths they check."""

import math
from itertools import permutations

import numpy as np

from nocmap.core import Apcg, Arc, TileCoord, xyz_route


def walked_energy(apcg, topology, assignment, e_link, e_switch):
    """Energy by walking every XYZ route.

    Each router-to-router step costs one switch traversal and every tile
    strictly between the endpoints one link traversal, which is the
    hops*E_S + (hops-1)*E_L accounting for a multi-hop route.
    """
    total = 0.0
    for arc in apcg.arcs:
        a = topology.coord_of(assignment[arc.src])
        b = topology.coord_of(assignment[arc.dst])
        path = xyz_route(a, b)
        for u, v in zip(path, path[1:]):
            assert sum(abs(p - q) for p, q in zip(u, v)) == 1
        steps = len(path) - 1
        interior = max(len(path) - 2, 0)
        total += arc.volume * (steps * e_switch + interior * e_link)
    return total


def manhattan(n, i, j):
    li, ri, ci = i // (n * n), (i // n) % n, i % n
    lj, rj, cj = j // (n * n), (j // n) % n, j % n
    return abs(li - lj) + abs(ri - rj) + abs(ci - cj)


def brute_force_min_energy(apcg, n, e_link=0.449, e_switch=0.284):
    """Plain-Python enumeration of every injective assignment."""
    best = math.inf
    arcs = [(a.src, a.dst, a.volume) for a in apcg.arcs]
    for assign in permutations(range(n**3), apcg.num_cores):
        e = 0.0
        for s, d, v in arcs:
            h = manhattan(n, assign[s], assign[d])
            e += v * (h * e_switch + (h - 1) * e_link) if h else 0.0
        best = min(best, e)
    return best


def lozenge_oracle(reference, n):
    """Search order of every non-reference tile, derived from a sort key.

    Key: (stage, layer rank, in-layer distance, sweep angle). The stage is
    the ring distance except that a foreign layer's centre cell joins
    ring 1. Layers rank by distance from the reference layer, upper first.
    Angles run clockwise from due north (rows grow downward) for odd
    reference columns and counter-clockwise for even ones.
    """
    L, R, C = reference
    clockwise = C % 2 == 1
    keyed = []
    for lay in range(n):
        for r in range(n):
            for c in range(n):
                if (lay, r, c) == tuple(reference):
                    continue
                dr, dc = r - R, c - C
                dd = abs(dr) + abs(dc)
                theta = math.atan2(dc, -dr) % (2 * math.pi)
                if not clockwise:
                    theta = (2 * math.pi - theta) % (2 * math.pi)
                rank = (abs(lay - L), 0 if lay >= L else 1)
                idx = lay * n * n + r * n + c
                keyed.append(((max(dd, 1), rank, dd, round(theta, 9)), idx))
    return [idx for _, idx in sorted(keyed)]


def random_apcg(rng, cores, density=0.4, vol=(1, 500), bw=(1.0, 50.0), name="rand"):
    arcs = []
    for s in range(cores):
        for d in range(cores):
            if s != d and rng.random() < density:
                arcs.append(Arc(s, d, int(rng.integers(vol[0], vol[1] + 1)),
                                float(round(rng.uniform(*bw), 3))))
    return Apcg(cores, tuple(arcs), name)


def random_assignment(rng, cores, tiles):
    return tuple(int(t) for t in rng.permutation(tiles)[:cores])
