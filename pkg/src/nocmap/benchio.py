"""Task-graph files, synthetic benchmark generation and comparison reports.

Task graph text format (UTF-8, one record per line)::

    # comments start with '#'
    apcg <name> <num_cores>
    <src> <dst> <volume_bits> <bandwidth>

Cores are numbered ``0..num_cores-1``. Volumes are non-negative integers,
bandwidths non-negative reals.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from nocmap.core import Apcg, Arc
from nocmap.errors import GenerationError, ParseError, ReportError
from nocmap.metrics import MetricsReport

REPORT_SCHEMA = "noc-map/report/1"
_METRICS = ("total_energy", "comm_cost", "avg_latency")


# --- parsing -----------------------------------------------------------------

def _tokens(line: str) -> list[tuple[str, int]]:
    out, i = [], 0
    while i < len(line):
        if line[i].isspace():
            i += 1
            continue
        j = i
        while j < len(line) and not line[j].isspace():
            j += 1
        out.append((line[i:j], i + 1))
        i = j
    return out


def _int_field(tok, col, lineno, what):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {tok!r}", lineno, col) from None


def parse_apcg(text: str) -> Apcg:
    header = None
    arcs: list[Arc] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = _tokens(line)
        if not toks:
            continue
        if header is None:
            if toks[0][0] != "apcg" or len(toks) != 3:
                raise ParseError("expected header 'apcg <name> <num_cores>'", lineno, toks[0][1])
            count = _int_field(*toks[2], lineno, "core count")
            if count < 0:
                raise ParseError("core count must be non-negative", lineno, toks[2][1])
            header = (toks[1][0], count)
            continue
        if len(toks) != 4:
            raise ParseError(
                f"expected '<src> <dst> <volume> <bandwidth>', got {len(toks)} fields",
                lineno, toks[0][1],
            )
        (s, sc), (d, dc), (v, vc), (b, bc) = toks
        src = _int_field(s, sc, lineno, "source core")
        dst = _int_field(d, dc, lineno, "destination core")
        volume = _int_field(v, vc, lineno, "volume")
        try:
            bandwidth = float(b)
        except ValueError:
            raise ParseError(f"bandwidth must be a number, got {b!r}", lineno, bc) from None
        for core, col in ((src, sc), (dst, dc)):
            if not 0 <= core < header[1]:
                raise ParseError(f"unknown core id {core}", lineno, col)
        if src == dst:
            raise ParseError(f"self-arc on core {src}", lineno, sc)
        if volume < 0:
            raise ParseError("negative volume", lineno, vc)
        if not (bandwidth >= 0 and math.isfinite(bandwidth)):
            raise ParseError("bandwidth must be finite and non-negative", lineno, bc)
        if (src, dst) in seen:
            raise ParseError(f"duplicate arc {src}->{dst}", lineno, sc)
        seen.add((src, dst))
        arcs.append(Arc(src, dst, volume, bandwidth))
    if header is None:
        raise ParseError("missing 'apcg' header", max(1, len(text.splitlines())), 1)
    return Apcg(header[1], tuple(arcs), header[0])


def write_apcg(apcg: Apcg) -> str:
    lines = [f"apcg {apcg.name} {apcg.num_cores}"]
    lines += [f"{a.src} {a.dst} {a.volume} {float(a.bandwidth)!r}" for a in apcg.arcs]
    return "\n".join(lines) + "\n"


def read_apcg(path) -> Apcg:
    return parse_apcg(Path(path).read_text(encoding="utf-8"))


# --- generation --------------------------------------------------------------

@dataclass(frozen=True)
class GenSpec:
    cores: int
    density: float = 0.1
    volume_range: tuple[int, int] = (1, 1000)
    bandwidth_range: tuple[float, float] = (1.0, 100.0)
    seed: int = 0
    max_retries: int = 100
    name: str | None = None

    def __post_init__(self):
        if self.cores < 2:
            raise ValueError("a generated graph needs at least 2 cores")
        if not 0 < self.density <= 1:
            raise ValueError("density must lie in (0, 1]")
        lo, hi = self.volume_range
        if not 0 <= lo <= hi:
            raise ValueError("volume range must satisfy 0 <= lo <= hi")
        lo, hi = self.bandwidth_range
        if not 0 <= lo <= hi:
            raise ValueError("bandwidth range must satisfy 0 <= lo <= hi")


def weakly_connected(apcg: Apcg) -> bool:
    parent = list(apcg.cores)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in apcg.arcs:
        parent[find(a.src)] = find(a.dst)
    return len({find(c) for c in apcg.cores}) <= 1


def generate(spec: GenSpec) -> Apcg:
    """Random weakly connected task graph; a pure function of ``spec``.

    Each ordered pair of distinct cores receives an arc with probability
    ``density``. Disconnected draws are discarded and redrawn from the same
    stream, at most ``max_retries`` times.
    """
    rng = np.random.default_rng(spec.seed)
    name = spec.name or f"random{spec.cores}_s{spec.seed}"
    c = spec.cores
    for _ in range(spec.max_retries + 1):
        pick = rng.random((c, c)) < spec.density
        np.fill_diagonal(pick, False)
        pairs = np.argwhere(pick)
        volumes = rng.integers(spec.volume_range[0], spec.volume_range[1] + 1, len(pairs))
        bws = np.round(rng.uniform(*spec.bandwidth_range, len(pairs)), 3)
        arcs = tuple(
            Arc(int(s), int(d), int(v), float(b))
            for (s, d), v, b in zip(pairs, volumes, bws)
        )
        apcg = Apcg(c, arcs, name)
        if weakly_connected(apcg):
            return apcg
    raise GenerationError(
        f"no weakly connected graph after {spec.max_retries} retries "
        f"(cores={c}, density={spec.density})"
    )


GOLDEN_SPEC = GenSpec(cores=27, density=0.1, seed=42, name="golden27")

# Synthetic stand-ins sized like the usual multimedia, telecom and embedded
# benchmark suites. Volumes are random; the real traffic tables are not used.
SAMPLES: dict[str, GenSpec] = {
    "vopd": GenSpec(16, 0.15, seed=101, name="vopd_synthetic"),
    "mms": GenSpec(16, 0.15, seed=102, name="mms_synthetic"),
    "mwd": GenSpec(12, 0.2, seed=103, name="mwd_synthetic"),
    "telecom": GenSpec(16, 0.15, seed=104, name="telecom_synthetic"),
    "random27": GOLDEN_SPEC,
    "auto_indust": GenSpec(24, 0.1, seed=105, name="auto_indust_synthetic"),
    "consumer": GenSpec(12, 0.2, seed=106, name="consumer_synthetic"),
    "networking": GenSpec(13, 0.2, seed=107, name="networking_synthetic"),
    "office": GenSpec(5, 0.4, seed=108, name="office_synthetic"),
}


def sample(name: str) -> Apcg:
    try:
        return generate(SAMPLES[name])
    except KeyError:
        raise KeyError(f"unknown sample {name!r}; choose from {sorted(SAMPLES)}") from None


def golden() -> Apcg:
    """The committed 27-core regression graph."""
    data = Path(__file__).parent / "data" / "golden27.apcg"
    return read_apcg(data)


# --- reports -----------------------------------------------------------------

@dataclass
class ReportEntry:
    algorithm: str
    metrics: MetricsReport
    assignment: tuple[int, ...] = ()
    run: dict | None = None


def reduction_pct(baseline: float, candidate: float) -> float | None:
    """Percentage by which ``candidate`` undercuts ``baseline``; None if undefined."""
    if baseline == 0:
        return 0.0 if candidate == 0 else None
    return (baseline - candidate) / baseline * 100.0


def _reductions(rows: list[dict], baseline: str) -> dict:
    base = next(r for r in rows if r["algorithm"] == baseline)
    return {
        r["algorithm"]: {m: reduction_pct(base[m], r[m]) for m in _METRICS}
        for r in rows
        if r["algorithm"] != baseline
    }


def build_report(entries: Sequence[ReportEntry], baseline: str | None = None) -> dict:
    if not entries:
        raise ReportError("a report needs at least one result")
    names = [e.algorithm for e in entries]
    if len(set(names)) != len(names):
        raise ReportError(f"duplicate algorithm names in {names}")
    baseline = names[0] if baseline is None else baseline
    if baseline not in names:
        raise ReportError(f"baseline {baseline!r} is not among {names}")
    rows = []
    for e in entries:
        row = {"algorithm": e.algorithm, **e.metrics.to_dict(), "assignment": list(e.assignment)}
        if e.run is not None:
            row["run"] = e.run
        rows.append(row)
    doc = {
        "schema": REPORT_SCHEMA,
        "baseline": baseline,
        "algorithms": rows,
        "reductions": _reductions(rows, baseline),
    }
    check_report(doc)
    return doc


def check_report(doc: dict) -> None:
    """Raise :class:`ReportError` unless the reductions follow from the raw metrics."""
    if doc.get("schema") != REPORT_SCHEMA:
        raise ReportError(f"unexpected schema {doc.get('schema')!r}")
    names = [r["algorithm"] for r in doc["algorithms"]]
    if doc["baseline"] not in names:
        raise ReportError(f"baseline {doc['baseline']!r} is not among {names}")
    if doc["reductions"] != _reductions(doc["algorithms"], doc["baseline"]):
        raise ReportError("reduction percentages disagree with the raw metrics")


def report_csv(doc: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["algorithm", *_METRICS, *(f"{m}_reduction_pct" for m in _METRICS)])
    for row in doc["algorithms"]:
        red = doc["reductions"].get(row["algorithm"], {m: 0.0 for m in _METRICS})
        cells = [row[m] for m in _METRICS] + ["" if red[m] is None else red[m] for m in _METRICS]
        writer.writerow([row["algorithm"], *(repr(x) if isinstance(x, float) else x for x in cells)])
    return buf.getvalue()


def write_report(entries: Sequence[ReportEntry], baseline: str | None = None,
                 json_path=None, csv_path=None) -> tuple[str, str]:
    """Build the report and return ``(json_text, csv_text)``, writing the given paths."""
    doc = build_report(entries, baseline)
    json_text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    csv_text = report_csv(doc)
    if json_path is not None:
        Path(json_path).write_text(json_text, encoding="utf-8")
    if csv_path is not None:
        Path(csv_path).write_text(csv_text, encoding="utf-8")
    return json_text, csv_text
