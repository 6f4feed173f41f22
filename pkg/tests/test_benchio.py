import json

import pytest
from hypothesis import given, strategies as st

from nocmap.benchio import (
    GOLDEN_SPEC, SAMPLES, GenSpec, ReportEntry, build_report, check_report, generate, golden,
    parse_apcg, read_apcg, reduction_pct, report_csv, sample, weakly_connected, write_apcg,
    write_report,
)
from nocmap.errors import GenerationError, ParseError, ReportError
from nocmap.metrics import MetricsReport


def test_parse_isolated_cores():
    g = parse_apcg("# three lonely cores\napcg lonely 3\n")
    assert (g.name, g.num_cores, g.arcs) == ("lonely", 3, ())


def test_parse_arcs_and_comments():
    g = parse_apcg("apcg t 3\n0 1 10 2.5  # inline\n\n2 0 7 0\n")
    assert [(a.src, a.dst, a.volume, a.bandwidth) for a in g.arcs] == [(0, 1, 10, 2.5), (2, 0, 7, 0.0)]


@pytest.mark.parametrize("text, line, reason", [
    ("apcg t 6\n5 5 10 1.0\n", 2, "self-arc"),
    ("apcg t 3\n0 7 1 1\n", 2, "unknown core"),
    ("apcg t 3\n0 1 -4 1\n", 2, "negative volume"),
    ("apcg t 3\n0 1 4 1\n0 1 5 1\n", 3, "duplicate arc"),
    ("graph t 3\n", 1, "header"),
    ("apcg t x\n", 1, "integer"),
    ("apcg t 3\n0 1 4\n", 2, "fields"),
    ("apcg t 3\n0 1 4 fast\n", 2, "bandwidth"),
    ("# nothing\n", 1, "missing"),
])
def test_parse_errors(text, line, reason):
    with pytest.raises(ParseError) as err:
        parse_apcg(text)
    assert err.value.line == line and reason in str(err.value)


def test_parse_error_column():
    with pytest.raises(ParseError) as err:
        parse_apcg("apcg t 3\n0   1 -4 1\n")
    assert err.value.column == 7


@given(st.integers(2, 12), st.floats(0.3, 1.0), st.integers(0, 10_000))
def test_round_trip(cores, density, seed):
    g = generate(GenSpec(cores, density, seed=seed))
    text = write_apcg(g)
    assert parse_apcg(text) == g
    assert write_apcg(parse_apcg(text)) == text


def test_generate_examples():
    pair = generate(GenSpec(2, 1.0, seed=3))
    assert {(a.src, a.dst) for a in pair.arcs} == {(0, 1), (1, 0)}
    assert generate(GenSpec(20, 0.2, seed=5)) == generate(GenSpec(20, 0.2, seed=5))
    g = generate(GenSpec(20, 0.2, seed=5))
    assert weakly_connected(g)
    assert 0.1 * 380 < len(g.arcs) < 0.3 * 380


def test_generate_gives_up_on_hopeless_density():
    with pytest.raises(GenerationError):
        generate(GenSpec(30, 0.001, seed=1, max_retries=5))


def test_golden_graph_is_frozen(golden_path):
    assert generate(GOLDEN_SPEC) == read_apcg(golden_path) == golden()
    assert golden().num_cores == 27 and len(golden().arcs) == 63


def test_samples_cover_benchmark_sizes():
    sizes = sorted(sample(name).num_cores for name in SAMPLES)
    assert sizes == sorted([16, 16, 12, 16, 27, 24, 12, 13, 5])


def _entry(name, energy, cost=10.0, lat=5.0):
    return ReportEntry(name, MetricsReport(energy, cost, lat))


def test_report_reductions():
    doc = build_report([_entry("spiral", 100.0), _entry("ours", 81.0)], "spiral")
    assert doc["schema"] == "noc-map/report/1"
    assert doc["reductions"]["ours"]["total_energy"] == pytest.approx(19.0)
    assert build_report([_entry("solo", 3.0)])["reductions"] == {}
    tie = build_report([_entry("b", 50.0), _entry("x", 50.0), _entry("y", 50.0)], "b")
    assert all(r["total_energy"] == 0.0 for r in tie["reductions"].values())


def test_report_errors():
    with pytest.raises(ReportError):
        build_report([_entry("a", 1.0)], "missing")
    with pytest.raises(ReportError):
        build_report([])
    doc = build_report([_entry("a", 10.0), _entry("b", 5.0)])
    doc["reductions"]["b"]["total_energy"] = 12.0
    with pytest.raises(ReportError):
        check_report(doc)


def test_reduction_pct_zero_baseline():
    assert reduction_pct(0.0, 0.0) == 0.0
    assert reduction_pct(0.0, 1.0) is None


def test_write_report_files(tmp_path):
    entries = [_entry("base", 100.0), _entry("new", 75.0)]
    js, csv_text = write_report(entries, "base", tmp_path / "r.json", tmp_path / "r.csv")
    assert json.loads((tmp_path / "r.json").read_text()) == json.loads(js)
    rows = csv_text.splitlines()
    assert rows[0].startswith("algorithm,total_energy,comm_cost,avg_latency,")
    assert rows[1].startswith("base,100.0,10.0,5.0,0.0")
    assert rows[2].startswith("new,75.0,10.0,5.0,25.0")
