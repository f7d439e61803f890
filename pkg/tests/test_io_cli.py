import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from d2dmot import cli
from d2dmot.analysis import bfs_shortest_path
from d2dmot.errors import MalformedMatrix
from d2dmot.io import COMPARISON_HEADER, fmt, parse_adjacency_matrix, read_adjacency_matrix, to_csv
from d2dmot.topology import build_topology


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_sample_matrix_counts(sample_matrix_path):
    g = read_adjacency_matrix(sample_matrix_path)
    assert g.n == 9
    assert g.ones == 46
    assert g.self_loops == (0, 2, 7, 8)
    assert g.edge_count == 42
    assert g.link_count == 23
    assert not g.is_symmetric()


def test_sample_run_output(capsys, sample_matrix_path):
    code, out, _ = run(capsys, "shortest-path", str(sample_matrix_path), "5", "7")
    assert code == 0
    assert out == (
        "No of 1 in the Matrix = 46\n"
        "No of link is = 23\n"
        "Shortest path = 5 => 8 => 7\n"
        "Minimum distance = 2\n"
    )


def test_same_vertex(capsys, sample_matrix_path):
    code, out, _ = run(capsys, "shortest-path", str(sample_matrix_path), "4", "4")
    assert code == 0
    assert "Shortest path = 4\n" in out and "Minimum distance = 0\n" in out


def test_unreachable(capsys, tmp_path):
    path = tmp_path / "zeros.txt"
    path.write_text("3\n0 0 0\n0 0 0\n0 0 0\n")
    code, out, _ = run(capsys, "shortest-path", str(path), "0", "2")
    assert code == cli.EXIT_UNREACHABLE
    assert "unreachable" in out


def test_zero_matrix_all_unreachable():
    g = parse_adjacency_matrix("3\n0 0 0\n0 0 0\n0 0 0\n")
    assert g.edge_count == 0
    assert all(not bfs_shortest_path(g.adjacency, s, t).reachable for s in range(3) for t in range(3) if s != t)


@pytest.mark.parametrize("text", [
    "", "3\n0 1 0\n1 0 1\n", "2\n0 2\n1 0\n", "2\n0 1 1\n1 0\n", "x\n", "2 2\n0 1\n1 0\n", "0\n",
])
def test_malformed(text):
    with pytest.raises(MalformedMatrix):
        parse_adjacency_matrix(text)


def test_bad_vertex_gives_error_record(capsys, sample_matrix_path):
    code, _, err = run(capsys, "shortest-path", str(sample_matrix_path), "5", "42")
    assert code == cli.EXIT_ERROR
    assert json.loads(err)["error"] == "IndexError"


@given(st.integers(1, 7).flatmap(lambda n: st.lists(st.lists(st.integers(0, 1), min_size=n, max_size=n),
                                                      min_size=n, max_size=n)))
def test_parse_counts_match_text(rows):
    text = f"{len(rows)}\n" + "\n".join(" ".join(map(str, r)) for r in rows) + "\n"
    g = parse_adjacency_matrix(text)
    assert g.ones == sum(map(sum, rows))
    assert g.edge_count == g.ones - len(g.self_loops)
    for i, r in enumerate(rows):
        assert set(g.adjacency[i]) == {j for j, x in enumerate(r) if x and j != i}


def test_fmt_and_csv():
    assert fmt(True) == "true" and fmt(0.5) == "0.500000" and fmt(None) == "" and fmt(3) == "3"
    text = to_csv([{"ip_blocks": 32, "speedup_pct": 1.5}], COMPARISON_HEADER)
    assert text == "ip_blocks,t_d2dmot,t_mot,t_mesh,speedup_pct\n32,,,,1.500000\n"


def test_analyze_mot(capsys):
    code, out, _ = run(capsys, "analyze", "--family", "mot", "--rows", "4", "--cols", "4")
    assert code == 0
    header, row = out.strip().splitlines()
    record = dict(zip(header.split(","), row.split(",")))
    assert record["diameter_formula"] == record["diameter_measured"] == "8"
    assert record["deadlock_free"] == "true"


def test_build_analyze_round_trip(capsys, tmp_path):
    path = tmp_path / "topo.json"
    assert run(capsys, "build", "--family", "d2dmot", "--rows", "4", "--out", str(path))[0] == 0
    _, from_file, _ = run(capsys, "analyze", "--input", str(path), "--format", "json")
    _, direct, _ = run(capsys, "analyze", "--family", "d2dmot", "--rows", "4", "--format", "json")
    assert json.loads(from_file) == json.loads(direct)
    assert json.loads(direct)["diameter_measured"] == 7
    assert cli.metrics_row(build_topology("d2dmot", (4, 4))) == json.loads(direct)


def test_build_is_deterministic(capsys):
    assert run(capsys, "build", "--family", "mot", "--rows", "4")[1] == run(capsys, "build", "--family", "mot", "--rows", "4")[1]


def test_validate_summary(capsys, tmp_path):
    out_csv = tmp_path / "stretch.csv"
    code, out, _ = run(capsys, "validate", "--family", "d2dmot", "--rows", "4", "--routing", "d2dmot",
                       "--out", str(out_csv))
    assert code == 0
    summary = json.loads(out)
    assert summary["delivery_rate"] == 1.0
    assert summary["max_stretch"] == 1.6
    assert summary["deadlock_free"] is True
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "src,dst,routed_len,bfs_len,stretch"
    assert len(lines) == 1 + 240


def test_simulate_csv(capsys):
    argv = ["simulate", "--family", "mesh", "--rows", "3", "--measure", "200", "--warmup", "20"]
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert out.splitlines()[0] == ",".join(
        ["family", "M", "N", "ip_count", "injection", "seed", "avg_latency", "p99_latency", "throughput",
         "total_transfer_time"])
    assert run(capsys, *argv)[1] == out


def test_simulate_wormhole_json(capsys):
    code, out, _ = run(capsys, "simulate", "--family", "d2dmot", "--rows", "2", "--switching", "wormhole",
                       "--format", "json", "--measure", "100")
    assert code == 0
    assert json.loads(out)["ip_count"] == 8


def test_compare_csv(capsys):
    code, out, _ = run(capsys, "compare", "--sizes", "2", "--measure", "100", "--warmup", "10")
    assert code == 0
    assert out.splitlines()[0] == "ip_blocks,t_d2dmot,t_mot,t_mesh,speedup_pct"
    assert out.splitlines()[1].startswith("8,")


@pytest.mark.parametrize("argv, code", [
    (["build", "--family", "mot", "--rows", "3"], cli.EXIT_ERROR),
    (["build", "--family", "octagon", "--rows", "8"], cli.EXIT_ERROR),
    (["build", "--family", "custom"], cli.EXIT_USAGE),
    (["simulate", "--family", "mesh", "--flits", "0"], cli.EXIT_ERROR),
    (["validate", "--family", "mesh", "--routing", "mot"], cli.EXIT_ERROR),
])
def test_error_records(capsys, argv, code):
    got, _, err = run(capsys, *argv)
    assert got == code
    record = json.loads(err)
    assert set(record) == {"error", "code", "message"}


def test_bad_flag_exits_nonzero():
    with pytest.raises(SystemExit) as exc:
        cli.main(["analyze", "--routing", "nope"])
    assert exc.value.code != 0
