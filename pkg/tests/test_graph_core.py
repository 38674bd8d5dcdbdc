from __future__ import annotations

import io
import itertools
import logging

import numpy as np
import pytest

from tests.conftest import random_graph
from tricolor.errors import ContractViolation, DimacsParseError
from tricolor.graph_gen import GenSpec, generate
from tricolor.graph_core import (
    Coloring,
    Graph,
    GraphMeta,
    conflicting_edges,
    format_p,
    is_proper,
    load_graph,
    penalty,
    read_dimacs,
    save_graph,
    violating_vertices,
    write_dimacs,
)


def _naive_penalty(g: Graph, colors) -> int:
    bad = set(v for v, c in enumerate(colors) if c == 0)
    for i, j in g.edges:
        if colors[i] and colors[i] == colors[j]:
            bad.update((i, j))
    return len(bad)


def _parse(text: str) -> Graph:
    return read_dimacs(io.BytesIO(text.encode("ascii")))


def test_penalty_matches_exhaustive_counter():
    rng = np.random.default_rng(3)
    for _ in range(25):
        n = int(rng.integers(1, 7))
        g = random_graph(n, float(rng.uniform(0.2, 0.8)), rng)
        for colors in itertools.product(range(4), repeat=n):
            col = Coloring(colors)
            expected = _naive_penalty(g, colors)
            assert penalty(g, col) == expected
            proper = 0 not in colors and all(colors[i] != colors[j] for i, j in g.edges)
            assert is_proper(g, col) == proper


def test_penalty_counts_vertices_not_edges(triangle):
    col = Coloring([1, 1, 1])
    assert conflicting_edges(triangle, col) == 3
    assert penalty(triangle, col) == 3
    assert penalty(triangle, Coloring([1, 1, 2])) == 2


def test_uncolored_vertices_violate(path4):
    col = Coloring([1, 0, 1, 2])
    assert violating_vertices(path4, col).tolist() == [False, True, False, False]
    assert penalty(path4, col) == 1
    assert penalty(path4, Coloring.empty(4)) == 4


def test_penalty_rejects_length_mismatch(triangle):
    with pytest.raises(ContractViolation):
        penalty(triangle, Coloring([1, 2]))


def test_coloring_rejects_bad_colors():
    with pytest.raises(ContractViolation):
        Coloring([1, 4])


@pytest.mark.parametrize("edges", [[(0, 0)], [(0, 3)], [(0, 1), (1, 0)]])
def test_graph_validation(edges):
    with pytest.raises(ContractViolation):
        Graph(3, edges)


def test_planted_partition_must_be_independent():
    with pytest.raises(ContractViolation):
        Graph(3, [(0, 1)], planted_partition=[0, 0, 1])


def test_graph_adjacency_and_degrees(path4):
    assert path4.adjacency == ((1,), (0, 2), (1, 3), (2,))
    assert path4.degrees.tolist() == [1, 2, 2, 1]
    assert path4.max_degree == 2
    assert path4.has_edge(2, 1) and not path4.has_edge(0, 3)
    with pytest.raises(ValueError):
        path4.degrees[0] = 5


def test_instance_id_naming():
    assert GraphMeta("eq", 0.014, 0, 1).instance_id(500) == "eq_500_0.014_1"
    assert GraphMeta("uni", 0.0085, 2, 3).instance_id(1000) == "uni_1000_0.0085_3_d2"
    assert GraphMeta().instance_id(12) == "graph_12"
    assert format_p(0.1 + 0.2) == "0.30000000000000004"
    assert format_p(0.010) == "0.01"


def test_dimacs_round_trip_keeps_meta_and_planted(tmp_path):
    g = Graph(
        5, [(0, 1), (1, 2), (3, 4), (0, 4)],
        planted_partition=[0, 1, 0, 1, 2],
        meta=GraphMeta("flat", 0.25, 0, 9),
    )
    path = save_graph(g, tmp_path / "g.col")
    loaded = load_graph(path)
    assert loaded == g
    assert loaded.instance_id == "flat_5_0.25_9"
    assert loaded.planted_coloring() == Coloring([1, 2, 1, 2, 3])


def test_dimacs_output_format(path4):
    sink = io.BytesIO()
    write_dimacs(path4, sink)
    assert sink.getvalue().decode("ascii").splitlines() == ["p edge 4 3", "e 1 2", "e 2 3", "e 3 4"]


def test_dimacs_accepts_comments_and_col_header():
    g = _parse("c a comment\n\np col 3 2\ne 1 2\ne 3 2\n")
    assert g.edges == ((0, 1), (1, 2))


@pytest.mark.parametrize(
    "text, line_no",
    [
        ("p edge 3 1\ne 1 4\n", 2),
        ("p edge 3 1\ne 2 2\n", 2),
        ("p edge 3 2\ne 1 2\ne 2 1\n", 3),
        ("e 1 2\np edge 3 1\n", 1),
        ("p edge 3\n", 1),
        ("p edge 3 1\np edge 3 1\n", 2),
        ("p edge 3 1\nx 1 2\n", 2),
        ("p edge 3 1\ne 1 two\n", 2),
    ],
)
def test_dimacs_errors_name_the_line(text, line_no):
    with pytest.raises(DimacsParseError) as info:
        _parse(text)
    assert info.value.line_no == line_no
    assert str(info.value).startswith(f"line {line_no}:")


def test_dimacs_missing_header():
    with pytest.raises(DimacsParseError):
        _parse("c nothing here\n")


def test_dimacs_edge_count_mismatch_warns(caplog):
    with caplog.at_level(logging.WARNING, logger="tricolor.graph_core"):
        g = _parse("p edge 3 5\ne 1 2\n")
    assert g.m == 1
    assert "declares 5 edges" in caplog.text


def test_penalty_ignores_color_labels(rng):
    for _ in range(30):
        g = random_graph(12, 0.35, rng)
        colors = rng.integers(0, 4, size=g.n)
        expected = penalty(g, Coloring(colors))
        for perm in itertools.permutations((1, 2, 3)):
            relabel = np.array((0,) + perm)
            assert penalty(g, Coloring(relabel[colors])) == expected


def test_dimacs_rewrite_is_byte_identical():
    for seed in range(100):
        graph_type = ("uni", "eq", "flat")[seed % 3]
        delta = seed % 2 if graph_type == "uni" else 0
        spec = GenSpec(graph_type, 40, round(0.05 + 0.002 * seed, 3), delta, seed)
        first = io.BytesIO()
        write_dimacs(generate(spec), first)
        second = io.BytesIO()
        write_dimacs(read_dimacs(io.BytesIO(first.getvalue())), second)
        assert second.getvalue() == first.getvalue()


def test_unnamed_graphs_get_distinct_ids(k4):
    cycle = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    assert cycle.instance_id != k4.instance_id
    assert cycle.instance_id.startswith("graph_4_")
    assert Graph(4, [(3, 0), (2, 3), (1, 2), (0, 1)]).instance_id == cycle.instance_id
