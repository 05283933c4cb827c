from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIXTURES, polytree_instances
from dtslide.fileio import (
    ParseError,
    parse_instance,
    parse_sequence,
    read_instance,
    read_sequence,
    write_instance,
    write_sequence,
)

PATH3_TEXT = "p dts 3 2 1\na 1 2\na 2 3\ns 1\nt 3\n"


def test_parse_path3():
    inst = parse_instance(PATH3_TEXT)
    assert inst.graph.n == 3 and inst.graph.arcs == ((1, 2), (2, 3))
    assert inst.source == {1} and inst.target == {3}


def test_comments_and_blank_lines_are_ignored():
    inst = parse_instance("c hello\n\np dts 3 2 1\nc mid\na 1 2\n\na 2 3\ns 1\nt 3")
    assert inst.graph.m == 2


def test_dependent_source_is_rejected():
    with pytest.raises(ParseError, match="source is not an independent set") as exc:
        parse_instance("p dts 2 1 2\na 1 2\ns 1 2\nt 1 2\n")
    assert exc.value.line == 3


@pytest.mark.parametrize(
    "text, line, column, fragment",
    [
        ("a 1 2\n", 1, 1, "first directive"),
        ("p dts 3 2 1\na 1 2\na 1 2\ns 1\nt 3\n", 3, 3, "duplicate arc (1, 2), first given on line 2"),
        ("p dts 3 2 1\na 1 1\na 2 3\ns 1\nt 3\n", 2, 3, "self-loop"),
        ("p dts 3 2 1\na 1 4\na 2 3\ns 1\nt 3\n", 2, 5, "out of range"),
        ("p dts 3 2 1\na 1 2\na 2 3\na 3 1\ns 1\nt 3\n", 4, 1, "more than 2 arc lines"),
        ("p dts 3 2 1\na 1 2\ns 1\nt 3\n", 5, 1, "declares 2 arcs"),
        ("p dts 3 2 1\na 1 2\na 2 3\ns 1\nt 3\nt 3\n", 6, 1, "duplicate 't' line"),
        ("p dts 3 2 1\na 1 2\na 2 3\ns 1\n", 5, 1, "missing 't' line"),
        ("p dts 3 2 1\na 1 2\na 2 3\ns 1 2\nt 3\n", 4, 5, "needs 1 fields"),
        ("p dts 3 2 1\na 1 2\ns 1\na 2 3\nt 3\n", 4, 1, "must precede"),
        ("p dts 3 2 1\na 1 x\na 2 3\ns 1\nt 3\n", 2, 5, "nonnegative integer"),
        ("p dts 3 2 1\na 1 2\na 2 3\nq 1\n", 4, 1, "unknown directive"),
        ("p dts 3 2 1\na\t1 2\n", 2, 2, "tab"),
        ("p graph 3 2 1\n", 1, 3, "expected format 'dts'"),
        ("p dts 3 2 4\n", 1, 11, "token count 4 out of range"),
        ("", 1, 1, "missing 'p dts' header"),
    ],
)
def test_parse_errors_report_position(text, line, column, fragment):
    with pytest.raises(ParseError) as exc:
        parse_instance(text)
    assert fragment in str(exc.value)
    assert (exc.value.line, exc.value.column) == (line, column)
    assert str(exc.value).startswith(f"line {line}, column {column}: ")


def test_sequence_round_trip():
    moves = [(1, 2), (2, 3)]
    text = write_sequence(moves)
    assert text == "p seq 2\nm 1 2\nm 2 3\n"
    assert parse_sequence(text) == moves
    assert parse_sequence("p seq 0\n") == []


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("m 1 2\n", "first directive"),
        ("p seq 1\n", "declares 1 moves"),
        ("p seq 1\nm 1 2\nm 2 3\n", "more than 1 move"),
        ("p seq 1\nx 1 2\n", "unknown directive"),
        ("p seq 1\nm 1\n", "needs 2 fields"),
        ("", "missing 'p seq' header"),
    ],
)
def test_sequence_parse_errors(text, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_sequence(text)


def test_fixtures_load():
    star = read_instance(FIXTURES / "star.dts")
    assert star.graph.arcs == ((2, 1), (3, 1), (1, 4), (1, 5))
    assert read_sequence(FIXTURES / "bad.seq") == [(2, 3), (1, 2)]


@given(polytree_instances(max_n=12, max_k=4))
@settings(max_examples=200, deadline=None)
def test_instance_round_trip(inst):
    back = parse_instance(write_instance(inst, ["generated"]))
    assert back.graph.arcs == inst.graph.arcs and back.graph.n == inst.graph.n
    assert back.source == inst.source and back.target == inst.target


def _mutations(text: str) -> list[str]:
    """Edits of a valid file that each break a stated invariant of the format."""
    lines = text.rstrip("\n").split("\n")
    header = lines[0].split()
    n, m, k = map(int, header[2:])
    arcs = [i for i, line in enumerate(lines) if line.startswith("a ")]
    s_line = next(i for i, line in enumerate(lines) if line.startswith("s"))
    out = []

    def edit(i: int, new: str | None) -> str:
        copy = lines[:]
        if new is None:
            del copy[i]
        else:
            copy[i] = new
        return "\n".join(copy) + "\n"

    out.append(edit(0, f"p dts {n} {m + 1} {k}"))
    out.append(edit(0, f"p dts {n} {m} {k + 1}"))
    out.append(edit(s_line, None))
    out.append(edit(s_line + 1, None))
    out.append("\n".join(lines[1:]) + "\n")
    out.append(edit(s_line, lines[s_line] + f" {n + 1}"))
    if k >= 1:
        out.append(edit(s_line, "s" + " 0" * k))
    out.append(text + lines[s_line] + "\n")
    out.append(text + lines[0] + "\n")
    if arcs:
        out.append(edit(arcs[0], None))
        out.append(edit(arcs[0], f"a {lines[arcs[0]].split()[1]} {lines[arcs[0]].split()[1]}"))
        out.append(edit(arcs[0], lines[arcs[0]] + "\n" + lines[arcs[0]]))
        out.append(edit(arcs[0], f"a 1 {n + 1}"))
        out.append(edit(arcs[0], f"a -1 {n}"))
        u, v = lines[arcs[0]].split()[1:]
        if k == 2:
            # tokens on both ends of an arc
            out.append(edit(s_line, f"s {u} {v}"))
    if k >= 2:
        first = lines[s_line].split()[1]
        out.append(edit(s_line, "s" + f" {first}" * k))
    out.append(edit(s_line, lines[s_line].replace("s", "s\t", 1)))
    return out


@given(polytree_instances(min_n=2, max_n=10, max_k=3), st.data())
@settings(max_examples=300, deadline=None)
def test_parser_rejects_invariant_breaking_mutations(inst, data):
    text = write_instance(inst)
    mutant = data.draw(st.sampled_from(_mutations(text)))
    with pytest.raises(ParseError):
        parse_instance(mutant)
