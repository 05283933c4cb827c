"""Text formats for instances (``p dts``) and move sequences (``p seq``).

Instance file, one directive per line::

    c <comment>
    p dts <n> <m> <k>
    a <u> <v>            (m lines)
    s <v1> ... <vk>
    t <v1> ... <vk>

Sequence file::

    p seq <L>
    m <u> <v>            (L lines)

Blank lines and ``c`` lines are ignored in both.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .graph import Arc, Digraph, DTSError, Instance, is_independent


class ParseError(DTSError, ValueError):
    """Malformed input; ``line`` and ``column`` are 1-based."""

    def __init__(self, message: str, line: int, column: int = 1) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class _Token:
    text: str
    column: int


def _lines(text: str) -> Iterator[tuple[int, list[_Token]]]:
    """Yield ``(line number, tokens)`` for every non-blank, non-comment line."""
    for lineno, raw in enumerate(text.split("\n"), start=1):
        raw = raw.rstrip("\r")
        toks: list[_Token] = []
        col = 0
        for part in raw.split(" "):
            if part:
                toks.append(_Token(part, col + 1))
            col += len(part) + 1
        if not toks or toks[0].text == "c":
            continue
        if "\t" in raw:
            raise ParseError("tab characters are not allowed", lineno, raw.index("\t") + 1)
        yield lineno, toks


def _int(tok: _Token, line: int, lo: int = 0, hi: int | None = None, what: str = "value") -> int:
    if not tok.text.isdigit():
        raise ParseError(f"expected a nonnegative integer {what}, got {tok.text!r}", line, tok.column)
    v = int(tok.text)
    if v < lo or (hi is not None and v > hi):
        bound = f"{lo}..{hi}" if hi is not None else f">= {lo}"
        raise ParseError(f"{what} {v} out of range {bound}", line, tok.column)
    return v


def _arity(toks: list[_Token], count: int, line: int, directive: str) -> None:
    if len(toks) - 1 != count:
        col = toks[count + 1].column if len(toks) - 1 > count else toks[-1].column + len(toks[-1].text)
        raise ParseError(f"'{directive}' line needs {count} fields, found {len(toks) - 1}", line, col)


def _vertex_set(toks: list[_Token], line: int, n: int, k: int, name: str) -> list[int]:
    _arity(toks, k, line, toks[0].text)
    out: list[int] = []
    seen: set[int] = set()
    for tok in toks[1:]:
        v = _int(tok, line, 1, n, "vertex")
        if v in seen:
            raise ParseError(f"{name} repeats vertex {v}", line, tok.column)
        seen.add(v)
        out.append(v)
    return out


def parse_instance(text: str) -> Instance:
    header: tuple[int, int, int] | None = None
    arcs: list[Arc] = []
    arc_lines: dict[Arc, int] = {}
    sets: dict[str, tuple[list[int], int]] = {}
    last_line = 0
    for line, toks in _lines(text):
        last_line = line
        d = toks[0].text
        if header is None:
            if d != "p":
                raise ParseError("first directive must be 'p dts <n> <m> <k>'", line, toks[0].column)
            _arity(toks, 4, line, "p")
            if toks[1].text != "dts":
                raise ParseError(f"expected format 'dts', got {toks[1].text!r}", line, toks[1].column)
            n = _int(toks[2], line, what="vertex count")
            m = _int(toks[3], line, what="arc count")
            k = _int(toks[4], line, 0, n, "token count")
            header = (n, m, k)
            continue
        n, m, k = header
        if d == "p":
            raise ParseError("duplicate 'p' line", line, toks[0].column)
        if d == "a":
            if sets:
                raise ParseError("arc lines must precede 's' and 't'", line, toks[0].column)
            _arity(toks, 2, line, "a")
            u = _int(toks[1], line, 1, n, "vertex")
            v = _int(toks[2], line, 1, n, "vertex")
            if u == v:
                raise ParseError(f"self-loop at vertex {u}", line, toks[1].column)
            if (u, v) in arc_lines:
                raise ParseError(f"duplicate arc ({u}, {v}), first given on line {arc_lines[(u, v)]}", line, toks[1].column)
            if len(arcs) == m:
                raise ParseError(f"more than {m} arc lines", line, toks[0].column)
            arc_lines[(u, v)] = line
            arcs.append((u, v))
        elif d in ("s", "t"):
            if d in sets:
                raise ParseError(f"duplicate '{d}' line", line, toks[0].column)
            sets[d] = (_vertex_set(toks, line, n, k, "source" if d == "s" else "target"), line)
        else:
            raise ParseError(f"unknown directive {d!r}", line, toks[0].column)
    if header is None:
        raise ParseError("missing 'p dts' header", max(last_line, 1))
    n, m, k = header
    if len(arcs) != m:
        raise ParseError(f"header declares {m} arcs but {len(arcs)} were given", last_line + 1)
    for d in ("s", "t"):
        if d not in sets:
            raise ParseError(f"missing '{d}' line", last_line + 1)
    g = Digraph(n, arcs)
    for d, name in (("s", "source"), ("t", "target")):
        vs, line = sets[d]
        if not is_independent(g, vs):
            raise ParseError(f"{name} is not an independent set", line, 1)
    return Instance(g, sets["s"][0], sets["t"][0])


def write_instance(inst: Instance, comments: Iterable[str] = ()) -> str:
    g = inst.graph
    out = [f"c {c}" for c in comments]
    out.append(f"p dts {g.n} {g.m} {inst.k}")
    out.extend(f"a {u} {v}" for u, v in g.arcs)
    out.append(" ".join(["s"] + [str(v) for v in sorted(inst.source)]))
    out.append(" ".join(["t"] + [str(v) for v in sorted(inst.target)]))
    return "\n".join(out) + "\n"


def parse_sequence(text: str) -> list[Arc]:
    expected: int | None = None
    moves: list[Arc] = []
    last_line = 0
    for line, toks in _lines(text):
        last_line = line
        d = toks[0].text
        if expected is None:
            if d != "p":
                raise ParseError("first directive must be 'p seq <L>'", line, toks[0].column)
            _arity(toks, 2, line, "p")
            if toks[1].text != "seq":
                raise ParseError(f"expected format 'seq', got {toks[1].text!r}", line, toks[1].column)
            expected = _int(toks[2], line, what="move count")
            continue
        if d != "m":
            raise ParseError(f"unknown directive {d!r}", line, toks[0].column)
        _arity(toks, 2, line, "m")
        if len(moves) == expected:
            raise ParseError(f"more than {expected} move lines", line, toks[0].column)
        moves.append((_int(toks[1], line, what="vertex"), _int(toks[2], line, what="vertex")))
    if expected is None:
        raise ParseError("missing 'p seq' header", max(last_line, 1))
    if len(moves) != expected:
        raise ParseError(f"header declares {expected} moves but {len(moves)} were given", last_line + 1)
    return moves


def write_sequence(moves: Iterable[Arc]) -> str:
    moves = list(moves)
    return "".join([f"p seq {len(moves)}\n"] + [f"m {u} {v}\n" for u, v in moves])


def read_instance(path: str | Path) -> Instance:
    return parse_instance(Path(path).read_text(encoding="ascii"))


def read_sequence(path: str | Path) -> list[Arc]:
    return parse_sequence(Path(path).read_text(encoding="ascii"))
