"""Block representations of tree-degenerate bipartite graphs.

A representation is a list of block sizes plus, for every non-root block,
its parent block and an ordered list of anchor positions inside that parent
block.  Vertex ids of the realised graph are assigned block by block, so
block ``i`` owns the contiguous range ``offset[i] .. offset[i] + size[i] - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Sequence

from mpmath import mp, mpf

from .errors import ParameterError, ParseError, ValidationError
from .graph import Graph
from .numeric import to_mpf

PRECISION_DPS = 60


@dataclass(frozen=True)
class BlockRepresentation:
    """Validated block representation ``(B_0, ..., B_m, P)``.

    ``parent[i]`` is the parent block index (``-1`` for the root) and
    ``anchors[i]`` the ordered positions of ``P(B_i)`` inside that block.
    """

    sizes: tuple[int, ...]
    parent: tuple[int, ...]
    anchors: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        _validate(self.sizes, self.parent, self.anchors)

    @property
    def m(self) -> int:
        return len(self.sizes) - 1

    @property
    def s(self) -> int:
        return self.sizes[0]

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for size in self.sizes:
            out.append(acc)
            acc += size
        return tuple(out)

    @property
    def h(self) -> int:
        return sum(self.sizes)

    def block(self, i: int) -> list[int]:
        return list(range(self.offsets[i], self.offsets[i] + self.sizes[i]))

    @property
    def blocks(self) -> list[list[int]]:
        return [self.block(i) for i in range(len(self.sizes))]

    def parent_set(self, i: int) -> list[int]:
        """Vertex ids of ``P(B_i)`` in anchor order."""
        base = self.offsets[self.parent[i]]
        return [base + a for a in self.anchors[i]]

    @cached_property
    def r(self) -> int:
        return max(len(self.anchors[i]) for i in range(1, len(self.sizes)))

    @cached_property
    def depths(self) -> tuple[int, ...]:
        d = [0]
        for i in range(1, len(self.sizes)):
            d.append(d[self.parent[i]] + 1)
        return tuple(d)

    @property
    def q(self) -> int:
        return max(self.depths)

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        kids = [[] for _ in self.sizes]
        for i in range(1, len(self.sizes)):
            kids[self.parent[i]].append(i)
        return tuple(tuple(k) for k in kids)

    def parent_sets_in(self, i: int) -> list[list[int]]:
        """The collection of parent sets contained in ``B_i`` (one per child)."""
        return [self.parent_set(c) for c in self.children[i]]

    @property
    def edge_count(self) -> int:
        return sum(len(self.anchors[i]) * self.sizes[i] for i in range(1, len(self.sizes)))

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for i in range(1, len(self.sizes)):
            for u in self.parent_set(i):
                for v in self.block(i):
                    out.append((min(u, v), max(u, v)))
        return sorted(out)

    def side_of(self) -> list[int]:
        """Depth parity of each vertex of H."""
        side = []
        for i, size in enumerate(self.sizes):
            side += [self.depths[i] % 2] * size
        return side


def _validate(sizes, parent, anchors) -> None:
    if len(sizes) < 2:
        raise ValidationError("need a root block and at least one non-root block")
    if not (len(sizes) == len(parent) == len(anchors)):
        raise ValidationError("sizes, parents and anchors must have equal length")
    for i, size in enumerate(sizes):
        if size < 1:
            raise ValidationError(f"block {i} is empty")
    if parent[0] != -1 or anchors[0]:
        raise ValidationError("block 0 is the root and has no parent")
    if parent[1] != 0 or tuple(anchors[1]) != tuple(range(sizes[0])):
        raise ValidationError("P(B_1) must be exactly B_0")
    for i in range(2, len(sizes)):
        g = parent[i]
        if g == 0:
            raise ValidationError(f"block {i}: parent block 0 is only allowed for block 1")
        if not 1 <= g <= i - 1:
            raise ValidationError(f"block {i}: parent block must satisfy 1 <= gamma(i) <= i-1")
        a = anchors[i]
        if not a:
            raise ValidationError(f"block {i}: empty parent set")
        if len(set(a)) != len(a):
            raise ValidationError(f"block {i}: repeated anchor")
        if any(not 0 <= x < sizes[g] for x in a):
            raise ValidationError(f"block {i}: P(B_i) is not a subset of B_gamma(i)")
        if len(anchors[g]) > len(a):
            raise ValidationError(
                f"block {i}: |P(B_gamma(i))| = {len(anchors[g])} > |P(B_i)| = {len(a)}"
            )


def from_lists(blocks: Sequence[Sequence[int]], parent: Sequence[int],
               parent_sets: Sequence[Sequence[int]]) -> BlockRepresentation:
    """Build from explicit vertex lists.

    ``blocks[i]`` are vertex ids, ``parent_sets[i]`` the ids of ``P(B_i)``.
    Blocks must already be numbered consecutively (block-by-block order).
    """
    flat = [v for b in blocks for v in b]
    if sorted(flat) != list(range(len(flat))):
        raise ValidationError("blocks must partition 0..|H|-1 without overlap")
    if flat != list(range(len(flat))):
        raise ValidationError("vertex ids must be assigned block by block")
    anchors = [()]
    for i in range(1, len(blocks)):
        pb = list(blocks[parent[i]]) if parent[i] >= 0 else []
        try:
            anchors.append(tuple(pb.index(v) for v in parent_sets[i]))
        except ValueError:
            raise ValidationError(f"block {i}: P(B_i) is not a subset of B_gamma(i)") from None
    return BlockRepresentation(
        tuple(len(b) for b in blocks), (-1, *parent[1:]), tuple(anchors)
    )


# -- block-spec text format -----------------------------------------------------


def parse_block_spec(text: str) -> BlockRepresentation:
    count = None
    sizes: dict[int, int] = {}
    parent: dict[int, int] = {}
    anchors: dict[int, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if count is None:
            if len(tok) != 2 or tok[0] != "blocks":
                raise ParseError("first line must be 'blocks <count>'", lineno)
            count = _int(tok[1], lineno)
            if count < 2:
                raise ParseError("need at least two blocks", lineno)
            continue
        if tok[0] != "block" or len(tok) < 4 or tok[2] != "size":
            raise ParseError(f"cannot parse {line!r}", lineno)
        i = _int(tok[1], lineno)
        if i in sizes:
            raise ParseError(f"block {i} declared twice", lineno)
        if i != len(sizes):
            raise ParseError(f"expected block {len(sizes)}, got block {i}", lineno)
        sizes[i] = _int(tok[3], lineno)
        rest = tok[4:]
        if i == 0:
            if rest:
                raise ParseError("block 0 takes only a size", lineno)
            parent[0], anchors[0] = -1, ()
            continue
        if len(rest) < 3 or rest[0] != "parent" or rest[2] != "anchors":
            raise ParseError("expected 'parent <j> anchors ...'", lineno)
        g = _int(rest[1], lineno)
        parent[i] = g
        tail = rest[3:]
        if tail == ["all"]:
            anchors[i] = "all"
        else:
            if not tail:
                raise ParseError("missing anchor count", lineno)
            k = _int(tail[0], lineno)
            pos = [_int(x, lineno) for x in tail[1:]]
            if len(pos) != k:
                raise ParseError(f"declared {k} anchors, listed {len(pos)}", lineno)
            anchors[i] = tuple(pos)
        if i == 1 and (g != 0 or anchors[i] != "all"):
            raise ParseError("block 1 must read 'parent 0 anchors all'", lineno)
    if count is None:
        raise ParseError("empty block spec", 1)
    if len(sizes) != count:
        raise ParseError(f"declared {count} blocks, found {len(sizes)}")
    resolved = []
    for i in range(count):
        a = anchors[i]
        if a == "all":
            g = parent[i]
            if not 0 <= g < i:
                raise ValidationError(f"block {i}: parent block must precede it")
            a = tuple(range(sizes[g]))
        resolved.append(a)
    return BlockRepresentation(
        tuple(sizes[i] for i in range(count)),
        tuple(parent[i] for i in range(count)),
        tuple(resolved),
    )


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer, got {tok!r}", lineno) from None


def format_block_spec(b: BlockRepresentation) -> str:
    lines = [f"blocks {len(b.sizes)}", f"block 0 size {b.sizes[0]}"]
    for i in range(1, len(b.sizes)):
        g = b.parent[i]
        a = b.anchors[i]
        if a == tuple(range(b.sizes[g])):
            tail = "all"
        else:
            tail = f"{len(a)} " + " ".join(str(x) for x in a)
        lines.append(f"block {i} size {b.sizes[i]} parent {g} anchors {tail}")
    return "\n".join(lines) + "\n"


def load_block_spec(path_like) -> BlockRepresentation:
    return parse_block_spec(Path(path_like).read_text())


# -- constructions -----------------------------------------------------------------


def star(k: int) -> BlockRepresentation:
    """K_{1,k}."""
    return BlockRepresentation((1, k), (-1, 0), ((), (0,)))


def complete_bipartite_rep(a: int, b: int) -> BlockRepresentation:
    """K_{a,b} with B_0 the side of size ``a``."""
    return BlockRepresentation((a, b), (-1, 0), ((), tuple(range(a))))


def rt_blowup(r: int, t: int, gamma: Sequence[int],
              anchor_choices: Sequence[Sequence[int]] | None = None) -> BlockRepresentation:
    """(r, t)-blowup of a tree.

    ``gamma[k]`` is the parent block of block ``k + 2`` and
    ``anchor_choices[k]`` the r positions it is joined to; the default
    anchors are the first r positions of the parent block.
    """
    if not 1 <= r <= t:
        raise ParameterError("need 1 <= r <= t")
    m = len(gamma) + 1
    if anchor_choices is None:
        anchor_choices = [tuple(range(r))] * len(gamma)
    if len(anchor_choices) != len(gamma):
        raise ParameterError("one anchor choice per block beyond B_1 is required")
    anchors = [(), tuple(range(r))]
    for k, (g, a) in enumerate(zip(gamma, anchor_choices)):
        i = k + 2
        if not 1 <= g <= i - 1:
            raise ValidationError(
                f"block {i}: gamma(i) = {g} violates 1 <= gamma(i) <= i-1"
            )
        if len(a) != r or len(set(a)) != r:
            raise ParameterError(f"block {i}: anchor choice must be an {r}-subset")
        anchors.append(tuple(a))
    return BlockRepresentation(
        (r,) + (t,) * m, (-1, 0, *gamma), tuple(anchors)
    )


def realize(b: BlockRepresentation) -> Graph:
    return Graph.from_edges(b.h, b.edges())


# -- main-theorem constants -------------------------------------------------------


@dataclass(frozen=True)
class MainTheoremConstants:
    h: int
    beta: Fraction
    alpha: mpf
    c1: mpf
    c2: mpf
    c3: mpf
    edge_count: int


def default_beta(h: int) -> Fraction:
    return Fraction(1, 2 ** (h + 2))


def constants(b: BlockRepresentation, alpha) -> MainTheoremConstants:
    """Constants of the counting theorem; reals are mpmath values at 60 digits."""
    h = b.h
    beta = default_beta(h)
    with mp.workdps(PRECISION_DPS):
        a = to_mpf(alpha)
        bt = to_mpf(beta)
        if not 0 < a < bt:
            raise ParameterError(f"alpha must lie in (0, beta) with beta = {beta}")
        tail = sum(b.sizes[2:])
        c1 = (1 - bt) ** (mpf(b.sizes[1]) / b.sizes[0]) * a**tail * (1 - h * bt) ** (b.m - 1)
        c2 = 4 * h / a
        c3 = c1 / mpf(2) ** (h * h)
        c1, c2, c3 = +c1, +c2, +c3
    return MainTheoremConstants(h, beta, a, c1, c2, c3, b.edge_count)
