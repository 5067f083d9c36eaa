"""Simple undirected graphs with bitset adjacency.

Adjacency rows are Python ints used as bitsets: bit ``u`` of ``adj[v]`` is set
iff ``uv`` is an edge.  A common neighbourhood is then an ``|S|``-fold AND and
its size a popcount.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError, ParseError, ResourceError, ValidationError

VERTEX_CAP = 4096


def popcount(mask: int) -> int:
    return mask.bit_count()


def mask_to_set(mask: int) -> frozenset[int]:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return frozenset(out)


def mask_to_list(mask: int) -> list[int]:
    return sorted(mask_to_set(mask))


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple graph on vertices ``0..n-1``."""

    n: int
    adj: tuple[int, ...]

    def __post_init__(self):
        if len(self.adj) != self.n:
            raise ValidationError("adjacency length does not match n")
        for v, row in enumerate(self.adj):
            if row >> v & 1:
                raise ValidationError(f"self-loop at vertex {v}")
            if row >> self.n:
                raise ValidationError(f"vertex {v} has a neighbour >= n")
        for v, row in enumerate(self.adj):
            for u in mask_to_list(row):
                if not self.adj[u] >> v & 1:
                    raise ValidationError(f"asymmetric adjacency between {v} and {u}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        if n < 0:
            raise InputError("n must be non-negative")
        if n > VERTEX_CAP:
            raise ResourceError(f"{n} vertices exceeds the cap of {VERTEX_CAP}")
        rows = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.adj == other.adj

    def __hash__(self):
        return hash((self.n, self.adj))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.edge_count})"

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(popcount(row) for row in self.adj)

    @cached_property
    def edge_count(self) -> int:
        return sum(self.degrees) // 2

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def neighbors(self, v: int) -> list[int]:
        return mask_to_list(self.adj[v])

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in mask_to_list(self.adj[u]) if u < v]

    def check_vertices(self, seq: Iterable[int]) -> None:
        for v in seq:
            if not (isinstance(v, (int, np.integer)) and 0 <= v < self.n):
                raise InputError(f"vertex {v!r} out of range for n={self.n}")

    def common_mask(self, seq: Iterable[int]) -> int:
        """Bitset of N(seq); unchecked fast path."""
        mask = self.full_mask
        for v in seq:
            mask &= self.adj[v]
        return mask


def common_neighborhood(g: Graph, seq: Sequence[int]) -> frozenset[int]:
    """Vertices adjacent to every element of ``seq``."""
    if len(seq) == 0:
        raise InputError("sequence must have length >= 1")
    g.check_vertices(seq)
    return mask_to_set(g.common_mask(seq))


def star_hom_count(g: Graph, r: int) -> int:
    """Homomorphisms from K_{1,r} into g, i.e. the sum of d(v)^r."""
    if r < 1:
        raise InputError("r must be >= 1")
    return sum(d**r for d in g.degrees)


def star_density(g: Graph, r: int) -> Fraction:
    """Exact t_{K_{1,r}}(g) = h_{K_{1,r}}(g) / n^(r+1)."""
    if g.n == 0:
        raise InputError("density of the empty graph is undefined")
    return Fraction(star_hom_count(g, r), g.n ** (r + 1))


def r_norm_density(g: Graph, r: int) -> tuple[float, Fraction]:
    """Return ``(p_r, t)`` where ``t = t_{K_{1,r}}`` exactly and ``p_r = t**(1/r)``.

    The float is for display only; comparisons elsewhere raise ``t`` to
    integer powers instead.
    """
    t = star_density(g, r)
    return float(t) ** (1.0 / r), t


def edge_density(g: Graph) -> Fraction:
    return star_density(g, 1)


def power_mean(xs: Sequence[float], a: float) -> float:
    if len(xs) == 0:
        raise InputError("power mean of an empty list")
    if a < 1:
        raise InputError("exponent must be >= 1")
    arr = np.asarray(xs, dtype=float)
    if (arr < 0).any():
        raise InputError("power mean needs non-negative values")
    top = arr.max()
    if top == 0:
        return 0.0
    # scale by the maximum so large exponents do not overflow
    return float(top * np.mean((arr / top) ** a) ** (1.0 / a))


def tensor_product(g1: Graph, g2: Graph, cap: int = VERTEX_CAP) -> Graph:
    """Vertex ``(u1, u2)`` gets id ``u1 * g2.n + u2``."""
    if g1.n == 0 or g2.n == 0:
        raise InputError("tensor product needs non-empty graphs")
    n = g1.n * g2.n
    if n > cap:
        raise ResourceError(f"tensor product has {n} vertices, cap is {cap}")
    n2 = g2.n
    rows = []
    for u1 in range(g1.n):
        for u2 in range(n2):
            row = 0
            for v1 in mask_to_list(g1.adj[u1]):
                row |= g2.adj[u2] << (v1 * n2)
            rows.append(row)
    return Graph(n, tuple(rows))


# -- generators ---------------------------------------------------------------


def complete(n: int) -> Graph:
    return Graph.from_edges(n, ((u, v) for u in range(n) for v in range(u + 1, n)))


def empty(n: int) -> Graph:
    return Graph.from_edges(n, ())


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, ((u, a + v) for u in range(a) for v in range(b)))


def path(n: int) -> Graph:
    return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)))


def cycle(n: int) -> Graph:
    if n < 3:
        raise InputError("a cycle needs at least 3 vertices")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)])


def random_graph(n: int, p: float, seed: int) -> Graph:
    """G(n, p) with pairs visited in lexicographic order."""
    if not 0.0 <= p <= 1.0:
        raise InputError("edge probability must lie in [0, 1]")
    if seed is None:
        raise InputError("random graphs need an explicit seed")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return Graph.from_edges(n, zip(iu[keep].tolist(), ju[keep].tolist()))


def generate(kind: str, *params, seed: int | None = None) -> Graph:
    """Dispatch by name: complete, empty, complete_bipartite (kab), path, cycle, random, file."""
    if kind == "random":
        n, p = params
        return random_graph(int(n), float(p), seed)
    if kind == "file":
        return load_graph(params[0])
    builders = {
        "complete": complete,
        "empty": empty,
        "complete_bipartite": complete_bipartite,
        "kab": complete_bipartite,
        "path": path,
        "cycle": cycle,
    }
    if kind not in builders:
        raise InputError(f"unknown graph kind {kind!r}")
    return builders[kind](*(int(x) for x in params))


# -- edge-list format ----------------------------------------------------------


def parse_graph(text: str) -> Graph:
    header = None
    edges = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            nums = [int(x) for x in parts]
        except ValueError:
            raise ParseError(f"expected integers, got {line!r}", lineno) from None
        if len(nums) != 2:
            raise ParseError(f"expected two integers, got {len(nums)}", lineno)
        if header is None:
            n, m = nums
            if n < 0 or m < 0:
                raise ParseError("n and m must be non-negative", lineno)
            if n > VERTEX_CAP:
                raise ParseError(f"n={n} exceeds the cap of {VERTEX_CAP}", lineno)
            header = (n, m)
            continue
        u, v = nums
        n = header[0]
        if not 0 <= u < v < n:
            raise ParseError(f"edge must satisfy 0 <= u < v < {n}", lineno)
        if (u, v) in seen:
            raise ParseError(f"duplicate edge {u} {v}", lineno)
        seen.add((u, v))
        edges.append((u, v))
    if header is None:
        raise ParseError("missing 'n m' header", 1)
    if len(edges) != header[1]:
        raise ParseError(f"header declares {header[1]} edges, found {len(edges)}")
    return Graph.from_edges(header[0], edges)


def format_graph(g: Graph) -> str:
    lines = [f"{g.n} {g.edge_count}"]
    lines += [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def load_graph(path_like) -> Graph:
    return parse_graph(Path(path_like).read_text())


def save_graph(g: Graph, path_like) -> None:
    Path(path_like).write_text(format_graph(g))


def falling_factorial(n: int, j: int) -> int:
    return math.perm(n, j) if 0 <= j <= n else 0
