"""Exact homomorphism counts and the density inequalities built on them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from .blocks import BlockRepresentation, constants, default_beta, realize
from .errors import InputError, ResourceError
from .goodness import compute_alpha
from .graph import Graph, edge_density, mask_to_list, star_density, tensor_product
from .numeric import DPS, to_mpf
from .report import Check, Report

BRUTE_BUDGET = 10**8
DP_BUDGET = 10**7
REL_TOL = 1e-9


@dataclass(frozen=True)
class HomCounts:
    hom: int
    inj: int | None
    n: int
    h: int

    @property
    def t(self) -> Fraction:
        return Fraction(self.hom, self.n**self.h)

    @property
    def t_star(self) -> Fraction | None:
        return None if self.inj is None else Fraction(self.inj, self.n**self.h)


def _search_order(H: Graph) -> list[int]:
    """Greedy order: next vertex has the most already-placed neighbours."""
    order: list[int] = []
    placed = 0
    remaining = set(range(H.n))
    while remaining:
        v = max(remaining,
                key=lambda u: ((H.adj[u] & placed).bit_count(), H.degrees[u], -u))
        order.append(v)
        placed |= 1 << v
        remaining.remove(v)
    return order


def _count(H: Graph, G: Graph, injective: bool, budget: int) -> int:
    order = _search_order(H)
    pos = {v: k for k, v in enumerate(order)}
    back = [[pos[u] for u in mask_to_list(H.adj[v]) if pos[u] < k]
            for k, v in enumerate(order)]
    last = len(order) - 1
    image = [0] * len(order)
    full = G.full_mask
    adj = G.adj
    nodes = 0

    def rec(k: int, used: int) -> int:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise ResourceError(f"brute-force budget of {budget} nodes exceeded")
        cand = full
        for b in back[k]:
            cand &= adj[image[b]]
        if injective:
            cand &= ~used
        if k == last:
            return cand.bit_count()
        total = 0
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            image[k] = v
            total += rec(k + 1, used | low)
            cand ^= low
        return total

    return rec(0, 0)


def hom_count_brute(H, G: Graph, injective: bool = False,
                    budget: int = BRUTE_BUDGET) -> HomCounts:
    """Backtracking count of homomorphisms H -> G (and injective ones if asked)."""
    if isinstance(H, BlockRepresentation):
        H = realize(H)
    if G.n == 0:
        raise InputError("host graph must be non-empty")
    if H.n == 0:
        return HomCounts(1, 1 if injective else None, G.n, 0)
    hom = _count(H, G, False, budget)
    inj = _count(H, G, True, budget) if injective else None
    return HomCounts(hom, inj, G.n, H.n)


def hom_count_blockdp(B: BlockRepresentation, G: Graph, budget: int = DP_BUDGET) -> int:
    """Homomorphism count through the block tree.

    ``W(i, sigma)`` is the number of ways to map ``B_i`` and everything below
    it once ``P(B_i)`` has image ``sigma``.  Each vertex of ``B_i`` must land in
    ``N(sigma)``; vertices not anchoring any child contribute a plain factor
    ``|N(sigma)|``, and children whose anchor sets are linked (share a
    vertex, transitively) are summed jointly, independent groups multiply.
    """
    if G.n == 0:
        raise InputError("host graph must be non-empty")
    adj = G.adj
    full = G.full_mask
    memo: list[dict] = [dict() for _ in B.sizes]
    groups = [_anchor_groups(B, i) for i in range(len(B.sizes))]
    entries = 0

    def W(i: int, sigma: tuple[int, ...]) -> int:
        nonlocal entries
        table = memo[i]
        if sigma in table:
            return table[sigma]
        mask = full
        for v in sigma:
            mask &= adj[v]
        verts = mask_to_list(mask)
        size = len(verts)
        free, comps = groups[i]
        total = size**free
        for positions, kids in comps:
            if total == 0:
                break
            where = {p: k for k, p in enumerate(positions)}
            acc = 0
            for assign in itertools.product(verts, repeat=len(positions)):
                val = 1
                for c in kids:
                    val *= W(c, tuple(assign[where[a]] for a in B.anchors[c]))
                    if val == 0:
                        break
                acc += val
            total *= acc
        entries += 1
        if entries > budget:
            raise ResourceError(f"DP table budget of {budget} entries exceeded")
        table[sigma] = total
        return total

    return sum(W(1, sigma) for sigma in itertools.product(range(G.n), repeat=B.s))


def _anchor_groups(B: BlockRepresentation, i: int):
    """(number of unanchored positions, [(anchor positions, children), ...]) for block i."""
    kids = list(B.children[i]) if i > 0 else []
    parent = {c: c for c in kids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    owner: dict[int, int] = {}
    for c in kids:
        for a in B.anchors[c]:
            if a in owner:
                parent[find(c)] = find(owner[a])
            else:
                owner[a] = c
    comps: dict[int, list[int]] = {}
    for c in kids:
        comps.setdefault(find(c), []).append(c)
    out = []
    for members in comps.values():
        positions = sorted({a for c in members for a in B.anchors[c]})
        out.append((tuple(positions), tuple(members)))
    return B.sizes[i] - len(owner), out


def hom_count(H, G: Graph) -> int:
    """Dispatch: block DP for representations, brute force for plain graphs."""
    if isinstance(H, BlockRepresentation):
        return hom_count_blockdp(H, G)
    return hom_count_brute(H, G).hom


def hom_density(H, G: Graph) -> Fraction:
    h = H.h if isinstance(H, BlockRepresentation) else H.n
    return Fraction(hom_count(H, G), G.n**h)


def sidorenko_gap(H, G: Graph) -> Fraction:
    """t_H(G) - t_{K_2}(G)^e(H), exactly."""
    e = H.edge_count
    return hom_density(H, G) - edge_density(G) ** e


def tensor_multiplicativity_check(H, G1: Graph, G2: Graph) -> Report:
    prod = tensor_product(G1, G2)
    a, b, c = hom_count(H, G1), hom_count(H, G2), hom_count(H, prod)
    rep = Report("tensor multiplicativity",
                 fields={"hom_G1": a, "hom_G2": b, "hom_product": c,
                         "product_vertices": prod.n})
    rep.add(Check("hom(G1 x G2) = hom(G1) hom(G2)", "tensor-product", "==", c, a * b,
                  c == a * b))
    return rep


def _real_geq(lhs, rhs) -> bool:
    """lhs >= rhs up to REL_TOL relative slack (both non-negative reals)."""
    with mp.workdps(DPS):
        return to_mpf(lhs) >= to_mpf(rhs) * (1 - to_mpf(REL_TOL))


def main_theorem_check(B: BlockRepresentation, G: Graph, alpha=None) -> Report:
    """Both counting conclusions for a tree-degenerate H on a concrete G.

    ``alpha=None`` uses the guaranteed alpha for ``h = |H|`` and
    ``beta = 2^-(h+2)``; an explicit alpha marks the report non-guaranteed.
    """
    h, s, r, e = B.h, B.s, B.r, B.edge_count
    n = G.n
    if n == 0:
        raise InputError("host graph must be non-empty")
    beta = default_beta(h)
    guaranteed = alpha is None
    a = compute_alpha(h, r, beta) if guaranteed else alpha
    k = constants(B, a)
    hom = hom_count_blockdp(B, G)
    tH = Fraction(hom, n**h)
    ts, tr, t2 = star_density(G, s), star_density(G, r), edge_density(G)
    rep = Report("main theorem", guaranteed=guaranteed, fields={
        "h": h, "m": B.m, "s": s, "r": r, "q": B.q, "e_H": e,
        "beta": beta, "alpha": k.alpha, "c1": k.c1, "c2": k.c2, "c3": k.c3,
        "hom": hom, "t_H": tH, "t_K2": t2,
        "p_s": float(ts) ** (1 / s), "p_r": float(tr) ** (1 / r),
    })
    # t_H >= c1 p_s^e  <=>  (t_H / c1)^s >= t_{K_{1,s}}^e
    with mp.workdps(DPS):
        lhs1 = (to_mpf(tH) / k.c1) ** s
        rhs1 = to_mpf(ts) ** e
        shown = k.c1 * to_mpf(ts) ** (mp.mpf(e) / s)
    rep.add(Check("t_H >= c1 p_s^e(H)", "main-theorem", ">=", tH, shown,
                  _real_geq(lhs1, rhs1), guaranteed,
                  note=f"compared as (t_H/c1)^s vs t_K1s^e, rel tol {REL_TOL:g}"))
    rep.add(Check("p_s >= t_K2 (as t_K1s >= t_K2^s)", "main-theorem", ">=", ts, t2**s,
                  ts >= t2**s, True))
    gap = tH - t2**e
    rep.add(Check("sidorenko gap >= 0", "tree-degenerate-sidorenko", ">=", gap, 0, gap >= 0,
                  True))
    # hypothesis h_{K_{1,r}} > c2 n^r, i.e. h_{K_{1,r}} * alpha > 4 h n^r, exactly
    star_r = sum(d**r for d in G.degrees)
    with mp.workprec(512):
        # alpha has a 64-bit mantissa, so this product is exact at 512 bits
        hyp = bool(mp.mpf(star_r) * k.alpha > 4 * h * n**r)
    rep.add(Check("hypothesis h_K1r > c2 n^r", "main-theorem", ">", star_r, k.c2 * n**r,
                  hyp, False, note="informational: decides whether part 2 applies"))
    rep.fields["hypothesis"] = hyp
    if hyp:
        inj = hom_count_brute(B, G, injective=True).inj
        ts_star = Fraction(inj, n**h)
        rep.fields["inj"] = inj
        with mp.workdps(DPS):
            lhs2 = (to_mpf(ts_star) / k.c3) ** r
            rhs2 = to_mpf(tr) ** e
            shown2 = k.c3 * to_mpf(tr) ** (mp.mpf(e) / r)
        rep.add(Check("t*_H >= c3 p_r^e(H)", "main-theorem", ">=", ts_star, shown2,
                      _real_geq(lhs2, rhs2), guaranteed))
        rep.add(Check("p_r >= t_K2 (as t_K1r >= t_K2^r)", "main-theorem", ">=", tr, t2**r,
                      tr >= t2**r, True))
    return rep
