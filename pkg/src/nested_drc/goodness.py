"""Nested goodness of vertex sequences and exact checks of its counting bounds.

Sequences of length ``j`` over ``V(G)`` are indexed lexicographically, i.e.
``S = (v_1, ..., v_j)`` has index ``sum(v_k * n**(j-k))``.  Every per-length
array in :class:`GoodnessTable` uses that order, so ``arr.reshape((n,)*j)``
is addressable by the sequence itself.

All threshold comparisons are exact.  The density enters only through
``t = t_{K_{1,r}}(G)``; wherever ``p = t**(1/r)`` would appear with a
fractional exponent, both sides are raised to the ``r``-th power first.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from mpmath import mp, mpf, root

from .errors import InputError, ParameterError, ResourceError
from .graph import Graph, falling_factorial, star_density
from .numeric import DPS, mpf_to_fraction, to_fraction, to_mpf
from .report import Check, Report

MAX_N = 14
MAX_H = 4
SHRINK = mpf(1) - mpf("5e-10")


# -- alpha schedule ---------------------------------------------------------------


def alpha_schedule(alpha, h: int, beta) -> list[mpf]:
    """``[a_0, ..., a_h]`` with ``a_0 = alpha`` and ``a_i = alpha + h (a_{i-1}/beta)^(1/h)``."""
    with mp.workdps(DPS):
        a = to_mpf(alpha)
        b = to_mpf(beta)
        out = [+a]
        for _ in range(h):
            out.append(a + h * root(out[-1] / b, h))
    return out


def _schedule_ok(alpha, h: int, beta) -> bool:
    sched = alpha_schedule(alpha, h, beta)
    with mp.workdps(DPS):
        increasing = all(x < y for x, y in zip(sched, sched[1:]))
        return increasing and sched[-1] < to_mpf(beta)


@lru_cache(maxsize=None)
def _compute_alpha(h: int, beta: Fraction) -> mpf:
    with mp.workdps(DPS):
        log_beta = mp.log(to_mpf(beta), 2)
        hi = log_beta
        span = mpf(64)
        lo = hi - span
        # alpha_h behaves like alpha**(1/h**h), so the admissible exponent can
        # be enormous; grow the bracket geometrically.
        while not _schedule_ok(mpf(2) ** lo, h, beta):
            span *= 2
            lo = hi - span
        for _ in range(64):
            mid = (lo + hi) / 2
            if _schedule_ok(mpf(2) ** mid, h, beta):
                lo = mid
            else:
                hi = mid
        alpha = mpf(2) ** lo * SHRINK
    # 64-bit mantissa: an exact binary rational of modest size
    with mp.workprec(64):
        alpha = +alpha
    while not _schedule_ok(alpha, h, beta):
        with mp.workprec(64):
            alpha = alpha * SHRINK
    return alpha


def compute_alpha(h: int, r: int, beta) -> mpf:
    """Largest alpha (to bisection accuracy) whose schedule stays below ``beta``.

    The schedule does not involve ``r``; it is accepted for interface
    symmetry and validated.  Returns an mpmath float, which is an exact
    binary rational; use :func:`mpf_to_fraction` for rational arithmetic.
    """
    beta = to_fraction(beta)
    if not 0 < beta < 1:
        raise ParameterError("beta must lie in (0, 1)")
    if not 1 <= r <= h:
        raise ParameterError("need 1 <= r <= h")
    return _compute_alpha(h, beta)


# -- parameters & table -----------------------------------------------------------


@dataclass(frozen=True)
class GoodnessParams:
    alpha: Fraction
    beta: Fraction
    h: int
    r: int
    guaranteed: bool
    schedule: tuple = field(compare=False)

    @classmethod
    def build(cls, h: int, r: int, beta=None, alpha=None) -> "GoodnessParams":
        """``alpha=None`` computes the guaranteed alpha; anything else is an override."""
        if not 1 <= r <= h:
            raise ParameterError("need 1 <= r <= h")
        beta = Fraction(1, 2 ** (h + 2)) if beta is None else to_fraction(beta)
        if not 0 < beta < 1:
            raise ParameterError("beta must lie in (0, 1)")
        if alpha is None:
            a = mpf_to_fraction(compute_alpha(h, r, beta))
            guaranteed = True
        else:
            a = to_fraction(alpha)
            guaranteed = False
            if a <= 0:
                raise ParameterError("alpha must be positive")
        return cls(a, beta, h, r, guaranteed, tuple(alpha_schedule(a, h, beta)))


@dataclass
class GoodnessTable:
    """Classification of every sequence of length ``1..h`` at every level ``0..h``.

    ``sizes[j]``, ``distinct[j]`` and ``good[i][j]`` are flat arrays over the
    ``n**j`` sequences of length ``j`` (index 0 unused).
    """

    graph: Graph
    params: GoodnessParams
    t: Fraction
    sizes: list
    distinct: list
    good: list

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def h(self) -> int:
        return self.params.h

    @property
    def r(self) -> int:
        return self.params.r

    @property
    def p(self) -> float:
        return float(self.t) ** (1.0 / self.r)

    def index(self, seq) -> int:
        idx = 0
        for v in seq:
            idx = idx * self.n + int(v)
        return idx

    def sequence(self, j: int, idx: int) -> tuple[int, ...]:
        out = []
        for _ in range(j):
            idx, v = divmod(idx, self.n)
            out.append(v)
        return tuple(reversed(out))

    def is_good(self, i: int, seq) -> bool:
        j = len(seq)
        if not 1 <= j <= self.h:
            raise InputError(f"sequence length {j} outside 1..{self.h}")
        if not 0 <= i <= self.h:
            raise InputError(f"level {i} outside 0..{self.h}")
        return bool(self.good[i][j][self.index(seq)])

    def neighborhood_size(self, seq) -> int:
        return int(self.sizes[len(seq)][self.index(seq)])

    def good_sequences(self, i: int, j: int, distinct: bool = False) -> np.ndarray:
        """Indices of the i-good sequences of length j (optionally without repetition)."""
        sel = self.good[i][j]
        if distinct:
            sel = sel & self.distinct[j]
        return np.flatnonzero(sel)

    def power_sum(self, i: int, j: int, exponent: int, which: str = "good") -> int:
        """Exact sum of ``|N(S)|**exponent`` over A_{i,j}, B_{i,j}, A*_{i,j} or all of V^j."""
        sel = {
            "good": lambda: self.good[i][j],
            "bad": lambda: ~self.good[i][j],
            "good_distinct": lambda: self.good[i][j] & self.distinct[j],
            "all": lambda: np.ones_like(self.good[0][j]),
            "all_distinct": lambda: self.distinct[j],
        }[which]()
        counts = np.bincount(self.sizes[j][sel], minlength=self.n + 1)
        return sum(int(c) * s**exponent for s, c in enumerate(counts.tolist()))

    def max_size(self, i: int, j: int) -> int:
        sel = self.good[i][j]
        return int(self.sizes[j][sel].max()) if sel.any() else 0

    def export_lines(self):
        """``i j v1,v2,... good |N(S)|`` lines in (i, j, lexicographic) order."""
        for i in range(self.h + 1):
            for j in range(1, self.h + 1):
                g = self.good[i][j]
                sz = self.sizes[j]
                for idx in range(self.n**j):
                    seq = ",".join(map(str, self.sequence(j, idx)))
                    yield f"{i} {j} {seq} {int(g[idx])} {int(sz[idx])}"

    def export(self) -> str:
        return "".join(line + "\n" for line in self.export_lines())


def _zero_good_by_size(n: int, j: int, params: GoodnessParams, t: Fraction) -> np.ndarray:
    """ok[k] iff a sequence of length j with |N(S)| = k is 0-good.

    |N| >= alpha p^j n  <=>  |N|^r >= alpha^r t^j n^r  (both sides >= 0).
    """
    r = params.r
    rhs = params.alpha**r * t**j * n**r
    return np.array([k**r >= rhs for k in range(n + 1)], dtype=bool)


def _count_condition(count: int, size: int, k: int, beta: Fraction) -> bool:
    """count >= (1 - beta) * size**k, exactly."""
    return count * beta.denominator >= (beta.denominator - beta.numerator) * size**k


def classify(g: Graph, params: GoodnessParams, memoize: bool = True) -> GoodnessTable:
    """Classify every sequence of length 1..h at levels 0..h."""
    n, h, r = g.n, params.h, params.r
    if n == 0:
        raise InputError("cannot classify sequences of the empty graph")
    if n > MAX_N or h > MAX_H:
        raise ResourceError(f"classification is capped at n <= {MAX_N}, h <= {MAX_H}")
    t = star_density(g, r)
    adj = np.array(g.adj, dtype=np.int64)
    popcnt = np.array([bin(x).count("1") for x in range(1 << n)], dtype=np.int64)

    masks = [None, adj.copy()]
    for j in range(2, h + 1):
        masks.append((masks[-1][:, None] & adj[None, :]).ravel())
    sizes = [None] + [popcnt[m] for m in masks[1:]]
    distinct = [None] + [_distinct_mask(n, j) for j in range(1, h + 1)]

    zero_ok = [None] + [_zero_good_by_size(n, j, params, t) for j in range(1, h + 1)]
    good = [[None] + [zero_ok[j][sizes[j]] for j in range(1, h + 1)]]
    for i in range(1, h + 1):
        prev = good[i - 1]
        if memoize:
            level = _classify_level_memo(n, h, masks, sizes, zero_ok, prev, params.beta)
        else:
            level = _classify_level_direct(g, h, zero_ok, prev, params.beta)
        good.append(level)
    return GoodnessTable(g, params, t, sizes, distinct, good)


def _classify_level_memo(n, h, masks, sizes, zero_ok, prev, beta):
    """One level, grouping sequences by their common neighbourhood.

    i-goodness of S depends only on (|S|, N(S)), and the count of
    (i-1)-good k-sequences inside a set depends only on (k, set).
    """
    counts: dict[tuple[int, int], int] = {}

    def count_in(k: int, mask: int) -> int:
        key = (k, mask)
        if key not in counts:
            verts = [v for v in range(n) if mask >> v & 1]
            if not verts:
                counts[key] = 0
            else:
                cube = prev[k].reshape((n,) * k)
                counts[key] = int(cube[np.ix_(*([verts] * k))].sum())
        return counts[key]

    level = [None]
    for j in range(1, h + 1):
        uniq, inv = np.unique(masks[j], return_inverse=True)
        verdict = np.zeros(uniq.size, dtype=bool)
        for u, mask in enumerate(uniq.tolist()):
            size = bin(mask).count("1")
            if not zero_ok[j][size]:
                continue
            verdict[u] = all(
                _count_condition(count_in(k, mask), size, k, beta) for k in range(j, h + 1)
            )
        level.append(verdict[inv.ravel()])
    return level


def _classify_level_direct(g: Graph, h, zero_ok, prev, beta):
    """Reference path: per sequence, no sharing between equal neighbourhoods."""
    n = g.n
    level = [None]
    for j in range(1, h + 1):
        out = np.zeros(n**j, dtype=bool)
        for idx, seq in enumerate(itertools.product(range(n), repeat=j)):
            nbrs = [v for v in range(n) if all(g.has_edge(v, x) for x in seq)]
            if not zero_ok[j][len(nbrs)]:
                continue
            ok = True
            for k in range(j, h + 1):
                count = 0
                for tup in itertools.product(nbrs, repeat=k):
                    tidx = 0
                    for v in tup:
                        tidx = tidx * n + v
                    count += bool(prev[k][tidx])
                if not _count_condition(count, len(nbrs), k, beta):
                    ok = False
                    break
            out[idx] = ok
        level.append(out)
    return level


# -- checks -------------------------------------------------------------------------


def _tag(report: Report, table: GoodnessTable) -> Report:
    pr = table.params
    report.guaranteed = pr.guaranteed
    report.fields.update(
        n=table.n, h=pr.h, r=pr.r, alpha=pr.alpha, beta=pr.beta,
        t_star_r=table.t, p_r=table.p,
    )
    return report


def _real_rhs(coef, n: int, power_n: int, t: Fraction, t_exp_num: int, r: int):
    """coef * n^power_n * t^(t_exp_num / r) as an mpmath real (display only)."""
    with mp.workdps(DPS):
        return to_mpf(coef) * mpf(n) ** power_n * to_mpf(t) ** (mpf(t_exp_num) / r)


def nested_goodness_check(table: GoodnessTable) -> Report:
    """Sum of |N(S)|^r over i-good j-sequences is at least (1-beta) n^(j+r) p^(jr)."""
    rep = _tag(Report("nested goodness"), table)
    n, h, r, t, beta = table.n, table.h, table.r, table.t, table.params.beta
    asserted = table.params.guaranteed
    for i in range(1, h + 1):
        for j in range(r, h + 1):
            lhs = table.power_sum(i, j, r)
            rhs = (1 - beta) * n ** (j + r) * t**j
            rep.add(Check("good-mass", "nested-goodness", ">=", lhs, rhs, lhs >= rhs,
                          asserted, {"i": i, "j": j}))
            best = table.max_size(i, j)
            wit = (1 - beta) * t**j * n**r
            rep.add(Check("good-witness^r", "nested-goodness", ">=", best**r, wit,
                          best**r >= wit, asserted, {"i": i, "j": j},
                          "largest |N(S)| over i-good S, raised to r"))
    return rep


def bad_mass_check(table: GoodnessTable) -> Report:
    """Bad-sequence mass bounds, both the beta form and the per-level alpha_i form."""
    rep = _tag(Report("bad mass"), table)
    n, h, r, t = table.n, table.h, table.r, table.t
    beta = table.params.beta
    sched = [to_fraction(a) for a in table.params.schedule]
    asserted = table.params.guaranteed
    for i in range(h + 1):
        for j in range(1, h + 1):
            for ell in range(1, j + 1):
                lhs = table.power_sum(i, j, ell, "bad")
                base = n ** (r * (j + ell)) * t ** (j * ell)
                ok = lhs**r <= beta**r * base
                rep.add(Check("bad-mass", "bad-mass", "<=", lhs,
                              _real_rhs(beta, n, j + ell, t, j * ell, r), ok, asserted,
                              {"i": i, "j": j, "l": ell}))
                ok_i = lhs**r <= sched[i] ** r * base
                rep.add(Check("bad-mass-level", "bad-mass", "<=", lhs,
                              _real_rhs(sched[i], n, j + ell, t, j * ell, r), ok_i, asserted,
                              {"i": i, "j": j, "l": ell}, "alpha_i refinement"))
    return rep


def _distinct_hypothesis(g: Graph, j: int, r: int) -> bool:
    """p > 4j n^(-1/r)  <=>  t n > (4j)^r."""
    return star_density(g, r) * g.n > (4 * j) ** r


def total_sequence_check(g: Graph, j: int, r: int) -> Report:
    """Power sums of |N(S)| over all j-sequences, and over repetition-free ones."""
    if g.n == 0:
        raise InputError("empty graph")
    if j < 1 or r < 1:
        raise ParameterError("need j, r >= 1")
    n = g.n
    rep = Report("total sequences", fields={"n": n, "j": j, "r": r})
    hom = sum(d**r for d in g.degrees)
    sizes = _all_sizes(g, j)
    lhs = sum(int(c) * s**r for s, c in enumerate(np.bincount(sizes, minlength=n + 1).tolist()))
    rep.add(Check("all-sequences", "total-sequence", ">=", lhs * n ** (r * (j - 1)), hom**j,
                  lhs * n ** (r * (j - 1)) >= hom**j, True, {"j": j, "r": r},
                  "sum |N(S)|^r * n^(r(j-1)) vs h_{K_{1,r}}^j"))
    t = Fraction(hom, n ** (r + 1))
    hyp = t * n > (4 * j) ** r
    rep.fields["hypothesis"] = hyp
    rep.fields["falling_factorial"] = falling_factorial(n, j)
    if hyp:
        dist = _distinct_mask(n, j)
        lhs2 = sum(int(c) * s**r for s, c in
                   enumerate(np.bincount(sizes[dist], minlength=n + 1).tolist()))
        rhs2 = Fraction(1, 2 ** (j + 1)) * n ** (j + r) * t**j
        rep.add(Check("distinct-sequences", "total-sequence", ">=", lhs2, rhs2,
                      lhs2 >= rhs2, True, {"j": j, "r": r}))
    else:
        rep.add(Check("distinct-sequences", "total-sequence", ">=", None, None, None, True,
                      {"j": j, "r": r}, "hypothesis p > 4j n^(-1/r) fails"))
    return rep


def _all_sizes(g: Graph, j: int) -> np.ndarray:
    """|N(S)| for every S in V^j, lexicographic order; works for any n."""
    n = g.n
    if n ** j > 50_000_000:
        raise ResourceError("too many sequences to enumerate")
    if n <= 62:
        adj = np.array(g.adj, dtype=np.int64)
        masks = adj
        for _ in range(j - 1):
            masks = (masks[:, None] & adj[None, :]).ravel()
        # popcount by bytes
        out = np.zeros(masks.size, dtype=np.int64)
        m = masks.copy()
        table = np.array([bin(x).count("1") for x in range(256)], dtype=np.int64)
        while m.any():
            out += table[m & 0xFF]
            m >>= 8
        return out
    return np.array([g.common_mask(s).bit_count()
                     for s in itertools.product(range(n), repeat=j)], dtype=np.int64)


def _distinct_mask(n: int, j: int) -> np.ndarray:
    grid = np.indices((n,) * j).reshape(j, -1)
    ok = np.ones(n**j, dtype=bool)
    for a in range(j):
        for b in range(a + 1, j):
            ok &= grid[a] != grid[b]
    return ok


def distinct_goodness_check(table: GoodnessTable) -> Report:
    """Repetition-free i-good mass, where the density hypothesis holds."""
    rep = _tag(Report("distinct goodness"), table)
    n, h, r, t, beta = table.n, table.h, table.r, table.t, table.params.beta
    asserted = table.params.guaranteed
    for j in range(r, h + 1):
        hyp = _distinct_hypothesis(table.graph, j, r)
        for i in range(1, h + 1):
            if not hyp:
                rep.add(Check("distinct-good-mass", "distinct-goodness", ">=", None, None,
                              None, asserted, {"i": i, "j": j},
                              "hypothesis p > 4j n^(-1/r) fails"))
                continue
            lhs = table.power_sum(i, j, r, "good_distinct")
            rhs = (Fraction(1, 2 ** (j + 1)) - beta) * n ** (j + r) * t**j
            rep.add(Check("distinct-good-mass", "distinct-goodness", ">=", lhs, rhs,
                          lhs >= rhs, asserted, {"i": i, "j": j}))
    return rep


def structural_check(table: GoodnessTable) -> Report:
    """Consistency facts of the classification itself."""
    rep = _tag(Report("classification structure"), table)
    h = table.h
    bad = 0
    for i in range(1, h + 1):
        for j in range(1, h + 1):
            bad += int((table.good[i][j] & ~table.good[0][j]).sum())
    rep.add(Check("i-good implies 0-good", "goodness-definition", "==", bad, 0, bad == 0,
                  True, note="number of violating sequences"))
    return rep
