"""Block-by-block random embedding of a tree-degenerate H into G.

Two samplers are provided.  ``staged`` draws the root image uniformly from the
good sequences and every later block uniformly from the common neighbourhood
of its parent-set image, carrying an importance weight that converts
frequencies back to the uniform-map probability space.  ``uniform`` draws
every block uniformly from ``V(G)`` and just records which events held.

Randomness: block ``i`` of trial ``k`` reads from a Philox stream keyed by the
seed with counter words ``(0, 0, i, k)``, so any trace can be regenerated in
isolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from mpmath import mp
from statsmodels.stats.proportion import proportion_confint

from .blocks import BlockRepresentation, constants, default_beta, realize
from .errors import ParameterError, ResourceError
from .goodness import GoodnessTable, compute_alpha
from .graph import Graph, mask_to_list, star_density
from .homomorphism import hom_count_blockdp
from .numeric import DPS, to_mpf
from .report import Check, Report

Z95 = 1.959963984540054


@dataclass
class BlockEvent:
    block: int
    images: tuple[int, ...]
    E: bool | None = None
    F: bool | None = None
    L: bool | None = None
    level: int | None = None
    avoidable: bool | None = None

    def line(self) -> str:
        fl = lambda x: "-" if x is None else str(int(x))
        imgs = ",".join(map(str, self.images)) or "-"
        lvl = "-" if self.level is None else str(self.level)
        return f"block {self.block} images {imgs} E {fl(self.E)} F {fl(self.F)} L {fl(self.L)} level {lvl}"


@dataclass
class EmbeddingTrace:
    mode: str
    sampler: str
    mapping: dict[int, int] = field(default_factory=dict)
    events: list[BlockEvent] = field(default_factory=list)
    weight: Fraction = Fraction(1)
    complete: bool = False

    @property
    def all_events(self) -> bool:
        if not self.complete:
            return False
        for ev in self.events:
            if ev.E is False or ev.F is False or ev.L is False:
                return False
        return True

    @property
    def first_event(self) -> bool:
        """Whether E_1 held (root good and B_1 inside its neighbourhood)."""
        for ev in self.events:
            if ev.block == 1:
                return bool(ev.E) and (self.mode == "hom" or ev.L is not False)
        return False

    def export(self) -> str:
        return "".join(ev.line() + "\n" for ev in self.events)


def _stream(seed: int, block: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, block, trial]))


def _check_inputs(B: BlockRepresentation, G: Graph, table: GoodnessTable, mode: str):
    if mode not in ("hom", "injective"):
        raise ParameterError(f"mode must be 'hom' or 'injective', got {mode!r}")
    if table.graph != G:
        raise ParameterError("goodness table was built on a different graph")
    if table.r != B.r:
        raise ParameterError(f"table uses r={table.r}, representation has r={B.r}")
    longest = max(len(a) for a in B.anchors)
    if table.h < max(B.q, longest):
        raise ParameterError("table h must cover the block depth and every parent-set size")


def staged_sample(B: BlockRepresentation, G: Graph, table: GoodnessTable, mode: str = "hom",
                  seed: int = 0, trial: int = 0, sampler: str = "staged",
                  root: str = "good", enforce: bool = True) -> EmbeddingTrace:
    """One run of the block-by-block embedding; stops at the first failed event.

    ``root="any"`` (staged sampler only) draws the root image from all of
    ``V(G)^s`` instead of the good sequences.  With ``enforce=False`` failed
    F/L events are recorded but the map is still completed whenever the
    neighbourhoods allow it.
    """
    _check_inputs(B, G, table, mode)
    if sampler not in ("staged", "uniform"):
        raise ParameterError(f"unknown sampler {sampler!r}")
    n, s, q = G.n, B.s, B.q
    injective = mode == "injective"
    tr = EmbeddingTrace(mode, sampler)

    rng = _stream(seed, 0, trial)
    if sampler == "staged":
        if root == "good":
            pool = table.good_sequences(q, s, distinct=injective)
        elif root == "any":
            pool = np.flatnonzero(table.distinct[s]) if injective else np.arange(n**s)
        else:
            raise ParameterError(f"unknown root mode {root!r}")
        if pool.size == 0:
            tr.events.append(BlockEvent(0, ()))
            tr.events.append(BlockEvent(1, (), E=False))
            tr.weight = Fraction(0)
            return tr
        root_seq = table.sequence(s, int(pool[rng.integers(pool.size)]))
        tr.weight = Fraction(int(pool.size), n**s)
        root_ok = True
    else:
        root_seq = tuple(int(x) for x in rng.integers(n, size=s))
        root_ok = table.is_good(q, root_seq) and (not injective or len(set(root_seq)) == s)
    for v, img in zip(B.block(0), root_seq):
        tr.mapping[v] = img
    tr.events.append(BlockEvent(0, root_seq, L=(len(set(root_seq)) == s) if injective else None))
    used = set(root_seq)

    for i in range(1, len(B.sizes)):
        size = B.sizes[i]
        anchor_imgs = [tr.mapping[v] for v in B.parent_set(i)]
        nbrs = mask_to_list(G.common_mask(anchor_imgs))
        rng = _stream(seed, i, trial)
        ev = BlockEvent(i, ())
        tr.events.append(ev)
        if sampler == "staged":
            if not nbrs:
                ev.E = False
                tr.weight = Fraction(0)
                return tr
            ev.E = root_ok if i == 1 else True
            if injective:
                avail = [v for v in nbrs if v not in used]
                ev.avoidable = len(avail) >= size
                if ev.avoidable:
                    picks = rng.choice(len(avail), size=size, replace=False)
                    imgs = tuple(avail[k] for k in picks)
                    tr.weight *= Fraction(math.perm(len(avail), size), n**size)
                    ev.L = True
                else:
                    imgs = tuple(nbrs[k] for k in rng.integers(len(nbrs), size=size))
                    tr.weight *= Fraction(len(nbrs) ** size, n**size)
                    ev.L = False
            else:
                imgs = tuple(nbrs[k] for k in rng.integers(len(nbrs), size=size))
                tr.weight *= Fraction(len(nbrs) ** size, n**size)
        else:
            imgs = tuple(int(x) for x in rng.integers(n, size=size))
            nset = set(nbrs)
            ev.E = all(v in nset for v in imgs) and (root_ok if i == 1 else True)
            if injective:
                ev.L = len(set(imgs)) == size and not (used & set(imgs))
        ev.images = imgs
        for v, img in zip(B.block(i), imgs):
            tr.mapping[v] = img
        used |= set(imgs)
        if ev.E is False or ev.L is False:
            tr.weight = Fraction(0)
            if enforce or ev.E is False:
                return tr
        kids = B.children[i]
        if kids:
            ev.level = q - B.depths[i]
            ev.F = all(
                table.is_good(ev.level, [tr.mapping[v] for v in B.parent_set(c)]) for c in kids
            )
            if not ev.F:
                tr.weight = Fraction(0)
                if enforce:
                    return tr
    tr.complete = True
    return tr


def verify_trace(B: BlockRepresentation, G: Graph, trace: EmbeddingTrace) -> tuple[bool, bool]:
    """Independent edge-by-edge check: (is homomorphism, is injective)."""
    if len(trace.mapping) != B.h:
        return False, False
    f = trace.mapping
    hom = all(G.has_edge(f[u], f[v]) for u, v in realize(B).edges())
    inj = len(set(f.values())) == B.h
    return hom, inj


def wilson(successes: int, trials: int) -> tuple[float, float, float]:
    """Wilson 95% interval and the matching standard error (half-width / z)."""
    lo, hi = proportion_confint(successes, trials, alpha=0.05, method="wilson")
    return float(lo), float(hi), float(hi - lo) / (2 * Z95)


def exact_first_event_probability(B: BlockRepresentation, table: GoodnessTable,
                                  injective: bool = False) -> Fraction:
    """P(E_1) under a uniform map: sum over good roots of |N(S)|^|B_1| / n^(s+|B_1|)."""
    which = "good_distinct" if injective else "good"
    total = table.power_sum(B.q, B.s, B.sizes[1], which)
    return Fraction(total, table.n ** (B.s + B.sizes[1]))


def estimate_success(B: BlockRepresentation, G: Graph, table: GoodnessTable,
                     mode: str = "hom", trials: int = 1000, seed: int = 0,
                     sampler: str = "staged") -> Report:
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    _check_inputs(B, G, table, mode)
    n, h, e = G.n, B.h, B.edge_count
    injective = mode == "injective"
    all_ev = valid = unsound = first = 0
    weight_sum = Fraction(0)
    for k in range(trials):
        tr = staged_sample(B, G, table, mode, seed, k, sampler)
        first += tr.first_event
        if tr.all_events:
            all_ev += 1
            weight_sum += tr.weight
            is_hom, is_inj = verify_trace(B, G, tr)
            ok = is_hom and (is_inj or not injective)
            unsound += not ok
        if tr.complete:
            is_hom, is_inj = verify_trace(B, G, tr)
            valid += is_hom and (is_inj or not injective)

    rep = Report("embedding estimate", guaranteed=table.params.guaranteed)
    lo, hi, sig = wilson(all_ev, trials)
    rep.fields.update(mode=mode, sampler=sampler, trials=trials, seed=seed,
                      all_events=all_ev, all_events_rate=all_ev / trials,
                      wilson95=[lo, hi], hom_valid_rate=valid / trials)
    rep.add(Check("traces claiming all events that fail verification", "embedding-soundness",
                  "==", unsound, 0, unsound == 0, True))

    beta = default_beta(h)
    k_ = constants(B, compute_alpha(h, B.r, beta))
    ts, tr_ = star_density(G, B.s), star_density(G, B.r)
    with mp.workdps(DPS):
        bound1 = k_.c1 * to_mpf(ts) ** (mp.mpf(e) / B.s)
        bound3 = k_.c3 * to_mpf(tr_) ** (mp.mpf(e) / B.r)
    if sampler == "staged":
        est = weight_sum / trials
        rep.fields["uniform_space_estimate"] = float(est)
        if injective:
            star_r = sum(d**B.r for d in G.degrees)
            with mp.workprec(512):
                hyp = bool(mp.mpf(star_r) * k_.alpha > 4 * h * n**B.r)
            rep.fields["hypothesis_h_K1r_gt_c2_n^r"] = hyp
            rep.add(Check("P(E*_1 F_1 ... L_m) estimate >= c3 p_r^e(H)", "main-theorem", ">=",
                          est, bound3, None if not hyp else bool(to_mpf(est) >= bound3),
                          False, note="statistical, lower bound proven only under the hypothesis"))
        else:
            rep.add(Check("P(E_1 F_1 ... E_m) estimate >= c1 p_s^e(H)", "main-theorem", ">=",
                          est, bound1, bool(to_mpf(est) >= bound1), False,
                          note="statistical estimate via importance weights"))
        # goodness restriction switched off at the root, recorded only
        free_valid = 0
        for k in range(trials):
            trf = staged_sample(B, G, table, mode, seed + 1, k, "staged", root="any",
                                enforce=False)
            if trf.complete:
                hv, iv = verify_trace(B, G, trf)
                free_valid += hv and (iv or not injective)
        rep.fields["hom_valid_rate_any_root"] = free_valid / trials

    if B.m == 1:
        exact = exact_first_event_probability(B, table, injective)
        rep.fields["exact_P_E1"] = exact
        if sampler == "uniform":
            flo, fhi, fsig = wilson(first, trials)
            rep.fields["empirical_P_E1"] = first / trials
            dev = abs(first / trials - float(exact))
            rep.add(Check("|empirical - exact| P(E_1) <= 5 wilson sigma", "embedding-consistency",
                          "<=", dev, 5 * fsig, dev <= 5 * fsig, False, note="statistical"))

    try:
        exact_t = Fraction(hom_count_blockdp(B, G), n**h)
    except ResourceError:
        exact_t = None
    rng = np.random.default_rng(seed)
    maps = rng.integers(n, size=(trials, h))
    edges = realize(B).edges()
    hits = 0
    for row in maps.tolist():
        hits += all(G.has_edge(row[u], row[v]) for u, v in edges)
    ulo, uhi, usig = wilson(hits, trials)
    rep.fields["uniform_t_H_estimate"] = hits / trials
    rep.fields["uniform_t_H_wilson95"] = [ulo, uhi]
    if exact_t is not None:
        rep.fields["exact_t_H"] = exact_t
        dev = abs(hits / trials - float(exact_t))
        rep.add(Check("|uniform estimate - t_H| <= 3 wilson sigma", "embedding-consistency",
                      "<=", dev, 3 * usig, dev <= 3 * usig, False, note="statistical"))
    rep.fields["c1_p_s_eH"] = bound1
    rep.fields["c3_p_r_eH"] = bound3
    return rep
