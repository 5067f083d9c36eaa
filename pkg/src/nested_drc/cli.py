"""Command-line front end.

Exit codes: 0 all asserted checks pass, 1 an asserted check failed,
2 usage error, 3 unreadable or invalid input, 4 budget exceeded,
5 parameter out of range.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import blocks as blk
from . import graph as gr
from .embedder import estimate_success, staged_sample
from .errors import InputError, ParameterError, ResourceError
from .goodness import (GoodnessParams, MAX_H, bad_mass_check, classify,
                       distinct_goodness_check, nested_goodness_check, structural_check,
                       total_sequence_check)
from .homomorphism import (hom_count_blockdp, hom_count_brute, main_theorem_check,
                           tensor_multiplicativity_check)
from .report import Check, Report, merge

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INPUT, EXIT_BUDGET, EXIT_PARAM = 0, 1, 2, 3, 4, 5

COMMANDS = ("density", "hom", "classify", "verify", "theorem", "embed", "blowup", "tensor")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="nested-drc",
        description="Exact checks of nested goodness and tree-degenerate counting bounds.",
    )
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--graph", action="append", default=[],
                    help="edge-list file, or gen:<kind>:<args> (e.g. gen:random:10,0.5); "
                         "give twice for 'tensor'")
    ap.add_argument("--blocks", help="block-spec file, or gen:star:<k> / gen:kab:<a>,<b>")
    ap.add_argument("--h", type=int)
    ap.add_argument("--r", type=int)
    ap.add_argument("--t", type=int, help="block size for 'blowup'")
    ap.add_argument("--gamma", default="", help="parent blocks of B_2.. for 'blowup', e.g. 1,1,2")
    ap.add_argument("--anchors", default="",
                    help="anchor positions per block from B_2 on, e.g. '0,1;1,0'")
    ap.add_argument("--beta", help="exact rational p/q (default 1/2^(h+2))")
    ap.add_argument("--alpha", default="auto", help="real override or 'auto'")
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--mode", choices=("hom", "injective"), default="hom")
    ap.add_argument("--sampler", choices=("staged", "uniform"), default="staged")
    ap.add_argument("--format", choices=("human", "csv", "structured"), default="human")
    ap.add_argument("--out", help="write output here instead of stdout")
    return ap


def load_graph_arg(arg: str, seed: int) -> gr.Graph:
    if arg.startswith("gen:"):
        _, kind, *rest = arg.split(":")
        params = rest[0].split(",") if rest and rest[0] else []
        try:
            return gr.generate(kind, *params, seed=seed)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(f"bad generator spec {arg!r}: {exc}") from None
    return gr.load_graph(arg)


def load_blocks_arg(arg: str) -> blk.BlockRepresentation:
    if arg.startswith("gen:"):
        _, kind, params = arg.split(":")
        nums = [int(x) for x in params.split(",")]
        if kind == "star":
            return blk.star(*nums)
        if kind == "kab":
            return blk.complete_bipartite_rep(*nums)
        raise InputError(f"unknown block generator {kind!r}")
    return blk.load_block_spec(arg)


def _beta(args, h: int) -> Fraction:
    if args.beta is None:
        return Fraction(1, 2 ** (h + 2))
    try:
        return Fraction(args.beta)
    except (ValueError, ZeroDivisionError):
        raise ParameterError(f"cannot read beta {args.beta!r} as p/q") from None


def _alpha(args):
    if args.alpha in (None, "auto"):
        return None
    try:
        return Fraction(float(args.alpha))
    except ValueError:
        raise ParameterError(f"cannot read alpha {args.alpha!r}") from None


def _one_graph(args) -> gr.Graph:
    if len(args.graph) != 1:
        raise InputError("exactly one --graph is required")
    return load_graph_arg(args.graph[0], args.seed)


def _need_blocks(args) -> blk.BlockRepresentation:
    if not args.blocks:
        raise InputError("--blocks is required")
    return load_blocks_arg(args.blocks)


def _params(args, default_h: int | None = None, default_r: int = 1) -> GoodnessParams:
    h = args.h if args.h is not None else default_h
    if h is None:
        raise InputError("--h is required")
    r = args.r if args.r is not None else default_r
    return GoodnessParams.build(h, r, beta=_beta(args, h), alpha=_alpha(args))


# -- commands ------------------------------------------------------------------------


def cmd_density(args) -> Report:
    g = _one_graph(args)
    rep = Report("r-norm densities", fields={"n": g.n, "edges": g.edge_count})
    ts = {}
    for r in range(1, 5):
        p, t = gr.r_norm_density(g, r)
        ts[r] = t
        rep.fields[f"p_{r}"] = p
        rep.fields[f"t_K1{r}"] = t
    for s in range(1, 5):
        for r in range(s + 1, 5):
            rep.add(Check("p_r >= p_s (as t_r^s >= t_s^r)", "norm-monotonicity", ">=",
                          ts[r] ** s, ts[s] ** r, ts[r] ** s >= ts[s] ** r, True,
                          {"s": s, "r": r}))
    return rep


def cmd_hom(args) -> Report:
    g = _one_graph(args)
    b = _need_blocks(args)
    dp = hom_count_blockdp(b, g)
    rep = Report("homomorphism counts", fields={"h": b.h, "e_H": b.edge_count, "n": g.n,
                                                 "hom": dp})
    try:
        brute = hom_count_brute(b, g, injective=True)
    except ResourceError:
        brute = None
    if brute is not None:
        rep.fields["hom_brute"] = brute.hom
        rep.fields["inj"] = brute.inj
        rep.fields["t_star"] = brute.t_star
        rep.add(Check("block DP = brute force", "hom-oracle", "==", dp, brute.hom,
                      dp == brute.hom, True))
    t = Fraction(dp, g.n**b.h)
    gap = t - gr.edge_density(g) ** b.edge_count
    rep.fields["t_H"] = t
    rep.fields["sidorenko_gap"] = gap
    rep.add(Check("sidorenko gap >= 0", "tree-degenerate-sidorenko", ">=", gap, 0, gap >= 0,
                  True))
    return rep


def cmd_classify(args) -> str:
    g = _one_graph(args)
    table = classify(g, _params(args))
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["level", "length", "sequence", "good", "nbhd_size"])
        for line in table.export_lines():
            w.writerow(line.split())
        return buf.getvalue()
    if args.format == "structured":
        pr = table.params
        doc = {
            "n": table.n, "h": pr.h, "r": pr.r, "alpha": str(pr.alpha), "beta": str(pr.beta),
            "guaranteed": pr.guaranteed, "t_star_r": str(table.t),
            "rows": [line.split() for line in table.export_lines()],
        }
        return json.dumps(doc, indent=1) + "\n"
    return table.export()


def cmd_verify(args) -> Report:
    g = _one_graph(args)
    table = classify(g, _params(args))
    parts = [structural_check(table), nested_goodness_check(table), bad_mass_check(table),
             distinct_goodness_check(table)]
    parts += [total_sequence_check(g, j, table.r) for j in range(1, table.h + 1)]
    rep = merge("goodness verification", parts)
    rep.guaranteed = table.params.guaranteed
    return rep


def cmd_theorem(args) -> Report:
    return main_theorem_check(_need_blocks(args), _one_graph(args), _alpha(args))


def cmd_embed(args) -> Report:
    g = _one_graph(args)
    b = _need_blocks(args)
    h = args.h if args.h is not None else b.h
    if h > MAX_H:
        raise ResourceError(f"goodness tables are capped at h <= {MAX_H}; pass a smaller --h")
    params = GoodnessParams.build(h, b.r, beta=_beta(args, h), alpha=_alpha(args))
    table = classify(g, params)
    rep = estimate_success(b, g, table, args.mode, args.trials, args.seed, args.sampler)
    rep.fields["first_trace"] = staged_sample(b, g, table, args.mode, args.seed, 0,
                                              args.sampler).export().strip().splitlines()
    return rep


def cmd_blowup(args) -> str:
    if args.r is None or args.t is None:
        raise InputError("--r and --t are required")
    gamma = [int(x) for x in args.gamma.split(",") if x.strip()]
    anchors = None
    if args.anchors:
        anchors = [tuple(int(x) for x in part.split(",")) for part in args.anchors.split(";")]
    b = blk.rt_blowup(args.r, args.t, gamma, anchors)
    return blk.format_block_spec(b)


def cmd_tensor(args) -> Report:
    if len(args.graph) != 2:
        raise InputError("tensor needs exactly two --graph arguments")
    g1, g2 = (load_graph_arg(a, args.seed + k) for k, a in enumerate(args.graph))
    if args.blocks:
        targets = [("H", load_blocks_arg(args.blocks))]
    else:
        targets = [("K2", blk.star(1)), ("K12", blk.star(2)),
                   ("C4", blk.complete_bipartite_rep(2, 2))]
    reps = []
    for name, b in targets:
        r = tensor_multiplicativity_check(b, g1, g2)
        for c in r.checks:
            c.params["H"] = name
        reps.append(r)
    out = merge("tensor multiplicativity", reps)
    prod = gr.tensor_product(g1, g2)
    out.fields = {"G1_vertices": g1.n, "G2_vertices": g2.n, "product_vertices": prod.n,
                  "product_edges": prod.edge_count}
    for (name, _), r in zip(targets, reps):
        out.fields[f"hom_{name}"] = [r.fields["hom_G1"], r.fields["hom_G2"],
                                     r.fields["hom_product"]]
    out.fields["product"] = gr.format_graph(prod).splitlines()
    return out


HANDLERS = {
    "density": cmd_density, "hom": cmd_hom, "classify": cmd_classify, "verify": cmd_verify,
    "theorem": cmd_theorem, "embed": cmd_embed, "blowup": cmd_blowup, "tensor": cmd_tensor,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        result = HANDLERS[args.command](args)
    except ParameterError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except ResourceError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InputError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if isinstance(result, Report):
        text = result.render(args.format)
        status = EXIT_OK if result.ok else EXIT_FAIL
    else:
        text, status = result, EXIT_OK
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
