"""Command line experiment runner.

Subcommands: sample, count, marginals, entropy, gibbs-test, trunk-stats,
nu-a.  Every run that produces a JSON report echoes its configuration, the
library version, and the seed, and confines the only volatile value to the
single ``timestamp`` line, so identical invocations are byte-identical apart
from that line.  Exit status: 0 success, 2 validation errors, 3 capacity
errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import __version__
from .errors import CapacityError, SpanforestError, ValidationError
from .graphs import Forest, build_box, build_torus, induced_window, load_graph
from .kirchhoff import count_rooted_forests, count_spanning_trees, edge_marginals, enumerate_forests
from .randomness import RandomStream
from .sampler import sample_boundary_mode, wilson_rooted_forest, wilson_tree
from . import entropy as entropy_mod
from . import foreststats as stats_mod
from . import gibbs as gibbs_mod
from . import reports


def worker_count() -> int:
    """Worker cap from USF_THREADS (default 1, minimum 1)."""
    raw = os.environ.get("USF_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValidationError(f"USF_THREADS must be an integer, got {raw!r}")


# -- argument plumbing ---------------------------------------------------------------


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise ValidationError(f"expected a list of integers, got {text!r}")


def _parse_dim_side(text: str) -> tuple[int, int]:
    parts = _parse_int_list(text)
    if len(parts) != 2:
        raise ValidationError(f"expected DIM,SIDE, got {text!r}")
    return parts[0], parts[1]


def _load_source(args) -> "Graph":
    given = [bool(args.graph), bool(args.box), bool(getattr(args, "torus", None))]
    if sum(given) != 1:
        raise ValidationError("give exactly one of --graph, --box, --torus")
    if args.graph:
        return load_graph(args.graph)
    if args.box:
        dim, side = _parse_dim_side(args.box)
        return build_box(dim, side)
    dim, side = _parse_dim_side(args.torus)
    return build_torus(dim, side)


def _window_from_spec(g, spec: str):
    """corner..extent spec: 2*dim integers 'c0,..,cD-1,e0,..,eD-1'."""
    if g.coords is None:
        raise ValidationError("--window needs a lattice graph with coordinates")
    nums = _parse_int_list(spec)
    dim = len(g.coords[0])
    if len(nums) != 2 * dim:
        raise ValidationError(
            f"window spec needs {2 * dim} integers (corner then extent), got {len(nums)}"
        )
    corner, extent = nums[:dim], nums[dim:]
    if any(e < 1 for e in extent):
        raise ValidationError("window extent must be positive")
    verts = []
    idx = [0] * dim
    total = 1
    for e in extent:
        total *= e
    for flat in range(total):
        rest = flat
        coord = []
        for d in range(dim):
            coord.append(corner[d] + rest % extent[d])
            rest //= extent[d]
        verts.append(g.vertex_at(tuple(coord)))
    return induced_window(g, verts)


def _apply_config_defaults(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Pull --config FILE out of argv and install its values as defaults."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise ValidationError("--config needs a file argument")
    path = argv[i + 1]
    rest = argv[:i] + argv[i + 2 :]
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read config {path}: {exc}")
    if not isinstance(data, dict):
        raise ValidationError("config file must hold a JSON object")
    valid = {a.dest for a in parser._actions}
    subparsers = [
        sp
        for action in parser._actions
        if isinstance(action, argparse._SubParsersAction)
        for sp in action.choices.values()
    ]
    for sp in subparsers:
        valid.update(a.dest for a in sp._actions)
    for key, value in data.items():
        if key not in valid:
            raise ValidationError(f"unknown config key {key!r}")
        coerced = str(value) if not isinstance(value, (list, dict, int, bool)) else value
        for sp in subparsers:
            sp.set_defaults(**{key: coerced})
        parser.set_defaults(**{key: coerced})
    return rest


def _write_output(text: str, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_report(args, command: str, config: dict, results: dict, started: float):
    payload = {
        "command": command,
        "config": config,
        "version": __version__,
        "seed": getattr(args, "seed", None),
        "results": results,
    }
    text = reports.render_report(payload, wall_seconds=time.perf_counter() - started)
    _write_output(text, args.out)


# -- subcommands ---------------------------------------------------------------------


def _cmd_sample(args):
    started = time.perf_counter()
    g = _load_source(args)
    rng = RandomStream(args.seed)
    forests = []
    for _ in range(args.samples):
        if args.mode == "rooted":
            if not args.roots:
                raise ValidationError("rooted mode needs --roots")
            f = wilson_rooted_forest(g, _parse_int_list(args.roots), rng)
        else:
            f = sample_boundary_mode(g, args.mode, rng)
        forests.append(f)
    lines = [g.content_hash()]
    lines.extend(" ".join(str(e) for e in f.edge_ids) for f in forests)
    _write_output("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_count(args):
    g = _load_source(args)
    if args.boundary_mode:
        forests = enumerate_forests(g, "boundary-at-least-one")
        sys.stdout.write(f"{len(forests)}\n")
        return 0
    if args.roots:
        lc = count_rooted_forests(g, _parse_int_list(args.roots))
    else:
        lc = count_spanning_trees(g)
    if lc.exact_count is not None:
        sys.stdout.write(f"{lc.exact_count}\n")
    else:
        sys.stdout.write(f"log={reports.format_float(lc.value)}\n")
    return 0


def _cmd_marginals(args):
    g = _load_source(args)
    table = edge_marginals(g)
    rows = [
        (eid, g.edges[eid][0], g.edges[eid][1], table.probs[eid])
        for eid in range(len(g.edges))
    ]
    _write_output(reports.render_csv(["edge_id", "u", "v", "prob"], rows), args.out)
    return 0


def _cmd_entropy(args):
    started = time.perf_counter()
    config = {
        "dim": args.dim,
        "sides": args.sides,
        "method": args.method,
        "samples": args.samples,
        "window": args.window,
        "seed": args.seed,
    }
    if args.method in ("wired", "enum"):
        sides = _parse_int_list(args.sides) if args.sides else []
        if not sides:
            raise ValidationError("--sides required for wired/enum methods")
        method = "wired-exact" if args.method == "wired" else "mu-gn-enumerated"
        report = entropy_mod.per_site_entropy_sequence(args.dim, sides, method)
        results = {
            "records": [
                {
                    "descriptor": r.descriptor,
                    "vertex_count": r.vertex_count,
                    "log_count": r.log_count,
                    "per_site": r.per_site,
                    "method": r.method,
                }
                for r in report.records
            ],
            "limit_estimate": report.limit_estimate,
        }
    elif args.method == "oracle":
        results = {"oracle_per_site": entropy_mod.torus_entropy_oracle(args.dim)}
    elif args.method == "plugin":
        sides = _parse_int_list(args.sides) if args.sides else []
        if len(sides) != 1:
            raise ValidationError("plugin method needs exactly one side")
        g = build_box(args.dim, sides[0])
        if not args.window:
            raise ValidationError("plugin method needs --window")
        w = _window_from_spec(g, args.window)
        rng = RandomStream(args.seed)
        draws = [sample_boundary_mode(g, "wired", rng) for _ in range(args.samples)]
        est, se = entropy_mod.plugin_entropy(draws, w)
        results = {"plugin_per_site": est, "jackknife_se": se, "samples": args.samples}
    else:
        raise ValidationError(f"unknown method {args.method!r}")
    _emit_report(args, "entropy", config, results, started)
    return 0


def _cmd_gibbs_test(args):
    started = time.perf_counter()
    g = _load_source(args)
    if not args.window:
        raise ValidationError("gibbs-test needs --window")
    w = _window_from_spec(g, args.window)
    rng = RandomStream(args.seed)
    edge_ids = list(w.internal_edges)
    before = {e: 0 for e in edge_ids}
    after = {e: 0 for e in edge_ids}
    preserved = 0
    for _ in range(args.samples):
        if args.mode == "weak":
            f = sample_boundary_mode(g, "wired", rng)
            p0 = gibbs_mod.inside_relation(w, gibbs_mod.split_forest_at_window(f, w)[0])
            f2 = gibbs_mod.weak_gibbs_resample(g, w, f, rng)
            p1 = gibbs_mod.inside_relation(w, gibbs_mod.split_forest_at_window(f2, w)[0])
            if p0.canonical_form == p1.canonical_form:
                preserved += 1
        else:
            f = wilson_tree(g, 0, rng)
            f2 = gibbs_mod.strong_gibbs_resample(g, w, f, rng)
            preserved += 1 if f2.is_spanning_tree() else 0
        fset = set(f.edge_ids)
        f2set = set(f2.edge_ids)
        for e in edge_ids:
            before[e] += 1 if e in fset else 0
            after[e] += 1 if e in f2set else 0
    n = args.samples
    results = {
        "mode": args.mode,
        "samples": n,
        "preserved": preserved,
        "window_edges": [
            {
                "edge_id": e,
                "before_freq": before[e] / n,
                "after_freq": after[e] / n,
            }
            for e in edge_ids
        ],
    }
    config = {
        "source": args.graph or args.box or args.torus,
        "window": args.window,
        "samples": args.samples,
        "seed": args.seed,
        "mode": args.mode,
    }
    _emit_report(args, "gibbs-test", config, results, started)
    return 0


def _cmd_trunk_stats(args):
    started = time.perf_counter()
    g = _load_source(args)
    rng = RandomStream(args.seed)
    cfg = stats_mod.NearIntersectionConfig(k=args.k, margin=args.margin)
    roots = _parse_int_list(args.roots) if args.roots else None
    trunk_counts = []
    near_counts = []
    for _ in range(args.samples):
        if roots:
            f = wilson_rooted_forest(g, roots, rng)
        else:
            f = sample_boundary_mode(g, args.mode, rng)
        trunks = stats_mod.detect_trunks(g, f)
        trunk_counts.append(len(trunks.trunks))
        near_counts.append(stats_mod.count_near_intersections(g, trunks, cfg))
    n = args.samples
    results = {
        "samples": n,
        "k": args.k,
        "margin": cfg.effective_margin,
        "mean_trunk_count": sum(trunk_counts) / n,
        "mean_near_intersections": sum(near_counts) / n,
        "max_near_intersections": max(near_counts),
        "trunk_count_histogram": {
            str(c): trunk_counts.count(c) for c in sorted(set(trunk_counts))
        },
    }
    config = {
        "source": args.graph or args.box or args.torus,
        "seed": args.seed,
        "samples": args.samples,
        "k": args.k,
        "mode": args.mode,
        "roots": args.roots,
    }
    _emit_report(args, "trunk-stats", config, results, started)
    return 0


def _cmd_nu_a(args):
    started = time.perf_counter()
    g = _load_source(args)
    if not args.cb or not args.cf:
        raise ValidationError("nu-a needs --cb and --cf vertex lists")
    m_values = _parse_int_list(args.m)
    cfg = stats_mod.NearIntersectionConfig(k=args.k, margin=args.margin)
    rng = RandomStream(args.seed)
    estimates = stats_mod.estimate_nu_A_curve(
        g,
        _parse_int_list(args.cb),
        _parse_int_list(args.cf),
        m_values,
        cfg,
        rng,
        args.samples,
    )
    decay = [
        {
            "m": e.m,
            "hits": e.hits,
            "estimate": e.estimate,
            "ci_low": e.ci_low,
            "ci_high": e.ci_high,
        }
        for e in estimates
    ]
    results = {"samples": args.samples, "k": args.k, "decay_table": decay}
    if len(m_values) >= 2 and all(e.hits > 0 for e in estimates):
        slope, slope_upper = stats_mod.fit_log_decay_slope(estimates)
        results["log_slope"] = slope
        results["log_slope_upper"] = slope_upper
    config = {
        "source": args.graph or args.box or args.torus,
        "cb": args.cb,
        "cf": args.cf,
        "m": args.m,
        "k": args.k,
        "samples": args.samples,
        "seed": args.seed,
    }
    _emit_report(args, "nu-a", config, results, started)
    return 0


# -- parser --------------------------------------------------------------------------


def _add_source_flags(p):
    p.add_argument("--graph", help="graph text file")
    p.add_argument("--box", help="lattice box DIM,SIDE")
    p.add_argument("--torus", help="lattice torus DIM,SIDE")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spanforest",
        description="Spanning tree and rooted spanning forest experiments on finite graphs",
    )
    parser.add_argument("--version", action="version", version=f"spanforest {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("sample", help="draw spanning trees or rooted forests")
    _add_source_flags(p)
    p.add_argument("--mode", choices=["free", "wired", "rooted"], default="free")
    p.add_argument("--roots", help="comma-separated root vertices (rooted mode)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("count", help="count spanning trees or rooted forests")
    _add_source_flags(p)
    p.add_argument("--roots", help="count forests rooted at these vertices")
    p.add_argument(
        "--boundary-mode",
        action="store_true",
        help="count forests whose every component touches the boundary (enumeration)",
    )
    p.set_defaults(func=_cmd_count)

    p = sub.add_parser("marginals", help="exact edge inclusion probabilities (CSV)")
    _add_source_flags(p)
    p.add_argument("--out", help="output CSV file (default stdout)")
    p.set_defaults(func=_cmd_marginals)

    p = sub.add_parser("entropy", help="per-site entropy computations")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--sides", help="comma-separated box sides")
    p.add_argument("--method", choices=["wired", "enum", "oracle", "plugin"], required=True)
    p.add_argument("--samples", type=int, default=400)
    p.add_argument("--window", help="window spec corner+extent for plugin")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output JSON file (default stdout)")
    p.set_defaults(func=_cmd_entropy)

    p = sub.add_parser("gibbs-test", help="window resampling invariance experiment")
    _add_source_flags(p)
    p.add_argument("--window", required=True, help="window spec corner+extent")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=["weak", "strong"], default="weak")
    p.add_argument("--out", help="output JSON file (default stdout)")
    p.set_defaults(func=_cmd_gibbs_test)

    p = sub.add_parser("trunk-stats", help="trunk and near-intersection statistics")
    _add_source_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--margin", type=int, default=None)
    p.add_argument("--mode", choices=["free", "wired"], default="free")
    p.add_argument("--roots", help="sample forests rooted at these vertices instead")
    p.add_argument("--out", help="output JSON file (default stdout)")
    p.set_defaults(func=_cmd_trunk_stats)

    p = sub.add_parser("nu-a", help="disjoint-path near-intersection decay estimate")
    _add_source_flags(p)
    p.add_argument("--cb", help="source vertices (comma separated)")
    p.add_argument("--cf", help="root vertices (comma separated)")
    p.add_argument("--m", default="2,4,6,8", help="thresholds (comma separated)")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--margin", type=int, default=None)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output JSON file (default stdout)")
    p.set_defaults(func=_cmd_nu_a)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config_defaults(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SpanforestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
