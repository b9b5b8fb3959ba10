"""Command-line front end: ``fgadyn <command> FILE [options]``.

Exit codes: 0 success, 1 validation failure (bad inverse, rank mismatch),
2 parse or usage error, 3 any other library error.
"""

import argparse
import random
import sys

from . import records as rec
from .automorphisms import abelianization, in_IA_mod3, power
from .dynamics import (
    ExperimentConfig,
    atoroidal_scan,
    gns_experiment,
    growth_profile,
    ns_experiment,
    orbit,
    pingpong,
    subgroup_scan,
)
from .errors import BudgetExceeded, FgadynError, InverseFailed, ParseError, RankMismatch
from .graphs import rose_map
from .io import is_graph_text, parse_automorphisms, parse_graph_maps, read_source
from .strata import free_factor_system, maximal_filtration
from .words import CyclicWord, random_cyclic_word

COMMANDS = ("check", "strata", "orbit", "scan", "ns", "gns", "pingpong", "subgroup")

# per-command defaults for the shared flags
DEFAULTS = {
    "orbit": {"iters": 10, "max_seed_len": 6, "length_cap": 10 ** 5},
    "scan": {"iters": 20, "max_seed_len": 6, "length_cap": 10 ** 5},
    "ns": {"iters": 25, "max_seed_len": 6, "length_cap": 10 ** 8, "num_seeds": 5},
    "gns": {"iters": 20, "max_seed_len": 6, "length_cap": 10 ** 8, "num_seeds": 10},
    "pingpong": {"iters": 20, "max_seed_len": 5, "length_cap": 10 ** 5},
    "subgroup": {"iters": 20, "max_seed_len": 5, "length_cap": 10 ** 5},
}


class Emitter:
    def __init__(self, stream, manifest):
        self.stream = stream
        self.manifest_id = manifest["manifest_id"]
        self.write(manifest)

    def write(self, record):
        record = dict(record)
        record.setdefault("manifest_id", self.manifest_id)
        self.stream.write(rec.dumps(record) + "\n")
        self.stream.flush()

    def emit(self, kind, **fields):
        self.write({"kind": kind, **fields})


def build_parser():
    parser = argparse.ArgumentParser(prog="fgadyn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("file", help="definition file or builtin:NAME")
        p.add_argument("--rank", type=int, help="expected rank; mismatch is a validation failure")
        p.add_argument("--window", type=int, default=2)
        p.add_argument("--iters", type=int, help="iterations K or n_max")
        p.add_argument("--max-seed-len", type=int, help="seed / scan class length bound L")
        p.add_argument("--length-cap", type=int)
        p.add_argument("--tol", type=float, default=0.02)
        p.add_argument("--seed", type=int, default=0, help="random seed")
        p.add_argument("--power", type=int, default=1, help="replace each automorphism by this power")
        p.add_argument("--marked-generator", type=int)
        p.add_argument("--num-seeds", type=int)
        p.add_argument("--budget", type=int, help="letter budget; FGADYN_BUDGET takes precedence")
        p.add_argument("--out", help="write records here instead of stdout")
        if name == "orbit":
            p.add_argument("--class", dest="seed_class", help="seed class literal")
        if name in ("ns", "gns"):
            p.add_argument("--scan-max-len", type=int, default=4,
                           help="class length bound of the atoroidality precondition scan")
            p.add_argument("--scan-iters", type=int, default=10,
                           help="iteration bound of the precondition scan")
        if name == "strata":
            p.add_argument("--max-period", type=int, default=10)
        if name == "pingpong":
            p.add_argument("-m", type=int, default=5)
            p.add_argument("-n", type=int, default=5)
            p.add_argument("--scan", action="store_true", help="also scan the product")
        if name == "subgroup":
            p.add_argument("--product-len", type=int, default=2)
            p.add_argument("--orbit-cap", type=int, default=24)
    return parser


def _fill_defaults(args):
    for key, value in DEFAULTS.get(args.command, {}).items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)


def _config(args):
    return ExperimentConfig(
        window=args.window, n_max=args.iters, length_cap=args.length_cap, tol=args.tol,
        seed=args.seed, num_seeds=args.num_seeds, max_seed_len=args.max_seed_len,
        marked_generator=args.marked_generator, scan_max_len=args.scan_max_len,
        scan_iters=args.scan_iters, budget=args.budget,
    )


def _load(args, text):
    autos = parse_automorphisms(text)
    for phi in autos:
        if args.rank is not None and phi.rank != args.rank:
            raise RankMismatch(f"file has rank {phi.rank}, --rank is {args.rank}")
    if args.power != 1:
        autos = [_powered(phi, args.power) for phi in autos]
    return autos


def _powered(phi, k):
    out = power(phi, k)
    out.label = f"{phi.label}^{k}" if phi.label else ""
    return out


def cmd_check(args, text, out):
    try:
        autos = parse_automorphisms(text)
    except InverseFailed as exc:
        out.emit("check_error", error="InverseFailed", message=str(exc))
        return 1
    status = 0
    for phi in autos:
        valid = args.rank is None or phi.rank == args.rank
        status = status if valid else 1
        out.emit("check", automorphism=rec.automorphism_info(phi), valid=valid,
                 abelianization=abelianization(phi).tolist(), in_ia_mod3=in_IA_mod3(phi))
    return status


def cmd_strata(args, text, out):
    if is_graph_text(text):
        maps = parse_graph_maps(text)
    else:
        maps = [rose_map(phi) for phi in _load(args, text)]
    for f in maps:
        filt = maximal_filtration(f, max_period=args.max_period)
        g = f.graph
        strata = []
        for s, sub in zip(filt.strata, filt.subgraphs):
            strata.append({
                "edges": [g.edge_name(e) for e in s.edges],
                "kind": s.kind,
                "subkind": s.subkind,
                "label": s.label(),
                "eigenvalue": s.eigenvalue,
                "matrix": s.matrix.tolist(),
                "free_factors": [[str(w) for w in fac] for fac in free_factor_system(g, sub)],
            })
        out.emit("filtration", label=f.label, strata=strata,
                 extensions=filt.extension_kinds(), invariant=filt.is_invariant())
    return 0


def cmd_orbit(args, text, out):
    phi = _load(args, text)[0]
    if args.seed_class:
        seed = CyclicWord(args.seed_class, phi.rank)
    else:
        seed = random_cyclic_word(random.Random(args.seed), phi.rank, args.max_seed_len)
    r = orbit(phi, seed, args.iters, args.length_cap, window=args.window)
    steps = [{"index": s.index, "digest": s.digest, "length": s.length,
              "frequencies": rec.frequency_pairs(s.frequencies)} for s in r.steps]
    out.emit("orbit", seed=rec.class_info(seed), verdict=r.verdict, period=r.period,
             periodic_class=rec.class_info(r.periodic_class), steps=steps)
    return 0


def cmd_scan(args, text, out):
    for phi in _load(args, text):
        v = atoroidal_scan(phi, args.max_seed_len, args.iters, args.length_cap,
                           budget=args.budget)
        out.emit("scan", automorphism=phi.label, verdict=rec.scan_info(v))
    return 0


def cmd_ns(args, text, out):
    phi = _load(args, text)[0]
    report = ns_experiment(phi, _config(args))
    for direction, runs in (("forward", report.forward_runs), ("backward", report.backward_runs)):
        for run in runs:
            out.emit("ns_seed", direction=direction, run=rec.seed_run_info(run))
    for run in report.forward_runs:
        gp = growth_profile(phi, run.seed, min(args.iters, 20), length_cap=args.length_cap)
        out.emit("growth", seed=rec.class_info(run.seed), lengths=gp.lengths, ratio=gp.ratio)
    out.emit("ns_summary", forward=rec.simplex_info(report.forward),
             backward=rec.simplex_info(report.backward), scan=rec.scan_info(report.scan))
    return 0


def cmd_gns(args, text, out):
    phi = _load(args, text)[0]
    report = gns_experiment(phi, _config(args))
    for s in report.seeds:
        out.emit("gns_seed", seed=rec.class_info(s.seed), verdict=s.verdict,
                 forward_fraction=s.forward_fraction, backward_fraction=s.backward_fraction,
                 forward_distance=s.forward_distance, backward_distance=s.backward_distance,
                 cone=[[t, d] for t, d in s.cone])
    out.emit("gns_summary", marked_generator=report.marked_generator,
             fixed_current_exact=report.fixed_current_exact, counts=report.counts,
             plus=rec.simplex_info(report.plus), minus=rec.simplex_info(report.minus),
             restriction_scan=rec.scan_info(report.restriction_scan))
    return 0


def cmd_pingpong(args, text, out):
    autos = _load(args, text)
    if len(autos) != 2:
        raise ParseError(f"pingpong needs exactly two automorphisms, file has {len(autos)}")
    phi, psi = autos
    prod = pingpong(phi, psi, args.m, args.n)
    out.emit("automorphism", automorphism=rec.automorphism_info(prod))
    if args.scan:
        v = atoroidal_scan(prod, args.max_seed_len, args.iters, args.length_cap,
                           budget=args.budget)
        out.emit("scan", automorphism=prod.label, verdict=rec.scan_info(v))
    return 0


def cmd_subgroup(args, text, out):
    gens = _load(args, text)
    v = subgroup_scan(gens, args.product_len, args.max_seed_len, args.iters,
                      orbit_cap=args.orbit_cap, length_cap=args.length_cap, budget=args.budget)
    out.emit("subgroup", **_subgroup_fields(v, gens))
    return 0


def _subgroup_fields(v, gens):
    product = [[gens[i].label or f"g{i + 1}", s] for i, s in v.product]
    return {
        "tag": v.tag,
        "bounds": {"product_len": v.product_len, "max_len": v.max_len,
                   "iterations": v.iterations},
        "periodic_class": rec.class_info(v.periodic_class),
        "orbit_size": v.orbit_size,
        "orbit": [str(h) for h in v.orbit],
        "product": product,
        "scan": rec.scan_info(v.scan) if v.scan else None,
        "products_scanned": v.products_scanned,
    }


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    _fill_defaults(args)
    try:
        text, digest = read_source(args.file)
    except (OSError, KeyError) as exc:
        print(f"fgadyn: cannot read {args.file}: {exc}", file=sys.stderr)
        return 2
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "command")}
    manifest = rec.make_manifest(args.command, config, [{"name": args.file, "sha256": digest}],
                                 args.seed)
    stream = open(args.out, "w") if args.out else sys.stdout
    try:
        out = Emitter(stream, manifest)
        try:
            return HANDLERS[args.command](args, text, out)
        except ParseError as exc:
            out.emit("error", error="ParseError", message=str(exc))
            print(f"fgadyn: {exc}", file=sys.stderr)
            return 2
        except (InverseFailed, RankMismatch) as exc:
            out.emit("error", error=type(exc).__name__, message=str(exc))
            print(f"fgadyn: {exc}", file=sys.stderr)
            return 1
        except BudgetExceeded as exc:
            out.emit("error", error="BudgetExceeded", message=str(exc),
                     partial=_partial(exc.partial))
            print(f"fgadyn: {exc}", file=sys.stderr)
            return 3
        except FgadynError as exc:
            out.emit("error", error=type(exc).__name__, message=str(exc))
            print(f"fgadyn: {exc}", file=sys.stderr)
            return 3
    finally:
        if args.out:
            stream.close()


def _partial(partial):
    if partial is None:
        return None
    if hasattr(partial, "tag") and hasattr(partial, "classes_checked"):
        return rec.scan_info(partial)
    if hasattr(partial, "products_scanned"):
        return {"tag": partial.tag, "products_scanned": partial.products_scanned}
    if isinstance(partial, dict):
        return {k: [rec.seed_run_info(r) for r in v] for k, v in partial.items()}
    return repr(partial)


if __name__ == "__main__":
    sys.exit(main())
