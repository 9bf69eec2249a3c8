"""``covario`` command line.

Exit status is 0 on success, 1 on a domain error (a JSON object describing
it goes to stderr) and 2 on a usage error.
"""
from __future__ import annotations

import argparse
import io
import json
import sys
from pathlib import Path

import numpy as np

from covario import acceptance, scenarios
from covario.bodies import dump_body, load_body
from covario.concavity import (
    Classification,
    analyze_segment,
    boundary_dichotomy,
    classify_segment,
)
from covario.config import ConfigError, SessionConfig
from covario.covariogram import SegmentProbe, eval_segment, evaluate
from covario.errors import CovarioError
from covario.geometry import TruncationBox
from covario.optimizer import level_set_probe, maximize
from covario.serialize import dumps, write_csv


class UsageError(Exception):
    pass


def _vector(text):
    try:
        vals = [float(s) for s in text.replace(" ", "").split(",") if s]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if len(vals) not in (2, 3) or not all(np.isfinite(vals)):
        raise argparse.ArgumentTypeError(f"expected 2 or 3 finite coordinates, got {text!r}")
    return np.array(vals)


VECTOR_OPTIONS = ("--a", "--w", "--x")


def _glue_vectors(argv):
    """Join ``--a -0.5,1`` into ``--a=-0.5,1`` so argparse does not read the
    value as a flag."""
    out, it = [], iter(argv)
    for tok in it:
        if tok in VECTOR_OPTIONS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def _common():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("session")
    g.add_argument("--geom-tol", type=float, default=1e-9, help="geometric tolerance, relative to diameter")
    g.add_argument("--classify-tol", type=float, default=1e-7, help="second-difference tolerance, relative to g^(1/n)(a)")
    g.add_argument("--recon-tol", type=float, default=1e-8, help="reconstruction tolerance, relative to |S_0|")
    g.add_argument("--samples", type=int, default=33, help="samples per probe (odd, >= 9)")
    g.add_argument("--box", type=float, default=None, dest="box_scale",
                   help="truncation box half-width (default 20 for scenarios, fitted otherwise)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--format", choices=("json", "csv"), default="json", dest="fmt")
    return p


def _pair(p, required=True):
    p.add_argument("--k", type=Path, required=required, help="body JSON for K")
    p.add_argument("--l", type=Path, required=required, help="body JSON for L")


def _probe_args(p, required=True):
    p.add_argument("--a", type=_vector, required=required, help="probe midpoint, e.g. 0.5,0.5")
    p.add_argument("--w", type=_vector, required=required, help="probe half-extent direction")


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog="covario", description="Cross covariograms of convex bodies.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="g at one translation")
    _pair(p)
    p.add_argument("--x", type=_vector, required=True)

    p = sub.add_parser("segment", parents=[common], help="g along a probe segment")
    _pair(p)
    _probe_args(p)

    p = sub.add_parser("classify", parents=[common], help="concavity class of a probe")
    _pair(p)
    _probe_args(p)

    p = sub.add_parser("verify", parents=[common], help="rebuild cylinders (2) or cones (3) along a probe")
    p.add_argument("--theorem", type=int, choices=(2, 3), required=True,
                   help="2: cylinders for a constant segment, 3: cones for an affine increasing one")
    p.add_argument("--scenario", choices=scenarios.NAMES)
    p.add_argument("--probe-index", type=int, default=0)
    _pair(p, required=False)
    _probe_args(p, required=False)
    p.add_argument("--csv", type=Path, help="also write per-t symmetric differences here")

    p = sub.add_parser("maximize", parents=[common], help="argmax of g over translations")
    _pair(p)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--pos-tol", type=float)

    p = sub.add_parser("levelset", parents=[common], help="strict convexity of {g >= h}")
    _pair(p)
    p.add_argument("--h", type=float, required=True, help="level as a fraction of max g (see --absolute)")
    p.add_argument("--absolute", action="store_true", help="read --h as an absolute volume")
    p.add_argument("--chords", type=int, default=100)

    p = sub.add_parser("scenario", parents=[common], help="emit a named fixture")
    p.add_argument("--name", choices=scenarios.NAMES, required=True)
    p.add_argument("--emit", type=Path, help="directory for K.json, L.json and probes.json")

    p = sub.add_parser("selftest", parents=[common], help="run the acceptance suite")
    p.add_argument("--only", type=int, action="append", help="criterion number (repeatable)")
    return parser


def _config(args):
    try:
        return SessionConfig.from_env(
            geom_tol=args.geom_tol, classify_tol=args.classify_tol, recon_tol=args.recon_tol,
            samples=args.samples, seed=args.seed, fmt=args.fmt,
            **({} if args.box_scale is None else {"box_scale": args.box_scale}),
        )
    except ConfigError as exc:
        raise UsageError(str(exc)) from None


def _report(cfg, payload):
    return {**payload, "tolerances": cfg.tolerances()}


def _bodies(args):
    return load_body(args.k), load_body(args.l)


def _box(cfg, dim):
    return TruncationBox(np.zeros(dim), np.full(dim, cfg.box_scale))


def cmd_eval(args, cfg, out):
    K, L = _bodies(args)
    out.write(dumps(_report(cfg, {"value": evaluate(K, L, args.x)})) + "\n")


def _profile_rows(profile, report=None):
    extra = [] if report is None else [str(report.classification), report.slope_beta]
    return [[t, g, r, *extra] for t, g, r in zip(profile.t, profile.g_values, profile.g_root_values)]


def cmd_segment(args, cfg, out):
    K, L = _bodies(args)
    profile = eval_segment(K, L, SegmentProbe(args.a, args.w, cfg.samples))
    if cfg.fmt == "csv":
        write_csv(out, ["t", "g", "g_root"], _profile_rows(profile))
        return
    out.write(dumps(_report(cfg, {
        "probe": profile.probe.to_json(), "t": profile.t, "g": profile.g_values, "g_root": profile.g_root_values,
    })) + "\n")


def cmd_classify(args, cfg, out):
    K, L = _bodies(args)
    profile = eval_segment(K, L, SegmentProbe(args.a, args.w, cfg.samples))
    report = classify_segment(profile, rel_tol=cfg.classify_tol)
    if cfg.fmt == "csv":
        write_csv(out, ["t", "g", "g_root", "classification", "slope_beta"], _profile_rows(profile, report))
        return
    payload = {"probe": profile.probe.to_json(), **report.to_json()}
    if profile.g_values[len(profile.t) // 2] > 0:
        tol = cfg.geom_tol * max(K.diameter, L.diameter)
        payload["boundary_dichotomy_at_a"] = str(boundary_dichotomy(K, L, args.a, tol).kind)
    out.write(dumps(_report(cfg, payload)) + "\n")


def cmd_verify(args, cfg, out):
    if args.scenario:
        fx = scenarios.build(scenarios.get(args.scenario), _box(cfg, 2), cfg.samples)
        if not 0 <= args.probe_index < len(fx.probes):
            raise UsageError(f"scenario {args.scenario} has {len(fx.probes)} probes")
        K, L, probe, box = fx.K, fx.L, fx.probes[args.probe_index], fx.box
    else:
        if not all((args.k, args.l, args.a is not None, args.w is not None)):
            raise UsageError("verify needs --scenario or all of --k --l --a --w")
        K, L = _bodies(args)
        probe = SegmentProbe(args.a, args.w, cfg.samples)
        box = None if args.box_scale is None else _box(cfg, K.dim)
    res = analyze_segment(K, L, probe, rel_tol=cfg.classify_tol, recon_tol=cfg.recon_tol, box=box)
    want = Classification.CONSTANT if args.theorem == 2 else Classification.AFFINE_NON_CONSTANT
    got = res.report.classification
    if got is not want:
        raise CovarioError(f"probe classifies as {got}, theorem {args.theorem} needs {want}")
    rec = res.reconstruction
    payload = {
        "theorem": args.theorem,
        "probe": res.oriented_probe.to_json(),
        "reversed": res.reversed,
        "classification": res.report.to_json(),
        "witness": res.witness.to_json(),
        **rec.to_json(),
    }
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            write_csv(fh, ["t", "symdiff", "symdiff_translated_form"], rec.per_t_symdiff)
    if cfg.fmt == "csv":
        write_csv(out, ["t", "symdiff", "symdiff_translated_form"], rec.per_t_symdiff)
    else:
        out.write(dumps(_report(cfg, payload)) + "\n")
    if not rec.passed:
        raise CovarioError(
            f"reconstruction residual {rec.relative_max_symdiff:.3g} exceeds tolerance {rec.tolerance:.3g}"
        )


def cmd_maximize(args, cfg, out):
    K, L = _bodies(args)
    res = maximize(K, L, restarts=args.restarts, pos_tol=args.pos_tol, seed=cfg.seed)
    out.write(dumps(_report(cfg, res.to_json())) + "\n")


def cmd_levelset(args, cfg, out):
    K, L = _bodies(args)
    top = maximize(K, L, seed=cfg.seed)
    h = args.h if args.absolute else args.h * top.value
    rep = level_set_probe(K, L, h, chords=args.chords, seed=cfg.seed, max_result=top)
    out.write(dumps(_report(cfg, rep.to_json())) + "\n")


def cmd_scenario(args, cfg, out):
    fx = scenarios.build(scenarios.get(args.name), _box(cfg, 2), cfg.samples)
    manifest = fx.manifest()
    if args.emit:
        args.emit.mkdir(parents=True, exist_ok=True)
        dump_body(fx.K, args.emit / "K.json")
        dump_body(fx.L, args.emit / "L.json")
        (args.emit / "probes.json").write_text(dumps(manifest) + "\n")
    out.write(dumps(_report(cfg, manifest)) + "\n")


def cmd_selftest(args, cfg, out):
    results = acceptance.run(args.only, seed=cfg.seed)
    for r in results:
        out.write(r.line() + "\n")
    failed = [r.number for r in results if not r.passed]
    out.write(f"{len(results) - len(failed)}/{len(results)} criteria passed\n")
    return 1 if failed else 0


COMMANDS = {
    "eval": cmd_eval, "segment": cmd_segment, "classify": cmd_classify, "verify": cmd_verify,
    "maximize": cmd_maximize, "levelset": cmd_levelset, "scenario": cmd_scenario, "selftest": cmd_selftest,
}


def _error_json(exc):
    return json.dumps({"error": type(exc).__name__, "message": str(exc)})


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(_glue_vectors(sys.argv[1:] if argv is None else list(argv)))
    except SystemExit as exc:
        return int(exc.code or 0)
    buf = io.StringIO()
    try:
        cfg = _config(args)
        if getattr(args, "chords", 1) < 1 or getattr(args, "restarts", 1) < 1:
            raise UsageError("--chords and --restarts must be positive")
        if getattr(args, "pos_tol", None) is not None and not args.pos_tol > 0:
            raise UsageError("--pos-tol must be positive")
        code = COMMANDS[args.command](args, cfg, buf) or 0
        stdout.write(buf.getvalue())
        return code
    except UsageError as exc:
        stderr.write(f"covario {args.command}: error: {exc}\n")
        return 2
    except (CovarioError, ValueError, OSError) as exc:
        stdout.write(buf.getvalue())
        stderr.write(_error_json(exc) + "\n")
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
