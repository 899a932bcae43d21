"""Command-line entry point: ``charvar <subcommand> ...``.

Exit codes: 0 success, 1 bad input or failed precondition, 2 verification failure.
The environment variable CHARVAR_SEED, when set, overrides ``--seed``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import charspace as cs
from . import dynamics as dyn
from . import reduction as red
from . import render
from . import traces as tr
from . import verify as vf
from .modular import GammaElement

# accept "-3/2" as a number rather than an option
_NEGATIVE = re.compile(r"^-\d+$|^-\d*\.\d+(e[+-]?\d+)?$|^-\d+/\d+$|^-\d+e[+-]?\d+$")

FIELDS = ("step", "x", "y", "z", "kappa", "word")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kw):
        super().__init__(*args, **kw)
        self._negative_number_matcher = _NEGATIVE

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


@dataclass(frozen=True)
class RunConfig:
    """Validated flags for one invocation."""

    subcommand: str
    t: float | None = None
    seed: int = 0
    steps: int = 0
    n: int = 0
    mode: str = cs.FLOAT
    window: dyn.Box | None = None
    out: str | None = None
    format: str = "jsonl"
    workers: int = 1

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        """Collect and validate the flags shared by several subcommands."""
        get = lambda k, d=None: getattr(args, k, d)
        for flag in ("steps", "n"):
            if get(flag, 0) < 0:
                raise ValueError(f"--{flag} must be non-negative")
        if get("workers", 1) < 1:
            raise ValueError("--workers must be at least 1")
        window = get("window")
        return cls(
            subcommand=args.command,
            t=get("t"),
            seed=_seed(get("seed", 0)),
            steps=get("steps", 0),
            n=get("n", 0),
            mode=get("mode", cs.FLOAT),
            window=dyn.Box.parse(window) if window else None,
            out=get("out"),
            format=get("format") or "jsonl",
            workers=get("workers", 1),
        )


def _seed(value: int) -> int:
    env = os.environ.get("CHARVAR_SEED")
    seed = int(env) if env not in (None, "") else int(value)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return seed


def _scalar_json(v):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return float(v)


def _emit(text: str, out: str | None, binary: bytes | None = None):
    if out in (None, "-"):
        if binary is not None:
            sys.stdout.buffer.write(binary)
        else:
            sys.stdout.write(text)
        return
    with open(out, "wb") as fh:
        fh.write(binary if binary is not None else text.encode("utf-8"))


def _records_text(records, fmt: str, fields=FIELDS) -> str:
    if fmt == "jsonl":
        return "".join(json.dumps(r) + "\n" for r in records)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n")
    writer.writeheader()
    writer.writerows(records)
    return buf.getvalue()


# ---------------------------------------------------------------- subcommands


def cmd_classify(args, cfg: RunConfig) -> int:
    c = cs.Character.of(args.x, args.y, args.z, mode=args.mode)
    label = cs.component_of(c)
    out = {
        "input": c.to_json(),
        "kappa": _scalar_json(cs.kappa(c)),
        "component": str(label),
        "form": cs.classify_form(c).value,
        "ambiguous": label.ambiguous,
    }
    print(json.dumps(out))
    return 0


def cmd_reduce(args, cfg: RunConfig) -> int:
    c = cs.Character.of(args.x, args.y, args.z, mode=args.mode)
    print(json.dumps(red.reduce(c).to_json()))
    return 0


def cmd_tracepoly(args, cfg: RunConfig) -> int:
    w = tr.FreeWord.parse(args.word)
    print(json.dumps({"word": args.word, "polynomial": str(tr.trace_polynomial(w))}))
    return 0


def _policy(spec: str, seed: int, window) -> dyn.OrbitPolicy:
    kind, _, arg = spec.partition(":")
    if kind == "uniform":
        return dyn.OrbitPolicy.uniform(seed=seed, window=window)
    if kind == "reduced":
        return dyn.OrbitPolicy.reduced(int(arg or 4), seed=seed, window=window)
    if kind == "cycle":
        return dyn.OrbitPolicy.cycle(GammaElement.from_word(arg).word, seed=seed, window=window)
    raise ValueError(f"unknown policy {spec!r} (uniform, reduced:L or cycle:WORD)")


def _orbit_chain(start, policy_spec, seed, window, steps, offset):
    policy = _policy(policy_spec, seed, window)
    out = []
    for s in dyn.orbit(start, policy, steps):
        rec = s.record()
        rec["step"] += offset
        out.append(rec)
    return out


def _default_window(t: float) -> dyn.Box:
    return dyn.Box.cube(2.0 if -2 <= t <= 2 else 6.0)


def cmd_orbit(args, cfg: RunConfig) -> int:
    seed, window = cfg.seed, cfg.window
    if args.start:
        start = cs.Character.of(*args.start.split(","), mode=args.mode)
    elif args.t is not None:
        if args.mode == cs.EXACT:
            raise ValueError("exact orbits need an explicit --start")
        samples = dyn.sample_level_set(args.t, 1, window or _default_window(args.t), seed=seed)
        if not len(samples):
            raise ValueError(samples.diagnostic or "no starting point found on the level set")
        start = cs.Character(*(float(v) for v in samples.points[0]))
    else:
        raise ValueError("orbit needs --start or --t")
    _policy(args.policy, seed, None)  # validate before any work
    confine = window if args.confine else None
    workers = cfg.workers
    counts = [cfg.steps // workers + (i < cfg.steps % workers) for i in range(workers)]
    offsets = [sum(counts[:i]) for i in range(workers)]
    jobs = [(start, args.policy, seed + i, confine, counts[i], offsets[i]) for i in range(workers)]
    if workers == 1:
        chains = [_orbit_chain(*jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, os.cpu_count() or 1)) as ex:
            chains = list(ex.map(_orbit_chain, *zip(*jobs)))
    records = [r for chain in chains for r in chain]
    _emit(_records_text(records, cfg.format), cfg.out)
    return 0


def cmd_sample(args, cfg: RunConfig) -> int:
    s = dyn.sample_level_set(cfg.t, cfg.n, cfg.window, seed=cfg.seed, workers=cfg.workers)
    if s.diagnostic:
        print(f"note: {s.diagnostic}", file=sys.stderr)
    records = []
    for i, (p, w) in enumerate(zip(s.points, s.weights), start=1):
        x, y, z = (float(v) for v in p)
        records.append({"step": i, "x": x, "y": y, "z": z, "kappa": float(cs.float_kappa(x, y, z)), "word": "", "weight": float(w)})
    _emit(_records_text(records, cfg.format, FIELDS + ("weight",)), cfg.out)
    return 0


def _read_points(path):
    pts, weights = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                r = json.loads(line)
                pts.append([float(Fraction(str(r[k]))) for k in ("x", "y", "z")])
                weights.append(float(r.get("weight", 1.0)))
    return pts, weights


def cmd_render(args, cfg: RunConfig) -> int:
    extent = tuple(float(Fraction(v)) for v in args.extent.split(","))
    if len(extent) != 4:
        raise ValueError("--extent needs u0,u1,v0,v1")
    canvas = render.Canvas(args.width, args.height, extent)
    fmt = args.format or ("ppm" if args.out and args.out.endswith(".ppm") else "svg")
    if args.scatter:
        import numpy as np

        pts, w = _read_points(args.scatter)
        data = (np.asarray(pts, dtype=float).reshape(-1, 3), np.asarray(w, dtype=float))
        img = render.render_orbit_scatter(data, args.plane, canvas, fmt=fmt, t=args.t)
        if img.dropped:
            print(f"note: dropped {img.dropped} points off the level set", file=sys.stderr)
    else:
        img = render.render_level_contour(args.t, args.plane, args.slice, canvas, fmt=fmt, region=args.region)
    _emit("", args.out, binary=img.data)
    return 0


def cmd_verify(args, cfg: RunConfig) -> int:
    totals = {}
    failed = False
    for check, passed, cases, detail in vf.run(args.suite):
        failed |= not passed
        print(json.dumps({"suite": check.suite, "check": check.name, "passed": passed, "cases": cases, "detail": detail}))
        ok, n = totals.get(check.suite, (0, 0))
        totals[check.suite] = (ok + passed, n + 1)
    for suite, (ok, n) in totals.items():
        print(json.dumps({"suite": suite, "passed": ok, "total": n}))
    return 2 if failed else 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="charvar", description="Gamma-action on real characters of the one-holed torus.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    def point(sp, default_mode):
        for name in ("x", "y", "z"):
            sp.add_argument(name, help="decimal or p/q rational")
        sp.add_argument("--mode", choices=(cs.EXACT, cs.FLOAT), default=default_mode)

    sp = sub.add_parser("classify", help="kappa, form type and component label")
    point(sp, cs.EXACT)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("reduce", help="trace-reduction normal form (kappa > 2)")
    point(sp, cs.EXACT)
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("orbit", help="orbit of a character under a random or fixed policy")
    sp.add_argument("--t", type=float, help="level; a start point is sampled on it")
    sp.add_argument("--start", help="x,y,z start point")
    sp.add_argument("--steps", type=int, default=1000)
    sp.add_argument("--policy", default="uniform", help="uniform | reduced:L | cycle:WORD")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--window", help="r or x0,x1,y0,y1,z0,z1 (start sampling window)")
    sp.add_argument("--confine", action="store_true", help="reject moves leaving --window")
    sp.add_argument("--mode", choices=(cs.EXACT, cs.FLOAT), default=cs.FLOAT)
    sp.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    sp.add_argument("--out")
    sp.add_argument("--workers", type=int, default=1, help="independent chains with seeds seed+i")
    sp.set_defaults(func=cmd_orbit)

    sp = sub.add_parser("sample", help="weighted invariant-measure samples on a level set")
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--n", type=int, default=1000)
    sp.add_argument("--window", default="2", help="r or x0,x1,y0,y1,z0,z1")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--mode", choices=(cs.FLOAT,), default=cs.FLOAT)
    sp.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    sp.add_argument("--out")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("render", help="level-set slice or scatter as SVG/PPM")
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--plane", choices=tuple(render.PLANES), default="xy")
    sp.add_argument("--slice", type=float, default=0.0)
    sp.add_argument("--out")
    sp.add_argument("--format", choices=("svg", "ppm"))
    sp.add_argument("--width", type=int, default=400)
    sp.add_argument("--height", type=int, default=400)
    sp.add_argument("--extent", default="-4,4,-4,4", help="u0,u1,v0,v1 of the plane window")
    sp.add_argument("--region", action="store_true", help="overlay the projection region boundary")
    sp.add_argument("--scatter", help="JSONL orbit/sample file to scatter instead of a contour")
    sp.add_argument("--mode", choices=(cs.FLOAT,), default=cs.FLOAT)
    sp.set_defaults(func=cmd_render)

    sp = sub.add_parser("tracepoly", help="trace polynomial of a word in X, Y")
    sp.add_argument("word", help='e.g. "X Y^-2 X^3" or "X Y x y"')
    sp.set_defaults(func=cmd_tracepoly)

    sp = sub.add_parser("verify", help="run the property checks")
    sp.add_argument("--suite", choices=("all",) + vf.SUITES, default="all")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    try:
        return args.func(args, RunConfig.from_args(args))
    except (ValueError, TypeError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
