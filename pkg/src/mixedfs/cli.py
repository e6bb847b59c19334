"""Command-line interface: ``mixedfs {metric, alpha-scan, verify, experiment, sample}``.

Exit codes: 0 success, 1 an assertion suite failed, 2 usage or input error,
3 numeric error, 4 unknown suite name.
"""

import argparse
import math
import os
import sys
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import expsim, verify
from .channels import random_channel
from .errors import MixedFSError
from .formats import (
    FormatError,
    channel_to_json,
    dumps,
    family_from_json,
    family_to_json,
    load_file,
    matrix_to_json,
    rows_to_csv,
)
from .metrics import (
    alpha_dynamical_phase,
    alpha_G_from_sqrt,
    alpha_Gtilde_from_sqrt,
    fs_qgt,
    metric_report,
    sqrt_derivative,
)
from .states import random_density, random_ginibre_family

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_NUMERIC, EXIT_SUITE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    family: Optional[str] = None
    theta: List[List[float]] = field(default_factory=list)
    alphas: List[float] = field(default_factory=list)
    suites: List[str] = field(default_factory=list)
    samples: Optional[int] = None
    shots: Optional[int] = None
    construction: str = "auto"
    seed: int = 0
    out: Optional[str] = None
    format: str = "json"
    tolerance_profile: str = "default"
    timing: bool = False
    sample_kind: Optional[str] = None
    dim: int = 2
    rank: Optional[int] = None
    kraus: int = 2
    params: int = 1
    count: int = 1

    def validate(self):
        if self.format not in ("json", "csv"):
            raise UsageError(f"unknown format {self.format!r}")
        if self.tolerance_profile not in verify.PROFILES:
            raise UsageError(f"unknown tolerance profile {self.tolerance_profile!r}")
        if any(a < 1 for a in self.alphas):
            raise UsageError("alpha values must be >= 1")
        if self.shots is not None and self.shots < 1:
            raise UsageError("shots must be >= 1")
        if self.samples is not None and self.samples < 1:
            raise UsageError("samples must be >= 1")
        return self


def parse_grid(spec):
    """``lo:hi:n`` (inclusive linspace), ``a,b,c`` scalars, or ``x,y;u,v`` points."""
    spec = spec.strip()
    try:
        if ":" in spec:
            lo, hi, n = spec.split(":")
            n = int(n)
            if n < 1:
                raise ValueError
            return [[float(x)] for x in np.linspace(float(lo), float(hi), n)]
        if ";" in spec:
            return [[float(x) for x in p.split(",")] for p in spec.split(";") if p.strip()]
        return [[float(x)] for x in spec.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad theta grid {spec!r}; use lo:hi:n, a,b,c or x,y;u,v") from None


def parse_floats(spec):
    try:
        return [float(x) for x in spec.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad number list {spec!r}") from None


# -- commands -------------------------------------------------------------


def _points(cfg, family):
    pts = cfg.theta or [[0.0] * family.param_count]
    for p in pts:
        if len(p) != family.param_count:
            raise UsageError(f"theta point {p} has {len(p)} coordinates; the family has {family.param_count}")
    return pts


def _flat(prefix, m):
    m = np.atleast_2d(m)
    return {f"{prefix}_{i}{j}": float(m[i, j]) for i in range(m.shape[0]) for j in range(m.shape[1])}


def cmd_metric(cfg, family):
    reports = [metric_report(family, p).to_dict() for p in _points(cfg, family)]
    doc = {"command": "metric", "family": family_to_json(family), "reports": reports}
    rows = []
    for r in reports:
        row = {f"theta_{i}": t for i, t in enumerate(r["theta"])}
        row.update(_flat("gamma", np.array(r["gamma"])))
        row.update(_flat("sigma", np.array(r["sigma"])))
        for i, (re, im) in enumerate(zip(r["dyn_phase"]["re"], r["dyn_phase"]["im"])):
            row[f"dyn_phase_re_{i}"], row[f"dyn_phase_im_{i}"] = re, im
        row.update(ds2=r["ds2"], cr_bound=r["cr_bound"], warnings="; ".join(r["warnings"]))
        rows.append(row)
    return doc, rows, EXIT_OK


def cmd_alpha_scan(cfg, family):
    alphas = cfg.alphas or [1.0]
    entries, rows = [], []
    for p in _points(cfg, family):
        rho = family.rho(p)
        drhos = family.derivatives(p)
        cs = [sqrt_derivative(rho, d, warn=False).matrix for d in drhos]
        cs_norm = verify.normalized_sqrt_derivatives(rho, drhos)
        gamma = fs_qgt(family, p).g
        for a in alphas:
            g = alpha_G_from_sqrt(rho, cs, a)
            gt = alpha_Gtilde_from_sqrt(rho, cs, a)
            ph = alpha_dynamical_phase(rho, cs_norm, a)
            entry = {"theta": [float(x) for x in p], "alpha": float(a),
                     "G": g.real.tolist(), "Gtilde": gt.real.tolist(),
                     "phase": {"re": ph.real.tolist(), "im": ph.imag.tolist()}}
            if a == 1:
                dev = float(max(np.max(np.abs(g - gamma)), np.max(np.abs(gt - gamma))))
                entry["fs_deviation"] = dev
                entry["fs_agreement"] = dev <= 1e-10
            entries.append(entry)
            row = {f"theta_{i}": t for i, t in enumerate(entry["theta"])}
            row["alpha"] = entry["alpha"]
            row.update(_flat("G", g.real))
            row.update(_flat("Gtilde", gt.real))
            for i, z in enumerate(ph):
                row[f"phase_re_{i}"], row[f"phase_im_{i}"] = float(z.real), float(z.imag)
            row["fs_agreement"] = entry.get("fs_agreement")
            rows.append(row)
    doc = {"command": "alpha-scan", "family": family_to_json(family), "alphas": alphas, "entries": entries}
    return doc, rows, EXIT_OK


def cmd_verify(cfg, _family=None):
    results = verify.run_suites(cfg.suites or ["all"], cfg.seed, cfg.tolerance_profile, cfg.samples)
    doc = verify.report(results, cfg.seed, cfg.tolerance_profile, cfg.timing)
    rows = [{"suite": r.name, "cases": r.cases, "failures": r.failures, "allowed_failures": r.allowed_failures,
             "worst_deviation": r.worst_deviation, "assertion": r.assertion, "passed": r.passed}
            for r in results]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        kind = "assert" if r.assertion else "report"
        print(f"{status} {r.name} [{kind}] cases={r.cases} failures={r.failures} "
              f"worst={r.worst_deviation:.3e}", file=sys.stderr)
    return doc, rows, EXIT_OK if doc["passed"] else EXIT_FAILED


def cmd_experiment(cfg, family):
    if family.param_count != 1:
        raise UsageError("experiment needs a single-parameter family")
    (p,) = _points(cfg, family)[:1]
    rho = family.rho(p)
    construction = cfg.construction
    if construction == "auto":
        construction = "commutator" if family.kind == "unitary_orbit" else "rank2"
    if construction == "commutator":
        if family.kind != "unitary_orbit":
            raise UsageError("the commutator construction needs a unitary_orbit family")
        gen = expsim.generator_commutator(rho, family.description["H"])
    else:
        (d,) = family.derivatives(p)
        psi, dpsi = expsim.purified_tangent(rho, sqrt_derivative(rho, d, warn=False).matrix)
        gen = expsim.generator_rank2(psi, dpsi)
    rec = expsim.simulate_variance(gen.h_ab, gen.psi, cfg.shots or 100_000, cfg.seed, gen.construction)
    gamma = float(fs_qgt(family, p).gamma[0, 0])
    doc = rec.to_dict()
    doc.update(theta=[float(x) for x in p], gamma=gamma, generator_residual=gen.residual,
               abs_error=abs(rec.sample_variance - rec.exact_variance),
               z=(abs(rec.sample_variance - rec.exact_variance) / rec.stderr
                  if rec.stderr > 0 and math.isfinite(rec.stderr) else 0.0))
    return doc, [doc | {"theta": doc["theta"][0]}], EXIT_OK


def cmd_sample(cfg, _family=None):
    rng = np.random.default_rng(cfg.seed)
    items = []
    for _ in range(cfg.count):
        if cfg.sample_kind == "state":
            items.append(matrix_to_json(random_density(cfg.dim, cfg.rank, rng).matrix))
        elif cfg.sample_kind == "channel":
            items.append(channel_to_json(random_channel(cfg.dim, cfg.kraus, rng)))
        else:
            items.append(family_to_json(random_ginibre_family(cfg.dim, cfg.params, rng)))
    doc = items[0] if cfg.count == 1 else items
    rows = [{"index": i, "kind": cfg.sample_kind} for i in range(cfg.count)]
    return doc, rows, EXIT_OK


COMMANDS = {
    "metric": (cmd_metric, True),
    "alpha-scan": (cmd_alpha_scan, True),
    "verify": (cmd_verify, False),
    "experiment": (cmd_experiment, True),
    "sample": (cmd_sample, False),
}


# -- argument parsing -----------------------------------------------------


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"{v} must be >= 1")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output path (default: standard output)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--tolerance-profile", choices=tuple(verify.PROFILES), default="default")

    parser = argparse.ArgumentParser(prog="mixedfs", description="Mixed-state Fubini-Study metric toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (("metric", "metric tensor, dynamical phase and bound over a grid"),
                            ("alpha-scan", "alpha-generalized tensors over a grid")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--family", required=True, help="family description JSON")
        p.add_argument("--theta", help="grid: lo:hi:n, a,b,c or x,y;u,v")
        if name == "alpha-scan":
            p.add_argument("--alpha", default="1", help="comma-separated alpha values (>= 1)")

    p = sub.add_parser("verify", parents=[common], help="run property suites")
    p.add_argument("--suite", action="append", help=f"suite name, repeatable or comma-separated: all, {', '.join(verify.SUITES)}")
    p.add_argument("--samples", type=_positive_int, help="override each suite's case count")
    p.add_argument("--timing", action="store_true", help="include wall times (breaks byte-identical reports)")

    p = sub.add_parser("experiment", parents=[common], help="simulate the variance measurement")
    p.add_argument("--family", required=True)
    p.add_argument("--theta", help="single parameter value (default 0)")
    p.add_argument("--shots", type=_positive_int, default=100_000)
    p.add_argument("--construction", choices=("auto", "commutator", "rank2"), default="auto")

    p = sub.add_parser("sample", parents=[common], help="emit random states, channels or families")
    p.add_argument("kind", choices=("state", "channel", "family"))
    p.add_argument("--dim", type=_positive_int, default=2)
    p.add_argument("--rank", type=_positive_int)
    p.add_argument("--kraus", type=_positive_int, default=2)
    p.add_argument("--params", type=_positive_int, default=1)
    p.add_argument("--count", type=_positive_int, default=1)
    return parser


def config_from_args(args):
    cfg = RunConfig(command=args.command, seed=args.seed, out=args.out, format=args.format,
                    tolerance_profile=args.tolerance_profile)
    if args.command in ("metric", "alpha-scan", "experiment"):
        cfg.family = args.family
        cfg.theta = parse_grid(args.theta) if args.theta else []
    if args.command == "alpha-scan":
        cfg.alphas = parse_floats(args.alpha)
    if args.command == "verify":
        cfg.suites = [s.strip() for item in (args.suite or ["all"]) for s in item.split(",") if s.strip()]
        cfg.samples, cfg.timing = args.samples, args.timing
    if args.command == "experiment":
        cfg.shots, cfg.construction = args.shots, args.construction
    if args.command == "sample":
        cfg.sample_kind, cfg.dim, cfg.rank = args.kind, args.dim, args.rank
        cfg.kraus, cfg.params, cfg.count = args.kraus, args.params, args.count
    return cfg.validate()


def render(doc, rows, fmt):
    return dumps(doc) if fmt == "json" else rows_to_csv(rows)


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
        return
    tmp = f"{out}.tmp{os.getpid()}"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, out)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    func, needs_family = COMMANDS[args.command]
    try:
        cfg = config_from_args(args)
        family = family_from_json(load_file(cfg.family)) if needs_family else None
    except (UsageError, FormatError, MixedFSError, ValueError) as exc:
        print(f"mixedfs {args.command}: input error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        doc, rows, code = func(cfg, family)
    except verify.UnknownSuite as exc:
        print(f"mixedfs verify: {exc.args[0]}", file=sys.stderr)
        return EXIT_SUITE
    except UsageError as exc:
        print(f"mixedfs {args.command}: input error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MixedFSError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"mixedfs {args.command}: numeric error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    _emit(render(doc, rows, cfg.format), cfg.out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
