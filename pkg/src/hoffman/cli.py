"""Command-line interface: ``hoffman <command> ...`` with JSON reports on stdout.

System files are JSON documents::

    {"n": 2, "norm": "l2",
     "rows": [{"label": "x1<=1", "a": [1, 0]}, ...],
     "b": [1, ...]}                                   # optional

or, for a continuous system, ``{"builtin": "example-4-3"}`` or::

    {"n": 2, "norm": "l2",
     "segments": [{"lo": 0, "hi": 1, "samples": [[t, a_1, ..., a_n, b], ...]}],
     "extra_rows": [{"label": "cap", "a": [1, 0], "b": 1}]}

Tabulated segments are interpolated linearly between samples.  Continuous
systems are discretized with ``--grid-step`` for the finite commands.

Exit codes: 0 success, 2 invalid input, 3 infeasible system, 4 size limit,
5 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from importlib.metadata import PackageNotFoundError, version
from typing import List, Optional

import numpy as np

from .calmness import clm_at
from .continuous import ContinuousSystem, Segment, builtin
from .core import (DEFAULT_TOL_ACTIVE, FiniteSystem, HoffmanError, InfeasibleSystem, NormKind,
                   NumericalFailure, SizeLimit)
from .geometry import TOL_RANK, TOL_STRICT, enumerate_vertices
from .geometry.polyhedra import SUBSET_CAP
from .hoffman_global import hof_global, hof_global_grid
from .lab import FIXTURES, Schedule, estimate_moduli, fixture
from .semilocal import chain_check, hof_at, hof_at_sampling, mc_ratio_sup, uniform_sampler

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_SIZE, EXIT_NUMERIC = 0, 2, 3, 4, 5


class InputError(HoffmanError, ValueError):
    pass


def _version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "0+unknown"


# ------------------------------------------------------------------ JSON I/O

def _num(v):
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _vec(a) -> list:
    return [_num(v) for v in np.asarray(a, dtype=float).reshape(-1)]


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False)


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{path} is not valid JSON: {e}") from None


def parse_system(doc):
    """A :class:`FiniteSystem` or :class:`ContinuousSystem` plus the inline rhs (or None)."""
    if not isinstance(doc, dict):
        raise InputError("a system file must hold a JSON object")
    norm = NormKind.parse(doc.get("norm", "l2"))
    if "builtin" in doc:
        return builtin(doc["builtin"], norm), None
    if "segments" in doc:
        n = int(doc["n"])
        segs = tuple(Segment.from_samples(s["samples"]) for s in doc["segments"])
        for s, raw in zip(segs, doc["segments"]):
            if ("lo" in raw and float(raw["lo"]) != s.lo) or ("hi" in raw and float(raw["hi"]) != s.hi):
                raise InputError("segment lo/hi must match the first and last sample abscissae")
            if s.samples.shape[1] != n + 2:
                raise InputError(f"segment samples need {n + 2} columns [t, a..., b]")
        extras = tuple((r["label"], r["a"], r["b"]) for r in doc.get("extra_rows", []))
        return ContinuousSystem(n, segs, extras, norm), None
    rows = doc.get("rows")
    if not rows:
        raise InputError("a system needs at least one row")
    A = np.array([r["a"] for r in rows], dtype=float)
    if "n" in doc and A.shape[1] != int(doc["n"]):
        raise InputError(f"rows have length {A.shape[1]} but n = {doc['n']}")
    labels = [r.get("label", f"r{i}") for i, r in enumerate(rows)]
    sys_ = FiniteSystem(A, tuple(labels), norm)
    b = doc.get("b")
    return sys_, (sys_.check_rhs(b) if b is not None else None)


def dump_system(sys_: FiniteSystem, b=None) -> dict:
    doc = {"n": sys_.n, "norm": sys_.norm.value,
           "rows": [{"label": lab, "a": _vec(a)} for lab, a in zip(sys_.labels, sys_.A)]}
    if b is not None:
        doc["b"] = _vec(b)
    return doc


def _parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.split(",") if t.strip()], dtype=float)
    except ValueError:
        raise InputError(f"cannot parse {text!r} as a comma-separated list of numbers") from None


def _parse_rhs(text: Optional[str]):
    if text is None:
        return None
    if os.path.exists(text) or text.endswith(".json"):
        doc = _load_json(text)
        if isinstance(doc, dict):
            doc = doc.get("b")
        if not isinstance(doc, list):
            raise InputError(f"{text} must hold a list or an object with key 'b'")
        return np.array(doc, dtype=float)
    return _parse_vector(text)


def _finite_system(args, need_rhs: bool):
    """Load SYS, discretizing continuous systems; returns (system, rhs or None)."""
    obj, b_inline = parse_system(_load_json(args.system))
    if isinstance(obj, ContinuousSystem):
        if args.grid_step is None:
            raise InputError("continuous systems need --grid-step")
        obj, b_inline = obj.discretize(args.grid_step)
    b = _parse_rhs(args.rhs)
    if b is None:
        b = b_inline
    if b is not None:
        b = obj.check_rhs(b)
    elif need_rhs:
        raise InputError("this command needs --rhs (or an inline 'b' in the system file)")
    return obj, b


# ------------------------------------------------------------------ reports

def _subset(sys_: FiniteSystem, s) -> dict:
    return {"indices": list(s.indices), "labels": [sys_.labels[i] for i in s.indices]}


def _calmness_json(sys_, rep) -> dict:
    return {
        "value": _num(rep.value),
        "attaining": _subset(sys_, rep.attaining),
        "active": _subset(sys_, rep.family.active),
        "family": [dict(_subset(sys_, D), witness=_vec(D.certificate)) for D in rep.family.members],
        "end_set": [[_vec(p) for p in hull] for hull in rep.end_set],
    }


def _header(args, command: str) -> dict:
    return {
        "tool": "hoffman",
        "version": _version(),
        "command": command,
        "seed": getattr(args, "seed", None),
        "tolerances": {"tol_active": args.tol_active, "tol_strict": args.tol_strict,
                       "tol_rank": args.tol_rank},
    }


def cmd_global(args) -> dict:
    sys_, _ = _finite_system(args, need_rhs=False)
    rep = hof_global(sys_, exhaustive=args.exhaustive, tol_rank=args.tol_rank, cap=args.cap)
    return {"value": _num(rep.value), "subset": _subset(sys_, rep.subset),
            "weights": _vec(rep.subset.certificate) if rep.subset.certificate is not None else [],
            "certificate": _vec(rep.certificate),
            "routes": {k: _num(v) for k, v in rep.routes.items()},
            "grid_step": args.grid_step}


def cmd_at(args) -> dict:
    sys_, b = _finite_system(args, need_rhs=True)
    rep = hof_at(sys_, b, tol_active=args.tol_active, tol_strict=args.tol_strict,
                 tol_rank=args.tol_rank, cap=args.cap)
    return {"value": _num(rep.value), "attaining_point": _vec(rep.attaining_point),
            "candidates": [{"point": _vec(v), "clm": _num(c.value),
                            "attaining": _subset(sys_, c.attaining)} for v, c in rep.candidates]}


def cmd_calmness(args) -> dict:
    sys_, b = _finite_system(args, need_rhs=True)
    if args.point is None:
        raise InputError("calmness needs --point")
    x = sys_.check_point(_parse_vector(args.point))
    rep = clm_at(sys_, b, x, args.tol_active, args.tol_strict)
    return dict(point=_vec(x), **_calmness_json(sys_, rep))


def cmd_vertices(args) -> dict:
    sys_, b = _finite_system(args, need_rhs=True)
    V = enumerate_vertices(sys_, b, args.tol_rank, args.cap)
    return {"count": len(V), "vertices": [_vec(v) for v in V]}


def cmd_verify(args) -> dict:
    sys_, b = _finite_system(args, need_rhs=True)
    rep = hof_at(sys_, b, tol_active=args.tol_active, tol_strict=args.tol_strict,
                 tol_rank=args.tol_rank, cap=args.cap)
    smp = uniform_sampler(args.radius)
    ratio = mc_ratio_sup(sys_, b, smp, args.samples, args.seed)
    grad = hof_at_sampling(sys_, b, smp, args.samples, args.seed, args.tol_active)
    chain = chain_check(sys_, b, N=args.boundary, seed=args.seed, mc_samples=args.samples,
                        mc_sampler=smp, tol_active=args.tol_active)
    return {"hof_at": _num(rep.value),
            "mc_ratio_sup": {"value": _num(ratio.value), "samples": ratio.n_samples,
                             "used": ratio.n_used},
            "hof_at_sampling": {"value": _num(grad.value), "samples": grad.n_samples,
                                "used": grad.n_used},
            "chain_check": {"passed": chain.passed, "max_boundary_clm": _num(chain.max_boundary_clm),
                            "boundary_points": chain.n_boundary,
                            "interior_points": chain.n_interior}}


def cmd_lab(args) -> dict:
    m = fixture(args.fixture, args.y_bar, R=args.R)
    radii = tuple(_parse_vector(args.schedule)) if args.schedule else Schedule().radii
    eps = tuple(_parse_vector(args.eps)) if args.eps else None
    sc = Schedule(radii, eps, per_level=args.per_level, seed=args.seed, cap=args.cap_modulus)
    est = estimate_moduli(m, sc)
    return {"fixture": args.fixture, "y_bar": m.y_bar,
            "sup_clm": _num(est.sup_clm), "uclm": _num(est.uclm), "lipusc": _num(est.lipusc),
            "hof": _num(est.hof),
            "levels": {k: [_num(v) for v in vs] for k, vs in est.levels.items()},
            "diverged": est.diverged, "counts": list(est.counts),
            "schedule": {"radii": list(sc.radii), "eps": list(sc.eps), "per_level": sc.per_level,
                         "cap": sc.cap}}


def cmd_grid_study(args) -> dict:
    csys = builtin(args.builtin)
    steps = _parse_vector(args.steps)
    point = _parse_vector(args.point) if args.point else None
    table = []
    for h in steps:
        rep = hof_global_grid(csys, float(h), tol_rank=args.tol_rank, cap=args.cap)
        row = {"step": float(h), "rows": len(rep.certificate), "hof_global": _num(rep.value)}
        if point is not None:
            fsys, b = csys.discretize(float(h))
            row["clm"] = _num(clm_at(fsys, b, point, args.tol_active, args.tol_strict).value)
        table.append(row)
    return {"builtin": args.builtin, "point": None if point is None else _vec(point), "table": table}


# ------------------------------------------------------------------ driver

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hoffman", description="Hoffman and calmness moduli of linear systems.")
    p.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, system=True, rhs=False):
        if system:
            sp.add_argument("system", help="system file (JSON)")
            sp.add_argument("--grid-step", type=float, default=None,
                            help="grid step for continuous systems")
            sp.add_argument("--dump-normalized", action="store_true",
                            help="print the normalized finite system file and exit")
            sp.add_argument("--cap", type=int, default=SUBSET_CAP, help="subset enumeration cap")
        if rhs:
            sp.add_argument("--rhs", default=None, help="JSON file or comma-separated list")
        sp.add_argument("--tol-active", type=float, default=DEFAULT_TOL_ACTIVE)
        sp.add_argument("--tol-strict", type=float, default=TOL_STRICT)
        sp.add_argument("--tol-rank", type=float, default=TOL_RANK)

    sp = sub.add_parser("global", help="global Hoffman constant")
    common(sp, rhs=True)
    sp.add_argument("--exhaustive", action="store_true", help="cross-check over all subsets")
    sp.set_defaults(run=cmd_global)

    sp = sub.add_parser("at", help="Hoffman modulus at a right-hand side")
    common(sp, rhs=True)
    sp.set_defaults(run=cmd_at)

    sp = sub.add_parser("calmness", help="calmness modulus at a feasible point")
    common(sp, rhs=True)
    sp.add_argument("--point", required=False)
    sp.set_defaults(run=cmd_calmness)

    sp = sub.add_parser("vertices", help="extreme points of F(b) in the row space")
    common(sp, rhs=True)
    sp.set_defaults(run=cmd_vertices)

    sp = sub.add_parser("verify", help="sampling cross-checks of the Hoffman modulus")
    common(sp, rhs=True)
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--radius", type=float, default=3.0)
    sp.add_argument("--boundary", type=int, default=200, help="boundary points for the chain check")
    sp.set_defaults(run=cmd_verify)

    sp = sub.add_parser("lab", help="moduli estimates for a one-dimensional fixture")
    common(sp, system=False)
    sp.add_argument("--fixture", required=True, choices=FIXTURES)
    sp.add_argument("--y-bar", type=float, default=None)
    sp.add_argument("--schedule", default=None, help="comma-separated shrinking radii")
    sp.add_argument("--eps", default=None, help="comma-separated eps per radius")
    sp.add_argument("--per-level", type=int, default=400)
    sp.add_argument("--R", type=float, default=1e3, help="staircase truncation")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cap-modulus", type=float, default=1e6, help="divergence cap")
    sp.set_defaults(run=cmd_lab)

    sp = sub.add_parser("grid-study", help="grid refinement table for a builtin system")
    common(sp, system=False)
    sp.add_argument("--builtin", required=True)
    sp.add_argument("--steps", required=True, help="comma-separated grid steps")
    sp.add_argument("--point", default=None, help="feasible point for the calmness column")
    sp.add_argument("--cap", type=int, default=SUBSET_CAP)
    sp.set_defaults(run=cmd_grid_study)
    return p


def run(argv: Optional[List[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    try:
        if getattr(args, "dump_normalized", False):
            sys_, b = _finite_system(args, need_rhs=False)
            out.write(_dumps(dump_system(sys_, b)) + "\n")
            return EXIT_OK
        body = args.run(args)
    except InfeasibleSystem as e:
        err.write(f"hoffman: infeasible system: {e}\n")
        return EXIT_INFEASIBLE
    except SizeLimit as e:
        err.write(f"hoffman: size limit: {e}\n")
        return EXIT_SIZE
    except NumericalFailure as e:
        err.write(f"hoffman: numerical failure: {e}\n")
        return EXIT_NUMERIC
    except (ValueError, KeyError, TypeError, IndexError) as e:
        err.write(f"hoffman: invalid input: {e}\n")
        return EXIT_INPUT
    report = _header(args, args.command)
    report.update(body)
    out.write(_dumps(report) + "\n")
    return EXIT_OK


def main() -> None:
    sys.exit(run())
