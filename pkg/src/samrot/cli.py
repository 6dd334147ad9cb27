"""``samrot`` command-line interface.

Exit status is 0 on success, 1 on invalid input (including usage errors) and
2 on numerical failure.  JSON output is canonical: sorted keys, floats with 17
significant digits, exact rationals as ``"p/q"`` strings.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import charts, checks, gravgrad, lie, oracle, propagator, tables
from .errors import NumericalError, SamrotError, ValidationError
from .series import GaussianRational, Series


# -- canonical JSON -------------------------------------------------------------

def _float(x):
    x = float(x)
    if not math.isfinite(x):
        return "null"
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return format(x, ".17g")


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float) or isinstance(obj, np.floating):
        return _float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode({"re": obj.real, "im": obj.imag}, indent, level)
    if isinstance(obj, Fraction):
        return json.dumps(f"{obj.numerator}/{obj.denominator}")
    if isinstance(obj, GaussianRational):
        return _encode(obj.to_json(), indent, level)
    if isinstance(obj, Series):
        return _encode(obj.to_json(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}"
                 for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if not len(obj):
            return "[]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj, indent=1):
    """Deterministic JSON text (trailing newline included)."""
    return _encode(obj, indent, 0) + "\n"


# -- configuration --------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    inertia: tuple
    andoyer: charts.AndoyerState
    order: int
    oracle_tol: float
    t_max: float
    dt: float
    orbit: gravgrad.OrbitModel | None = None
    nondimensional: bool = False

    @property
    def params(self):
        make = charts.nondimensional_params if self.nondimensional else charts.derive_params
        return make(*self.inertia)

    def times(self):
        n = int(math.floor(self.t_max / self.dt + 1e-9))
        return self.dt * np.arange(n + 1)

    @classmethod
    def from_dict(cls, d):
        try:
            inertia = tuple(float(v) for v in d["inertia"])
            if len(inertia) != 3:
                raise ValidationError("inertia needs three moments")
            a = d["andoyer"]
            state = charts.AndoyerState(float(a["lambda"]), float(a["mu"]), float(a["nu"]),
                                        float(a["Lambda"]), float(a["M"]), float(a["N"]))
            order = int(d.get("order", 3))
            tol = float(d.get("oracle_tol", 1e-12))
            t_max = float(d["grid"]["t_max"])
            dt = float(d["grid"]["dt"])
            orbit = None
            if d.get("orbit") is not None:
                o = d["orbit"]
                orbit = gravgrad.OrbitModel(float(o["a"]), float(o["e"]), float(o["n"]),
                                            float(o.get("phase0", 0.0)), float(o.get("theta0", 0.0)))
            nondim = bool(d.get("nondimensional", False))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed config: missing or invalid {exc}") from exc
        if order < 1:
            raise ValidationError("order must be >= 1")
        if not dt > 0 or not t_max >= 0:
            raise ValidationError("need dt > 0 and t_max >= 0")
        cfg = cls(inertia, state, order, tol, t_max, dt, orbit, nondim)
        cfg.params  # validates the moments
        return cfg

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ValidationError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)


def _inertia(text):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise ValidationError(f"--inertia expects A,B,C, got {text!r}") from exc
    if len(vals) != 3:
        raise ValidationError(f"--inertia expects three values, got {text!r}")
    return vals


def _write(text, path, stdout):
    if path in (None, "-"):
        stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _csv(traj):
    buf = io.StringIO()
    traj.to_csv(buf)
    return buf.getvalue()


# -- subcommands --------------------------------------------------------------------

def cmd_params(args, out):
    p = charts.derive_params(*_inertia(args.inertia))
    d = p.as_dict()
    d["sqrtgamma"] = p.sqrtgamma
    _write(dumps(d), None, out)


def series_payload(result, params=None):
    rows_p = tables.compare_p(result.p_polys)
    rows_s = tables.compare_s(result.s_terms, result.s_inexact)
    return {
        "order": result.order,
        "params": params.as_dict() if params is not None else None,
        "K": result.K_terms,
        "S": result.S_terms,
        "p": result.p_polys,
        "s": result.s_terms,
        "s_inexact": list(result.s_inexact),
        "direct": {k: v for k, v in result.direct_series.items()},
        "inverse": {k: v for k, v in result.inverse_series.items()},
        "published": {
            "p": [{"n": n, "match": m, "ratio": r} for n, m, r in rows_p],
            "s": [{"m": k, "match": m, "ratio": r} for k, m, r in rows_s],
        },
    }


def cmd_series(args, out):
    params = charts.derive_params(*_inertia(args.inertia))
    if args.order < 1:
        raise ValidationError("--order must be >= 1")
    result = lie.normalize(args.order)
    _write(dumps(series_payload(result, params)), args.out, out)


def _order(args, cfg):
    return cfg.order if args.order is None else args.order


def cmd_propagate(args, out):
    cfg = RunConfig.load(args.config)
    order = _order(args, cfg)
    result = lie.normalize(max(order, 1))
    sol = propagator.analytic_solution(cfg.andoyer, cfg.params, result, order)
    _write(_csv(sol.trajectory(cfg.times())), args.out, out)


def cmd_oracle(args, out):
    cfg = RunConfig.load(args.config)
    tol = cfg.oracle_tol if args.tol is None else args.tol
    t = cfg.times()
    ns = charts.andoyer_nonsingular(cfg.andoyer)
    traj = oracle.integrate(ns, cfg.params, (t[0], t[-1]), tol=tol, times=t)
    _write(_csv(traj), args.out, out)


def cmd_compare(args, out):
    cfg = RunConfig.load(args.config)
    order = _order(args, cfg)
    tol = cfg.oracle_tol if args.tol is None else args.tol
    result = lie.normalize(max(order, 1))
    _, _, report = propagator.run_comparison(cfg.andoyer, cfg.params, result, order,
                                             cfg.times(), tol=tol)
    _write(dumps(report.to_json()), args.out, out)


def cmd_gravgrad(args, out):
    cfg = RunConfig.load(args.config)
    if cfg.orbit is None:
        raise ValidationError("config has no orbit block")
    p = cfg.params
    z = charts.andoyer_to_complex(cfg.andoyer, p)
    _write(dumps(gravgrad.report(cfg.andoyer, z, p, cfg.orbit, args.t)), args.out, out)


def cmd_check(args, out):
    results = checks.run_all(quick=args.quick)
    for r in results:
        out.write(r.line() + "\n")
    failed = [r for r in results if not r.passed and not r.informational]
    out.write(f"{len(results) - len(failed)}/{len(results)} ok\n")
    return 2 if failed else 0


# -- dispatch ------------------------------------------------------------------------

class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def build_parser():
    p = _Parser(prog="samrot", description="Short-axis-mode rotation by Lie transforms.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("params", help="body parameters from the principal moments")
    s.add_argument("--inertia", required=True, metavar="A,B,C")
    s.set_defaults(func=cmd_params)

    s = sub.add_parser("series", help="normalize and export the series as JSON")
    s.add_argument("--inertia", required=True, metavar="A,B,C")
    s.add_argument("--order", type=int, required=True)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_series)

    s = sub.add_parser("propagate", help="analytic trajectory as CSV")
    s.add_argument("--config", required=True)
    s.add_argument("--order", type=int, default=None)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_propagate)

    s = sub.add_parser("oracle", help="numerical reference trajectory as CSV")
    s.add_argument("--config", required=True)
    s.add_argument("--tol", type=float, default=None)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("compare", help="analytic vs numerical error report")
    s.add_argument("--config", required=True)
    s.add_argument("--order", type=int, default=None)
    s.add_argument("--tol", type=float, default=None)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("gravgrad", help="gravity-gradient term and its generator")
    s.add_argument("--config", required=True)
    s.add_argument("--t", type=float, default=0.0)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_gravgrad)

    s = sub.add_parser("check", help="run the invariant suite")
    s.add_argument("--quick", action="store_true")
    s.set_defaults(func=cmd_check)
    return p


def main(argv=None, stdout=None, stderr=None):
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        stderr.write(f"{exc}\n")
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        code = args.func(args, stdout)
    except ValidationError as exc:
        stderr.write(f"error: {exc}\n")
        return 1
    except NumericalError as exc:
        stderr.write(f"numerical failure: {exc}\n")
        return 2
    except SamrotError as exc:
        stderr.write(f"error: {exc}\n")
        return 1
    return code or 0


if __name__ == "__main__":
    sys.exit(main())
