"""Command-line experiment runner.

Every subcommand prints (or writes to ``--out``) one JSON report holding the
configuration echo, the library version, per-stage wall-clock timings and the
result. Reports are byte-identical across runs apart from the ``timings``
block.

Exit codes: 0 success, 1 a validator failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from ffrestrict import __version__
from ffrestrict.ffield import FieldError, parse_field

__all__ = ["ExperimentConfig", "main", "parse_value", "run"]

DEFAULT_CAPS = {"stein_tomas": 4.0, "regular": 8.0, "local": 4.0, "l4": 2**0.75}


# ----------------------------------------------------------------------
# configuration
# ----------------------------------------------------------------------
def parse_value(text: str):
    """``"3"`` -> 3, ``"2/3"`` -> Fraction, ``"0.5"`` -> 0.5, anything else stays a string."""
    text = text.strip()
    for conv in (int, Fraction, float):
        try:
            return conv(text)
        except ValueError:
            continue
    return text


def _format_value(v) -> str:
    return str(v)


@dataclass
class ExperimentConfig:
    """Field, subcommand and parameters of one run.

    Text form is one ``key=value`` per line; ``field`` and ``command`` are
    ordinary keys. Exact fractions are written ``a/b``.
    """

    field: str
    command: str
    params: dict = field(default_factory=dict)

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        text = text.strip()
        if text.startswith("{"):
            obj = json.loads(text)
            params = {k: (parse_value(v) if isinstance(v, str) else v) for k, v in obj.get("params", {}).items()}
            return cls(str(obj["field"]), str(obj["command"]), params)
        kv = {}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            if not sep:
                raise ValueError(f"expected key=value, got {raw!r}")
            kv[key.strip()] = val.strip()
        try:
            fld, cmd = kv.pop("field"), kv.pop("command")
        except KeyError as err:
            raise ValueError(f"missing key {err.args[0]!r}") from err
        return cls(fld, cmd, {k: parse_value(v) for k, v in kv.items()})

    def to_text(self) -> str:
        lines = [f"field={self.field}", f"command={self.command}"]
        lines += [f"{k}={_format_value(v)}" for k, v in sorted(self.params.items())]
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {"field": self.field, "command": self.command, "params": {k: _jsonable(v) for k, v in sorted(self.params.items())}}


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if hasattr(obj, "to_json"):
        return _jsonable(obj.to_json())
    return obj


class _Timer:
    def __init__(self):
        self.stages = {}

    @contextmanager
    def stage(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.stages[name] = round(time.perf_counter() - t0, 6)


def _load_data(path: str | None) -> dict:
    """Read input data; a saved ``generate`` report is unwrapped to its result."""
    if not path:
        return {}
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        obj = json.loads(text)
        return obj["result"] if isinstance(obj.get("result"), dict) and "command" in obj else obj
    return ExperimentConfig.from_text(text).params if "command=" in text else {
        k.strip(): parse_value(v) for k, _, v in (l.partition("=") for l in text.splitlines() if "=" in l)
    }


def _require(ok: bool, failures: list, name: str):
    if not ok:
        failures.append(name)


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------
def _cmd_paraboloid(ctx, args, timer, failures):
    from ffrestrict.paraboloid import ParaboloidCtx, fourier_dimension_report, gauss_sum, kernel_formula_check, pseudo_conformal_identity

    pctx = ParaboloidCtx(ctx)
    out = {}
    with timer.stage("fourier_dimension"):
        rep = fourier_dimension_report(pctx)
        out["fourier_dimension"] = rep
        _require(abs(rep["max"] - 1 / ctx.p) <= 1e-9 or ctx.k > 1, failures, "fourier_dimension")
    with timer.stage("kernel"):
        dev = kernel_formula_check(pctx)
        gauss = max(abs(abs(gauss_sum(ctx, a)) ** 2 - ctx.q) for a in range(1, ctx.q))
        out["kernel"] = {"max_deviation": dev, "gauss_modulus_deviation": gauss}
        _require(dev < 1e-9 and gauss < 1e-9 * ctx.q, failures, "kernel")
    with timer.stage("pseudo_conformal"):
        rng = np.random.default_rng(args.seed)
        h0 = rng.random(ctx.q**2) * (rng.random(ctx.q**2) < 0.5)
        pc = pseudo_conformal_identity(pctx, h0, z=int(rng.integers(ctx.q)))
        out["pseudo_conformal"] = {"lhs": pc.lhs, "rhs": pc.rhs, "rel_err": pc.rel_err, "rhs_all_t": pc.rhs_all_t}
        _require(pc.rel_err < 1e-9, failures, "pseudo_conformal")
    return out


def _config_from(ctx, data, args):
    from ffrestrict.generators import random_points
    from ffrestrict.incidence import PointLineConfig

    if "config" in data:
        data = data["config"]
    if "points" in data:
        return PointLineConfig.from_json(data, ctx)
    n = int(data.get("n_points", getattr(args, "random", None) or 0))
    return PointLineConfig.from_json(random_points(ctx, n, seed=args.seed)["config"], ctx)


def _cmd_incidence(ctx, args, timer, failures):
    from ffrestrict.incidence import count_incidences, energy_chain, line_map_injectivity, measured_exponent, trivial_bound
    from ffrestrict.paraboloid import ParaboloidCtx

    cfg = _config_from(ctx, _load_data(args.config_file), args)
    out = {"n_points": cfg.n_points, "n_lines": cfg.n_lines}
    with timer.stage("count"):
        I = count_incidences(cfg)
        tb = trivial_bound(cfg)
        out.update({"incidences": I, "trivial_bound": tb.bound, "trivial_holds": tb.holds})
        out["alpha_hat"] = measured_exponent(I, max(cfg.n_points, cfg.n_lines))
        _require(tb.holds, failures, "trivial_bound")
    with timer.stage("line_map"):
        inj, witness = line_map_injectivity(ctx)
        out["line_map_injective"] = inj
        out["line_map_witness"] = witness
    if args.energy_size:
        with timer.stage("energy_chain"):
            if inj:
                pctx = ParaboloidCtx(ctx)
                rng = np.random.default_rng(args.seed)
                E = rng.choice(pctx.size, size=min(args.energy_size, pctx.size), replace=False)
                ch = energy_chain(pctx, E)
                out["energy_chain"] = ch
                _require(ch["chain_holds"] and ch["l4_bound_holds"], failures, "energy_chain")
            else:
                out["energy_chain"] = "skipped: -1 is a square"
    return out


def _cmd_structure(ctx, args, timer, failures):
    from ffrestrict.structure import incidence_structure_pipeline

    cfg = _config_from(ctx, _load_data(args.config_file), args)
    with timer.stage("pipeline"):
        return incidence_structure_pipeline(cfg, args.loss_factor, budget=args.budget, seed=args.seed)


def _cmd_estimate(ctx, args, timer, failures):
    from ffrestrict.estimator import search_lower_bound

    fams = "all" if args.family == "all" else (args.family,)
    with timer.stage("search"):
        rep = search_lower_bound(ctx, args.p, args.q, fams, seed=args.seed, iterations=args.iters)
    return rep.to_json()


def _cmd_regular(ctx, args, timer, failures, caps):
    from ffrestrict.estimator import regular_l2_bound_check
    from ffrestrict.generators import regular_gridfn, regular_set
    from ffrestrict.regular import decompose, level_count_bound, pieces_per_level_bound, regularity_stats

    data = _load_data(args.config_file)
    if "support" not in data:
        data = regular_set(ctx, args.slice_count, args.slice_size, seed=args.seed)
    f = regular_gridfn(data)
    out = {}
    with timer.stage("decompose"):
        pieces, tail = decompose(f)
        rec = tail.values.copy()
        for p in pieces:
            rec = rec + p.to_gridfn().values
        out["exact_reconstruction"] = bool(np.array_equal(rec, f.values))
        out["pieces"] = [dict(regularity_stats(p), **p.to_json()) for p in pieces]
        bound = level_count_bound(ctx.q) * pieces_per_level_bound(ctx.q)
        out["piece_bound"] = bound
        _require(out["exact_reconstruction"] and len(pieces) <= bound, failures, "decomposition")
    with timer.stage("l2_bound"):
        checks = [regular_l2_bound_check(p, cap=caps["regular"]) for p in pieces]
        out["l2_checks"] = checks
        _require(all(c["holds"] for c in checks), failures, "regular_l2_bound")
    return out


def _cmd_generate(ctx, args, timer, failures):
    from ffrestrict.generators import generate

    params = {}
    for item in args.param or []:
        k, sep, v = item.partition("=")
        if not sep:
            raise ValueError(f"--param expects key=value, got {item!r}")
        params[k.replace("-", "_")] = parse_value(v)
    with timer.stage("generate"):
        return generate(args.kind, ctx, seed=args.seed, **params)


def _cmd_verify(ctx, args, timer, failures, caps):
    from ffrestrict.estimator import (
        EstimatorParams,
        exponent_algebra,
        l4_incidence_bound_check,
        stein_tomas_validators,
        subspace_sharpness,
    )
    from ffrestrict.fourier import GridFn
    from ffrestrict.incidence import additive_quadruples, galilean_reduction_check, l4_identity_check, line_map_injectivity
    from ffrestrict.paraboloid import ParaboloidCtx

    out = {"paraboloid": _cmd_paraboloid(ctx, args, timer, failures)}
    pctx = ParaboloidCtx(ctx)
    rng = np.random.default_rng(args.seed)
    n_trials = 10 if args.suite == "core" else 50
    with timer.stage("energy"):
        worst = 0.0
        gal_ok = True
        for _ in range(n_trials):
            E = rng.choice(pctx.size, size=int(rng.integers(1, pctx.size + 1)), replace=False)
            a, d, rel = l4_identity_check(pctx, E)
            worst = max(worst, rel)
            _require(additive_quadruples(pctx, E, "hash") == additive_quadruples(pctx, E, "cubic"), failures, "energy_two_algorithms")
            b = pctx.points[int(rng.integers(pctx.size))]
            gal_ok &= bool(galilean_reduction_check(pctx, E, b)[2])
        out["l4_identity_worst_rel"] = worst
        out["galilean_equal"] = gal_ok
        _require(worst < 1e-9, failures, "l4_identity")
        _require(gal_ok, failures, "galilean")
    with timer.stage("line_map"):
        inj, wit = line_map_injectivity(ctx)
        out["line_map"] = {"injective": inj, "witness": wit, "expected": not ctx.minus_one_is_square()}
        _require(inj == (not ctx.minus_one_is_square()), failures, "line_map")
    with timer.stage("l4_bound"):
        if inj:
            rows = []
            for _ in range(n_trials):
                E = rng.choice(pctx.size, size=int(rng.integers(1, pctx.size + 1)), replace=False)
                rows.append(l4_incidence_bound_check(pctx, E, constant=caps["l4"]))
            out["l4_incidence_max_ratio"] = max(r["ratio"] for r in rows)
            _require(all(r["holds"] and r["chain_holds"] for r in rows), failures, "l4_incidence_bound")
        else:
            sharp = {str(qe): subspace_sharpness(ctx, qe) for qe in ("3", "10/3", "4")}
            out["subspace_sharpness"] = sharp
            _require(all(abs(m - c) <= 1e-9 * max(1.0, c) for m, c in sharp.values()), failures, "sharpness")
    with timer.stage("stein_tomas"):
        worst = {}
        for _ in range(n_trials):
            mask = rng.random(ctx.q**3) < rng.random()
            if not mask.any():
                mask[0] = True
            f = GridFn(ctx, 3, mask.astype(float))
            for name, res in stein_tomas_validators(f, EstimatorParams(), cap=caps["stein_tomas"]).items():
                worst[name] = max(worst.get(name, 0.0), res.constant)
                _require(res.holds, failures, f"stein_tomas_{name}")
        out["stein_tomas_worst_constants"] = worst
    with timer.stage("exponent_algebra"):
        out["exponent_algebra"] = exponent_algebra()
    return out


# ----------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------
def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", default="7", help='field as "p", "p^k" or "p^k/c0,...,ck" (default 7)')
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--threads", type=int, default=1, help="accepted for compatibility; kernels are vectorized")
    common.add_argument("--caps-file", help="JSON overriding the validator constant caps")
    common.add_argument("--config-file", help="JSON or key=value input data")

    ap = argparse.ArgumentParser(prog="ffrestrict", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    sub.add_parser("paraboloid", parents=[common], help="Fourier dimension, kernel and pseudo-conformal checks")

    p = sub.add_parser("incidence", parents=[common], help="incidence counts, trivial bound, energy chain")
    p.add_argument("--random", type=int, help="random configuration with this many points and lines")
    p.add_argument("--energy-size", type=int, default=0, help="also run the energy chain on a random E of this size")

    p = sub.add_parser("structure", parents=[common], help="grid and subfield extraction pipeline")
    p.add_argument("--loss-factor", "-K", type=float, default=2.0)
    p.add_argument("--budget", type=int, default=10**7)
    p.add_argument("--random", type=int)

    p = sub.add_parser("estimate", parents=[common], help="lower bound for the extension constant")
    p.add_argument("--p", type=parse_value, default=2)
    p.add_argument("--q", type=parse_value, default=4)
    p.add_argument("--family", default="all", choices=["all", "ones", "points", "subspace", "galilean", "slices", "grids", "random", "ascent"])
    p.add_argument("--iters", type=int, default=50)

    p = sub.add_parser("regular", parents=[common], help="level-set and regular decomposition")
    p.add_argument("--slice-count", type=int, default=3)
    p.add_argument("--slice-size", type=int, default=4)

    p = sub.add_parser("generate", parents=[common], help="emit a planted or random instance")
    p.add_argument("kind", help="subfield-grid, regular-set, random-points or subspace")
    p.add_argument("--param", action="append", help="generator parameter key=value (repeatable)")

    p = sub.add_parser("verify", parents=[common], help="run the validator suite on one field")
    p.add_argument("--suite", choices=["core", "all"], default="core")
    return ap


def run(argv=None) -> tuple[int, dict]:
    """Parse ``argv``, run the command and return ``(exit code, report)``."""
    ap = _parser()
    args = ap.parse_args(argv)
    echo = {k: _jsonable(v) for k, v in sorted(vars(args).items())}
    report = {"command": args.command, "config": echo, "version": __version__}
    try:
        caps = dict(DEFAULT_CAPS)
        if args.caps_file:
            caps.update(json.loads(Path(args.caps_file).read_text()))
        ctx = parse_field(args.field)
    except (FieldError, ValueError, OSError) as err:
        report["error"] = str(err)
        return 2, report
    timer = _Timer()
    failures: list = []
    handlers = {
        "paraboloid": _cmd_paraboloid,
        "incidence": _cmd_incidence,
        "structure": _cmd_structure,
        "estimate": _cmd_estimate,
        "generate": _cmd_generate,
        "regular": lambda c, a, t, f: _cmd_regular(c, a, t, f, caps),
        "verify": lambda c, a, t, f: _cmd_verify(c, a, t, f, caps),
    }
    try:
        result = handlers[args.command](ctx, args, timer, failures)
    except (FieldError, ValueError, KeyError, TypeError, OSError) as err:
        report["error"] = str(err)
        report["timings"] = timer.stages
        return 2, report
    report["result"] = _jsonable(result)
    report["caps"] = caps
    report["failures"] = failures
    report["timings"] = timer.stages
    return (1 if failures else 0), report


def main(argv=None) -> int:
    try:
        code, report = run(argv)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0)
    text = json.dumps(_jsonable(report), indent=2, sort_keys=True)
    if "error" in report:
        print(json.dumps({"error": report["error"], "exit": code}), file=sys.stderr)
    dest = report["config"].get("out")
    if dest and "error" not in report:
        Path(dest).write_text(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
