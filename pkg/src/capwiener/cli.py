"""Command-line front end.

``capwiener run --config exp.json`` executes one experiment and writes a JSON
report and a CSV of plot data.  The other subcommands are shortcuts for single
computations that print to stdout.

Exit codes: 0 pass, 1 assertion failure, 2 non-convergence, 3 malformed config.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .capacity import CapacityControls, NonConvergedError, QuadratureError, capacity
from .fixtures import FIXTURES, catalog_text
from .geometry import CompactSet, compact_set_from_dict
from .heat import NonlinearControls
from .params import InvalidParameterError, Params

EXPERIMENTS = ("capacity", "potential", "solve", "vss", "lowerbound", "bilateral", "uplem", "est5",
               "equivalence")

EXIT_PASS, EXIT_FAIL, EXIT_NONCONVERGED, EXIT_CONFIG = 0, 1, 2, 3


class ConfigError(ValueError):
    """Malformed configuration; ``field`` names the offending entry."""

    def __init__(self, field_name: str, msg: str):
        super().__init__(f"{field_name}: {msg}")
        self.field = field_name


# ---------------------------------------------------------------------------
# config


def _resolve_set(entry, where: str) -> CompactSet:
    if isinstance(entry, str):
        if entry not in FIXTURES:
            raise ConfigError(where, f"unknown fixture {entry!r}; known: {', '.join(sorted(FIXTURES))}")
        return FIXTURES[entry][0]
    if isinstance(entry, dict):
        try:
            return compact_set_from_dict(entry)
        except (InvalidParameterError, TypeError, ValueError) as exc:
            raise ConfigError(where, str(exc)) from None
    raise ConfigError(where, "expected a fixture name or a compact-set object")


def _number(d: dict, key: str, where: str, default=None, positive: bool = False) -> Optional[float]:
    if key not in d:
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{where}.{key}", f"expected a finite number, got {v!r}")
    if positive and v <= 0:
        raise ConfigError(f"{where}.{key}", f"must be positive, got {v!r}")
    return float(v)


def _build(where: str, factory: Callable, arg):
    try:
        return factory(arg)
    except (InvalidParameterError, TypeError, ValueError, KeyError) as exc:
        raise ConfigError(where, str(exc)) from None


@dataclass
class ExperimentConfig:
    experiment: str
    params: Params
    fixture: Optional[CompactSet]
    controls: dict = field(default_factory=dict)
    output: Optional[str] = None
    jobs: Optional[int] = None
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("<root>", "the config must be a JSON object")
        exp = d.get("experiment", d.get("id"))
        if exp is None:
            raise ConfigError("experiment", "missing experiment id")
        if exp not in EXPERIMENTS:
            raise ConfigError("experiment", f"unknown experiment id {exp!r}; known: {', '.join(EXPERIMENTS)}")
        p = d.get("params")
        if not isinstance(p, dict):
            raise ConfigError("params", "expected an object with N and q")
        for key in ("N", "q"):
            if key not in p:
                raise ConfigError(f"params.{key}", "missing")
        if isinstance(p["N"], bool) or not isinstance(p["N"], int) or p["N"] < 1:
            raise ConfigError("params.N", f"must be a positive integer, got {p['N']!r}")
        q = _number(p, "q", "params")
        if not q > 1:
            raise ConfigError("params.q", f"must exceed 1, got {p['q']!r}")
        params = Params(p["N"], q)
        F = None
        if d.get("fixture") is not None:
            F = _resolve_set(d["fixture"], "fixture")
            if F.dim != params.N:
                raise ConfigError("fixture", f"set dimension {F.dim} does not match params.N = {params.N}")
        elif exp != "vss":
            raise ConfigError("fixture", "missing")
        controls = d.get("controls", {})
        if not isinstance(controls, dict):
            raise ConfigError("controls", "expected an object")
        jobs = d.get("jobs")
        if jobs is not None and (isinstance(jobs, bool) or not isinstance(jobs, int) or jobs < 1):
            raise ConfigError("jobs", f"must be a positive integer, got {jobs!r}")
        out = d.get("output")
        if out is not None and not isinstance(out, str):
            raise ConfigError("output", "expected a directory path")
        return cls(exp, params, F, controls, out, jobs, d)


# ---------------------------------------------------------------------------
# experiments


@dataclass
class Outcome:
    passed: bool
    summary: dict
    samples: list = field(default_factory=list)
    budget: dict = field(default_factory=dict)
    csv: str = ""
    extra: dict = field(default_factory=dict)


def _capacity_controls(c: dict, key: str = "capacity") -> Optional[CapacityControls]:
    if key not in c:
        return None
    if not isinstance(c[key], dict):
        raise ConfigError(f"controls.{key}", "expected an object")
    return _build(f"controls.{key}", CapacityControls.from_dict, c[key])


def _samples(c: dict, default=None) -> list:
    if "samples" not in c:
        if default is None:
            raise ConfigError("controls.samples", "missing")
        return default
    s = c["samples"]
    if not isinstance(s, list) or not s:
        raise ConfigError("controls.samples", "expected a non-empty list of [x, t] pairs")
    out = []
    for i, pair in enumerate(s):
        if (not isinstance(pair, (list, tuple)) or len(pair) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pair)):
            raise ConfigError(f"controls.samples[{i}]", f"expected [x, t], got {pair!r}")
        if not pair[1] > 0:
            raise ConfigError(f"controls.samples[{i}]", "t must be positive")
        out.append((float(pair[0]), float(pair[1])))
    return out


def _grid(c: dict, N: int):
    from .pde import SpaceTimeGrid
    if "grid" not in c:
        return None
    g = c["grid"]
    if not isinstance(g, dict):
        raise ConfigError("controls.grid", "expected an object")
    return _build("controls.grid", SpaceTimeGrid.from_dict, {"N": N, **g})


def _measure_csv(measure) -> str:
    dim = measure.atoms.shape[1]
    head = ",".join([f"x{i}" for i in range(dim)] + ["weight"])
    rows = [head] + [",".join([repr(float(v)) for v in a] + [repr(float(w))])
                     for a, w in zip(measure.atoms, measure.weights)]
    return "\n".join(rows) + "\n"


def _run_capacity(cfg: ExperimentConfig) -> Outcome:
    res = capacity(cfg.fixture, cfg.params, _capacity_controls(cfg.controls))
    d = res.to_dict()
    measure = d.pop("measure")
    ok = res.value >= 0 and (res.value == 0 or res.dual_bound <= res.value * (1 + 1e-12))
    return Outcome(ok, {**d, "rel_gap": res.rel_gap, "atoms": len(measure["weights"])},
                   csv=_measure_csv(res.measure), extra={"measure": measure})


def _run_potential(cfg: ExperimentConfig) -> Outcome:
    from .potential import w_potential
    c = cfg.controls
    x = c.get("x", [0.0] * cfg.params.N)
    x = [x] if isinstance(x, (int, float)) and not isinstance(x, bool) else x
    if not isinstance(x, list) or len(x) != cfg.params.N:
        raise ConfigError("controls.x", f"expected a point in R^{cfg.params.N}")
    t = _number(c, "t", "controls", 1.0, positive=True)
    tail = _number(c, "tail_rtol", "controls", 0.0)
    try:
        W = w_potential(cfg.fixture, cfg.params, x, t, _capacity_controls(c), cfg.jobs or 1, tail)
    except InvalidParameterError as exc:
        raise ConfigError("params.q", str(exc)) from None
    d = W.to_dict()
    resum = W.prefactor * math.fsum(r.contribution for r in W.terms)
    ok = all(r.contribution >= 0 for r in W.terms) and abs(resum - W.total) <= 1e-12 * max(abs(W.total), 1e-300)
    return Outcome(ok, {k: d[k] for k in ("x", "t", "prefactor", "total", "gap", "omitted", "h")},
                   samples=d["terms"], budget={"capacity_gap": W.gap}, csv=W.to_csv())


def _run_solve(cfg: ExperimentConfig) -> Outcome:
    from .pde import MaximalControls, maximal_solution
    from .verify import default_grid
    c = cfg.controls
    grid = _grid(c, cfg.params.N)
    if grid is None:
        if cfg.params.N != 1:
            raise ConfigError("controls.grid", "a grid is required for N >= 2")
        T = _number(c, "T", "controls", 0.5, positive=True)
        grid = default_grid(cfg.fixture, T, tuple(np.geomspace(0.02 * T, T, 8).tolist()))
    mc = _build("controls.maximal", MaximalControls.from_dict, c.get("maximal", {}))
    f = maximal_solution(cfg.fixture, cfg.params, grid, mc)
    tol = _number(c, "tol", "controls", 1e-3)
    flat = cfg.params.flat_solution(f.times)
    ok = bool(np.all(f.u >= -1e-12) and np.all(f.u.max(axis=1) <= flat * (1 + tol)))
    s = f.summary()
    s["flat"] = [float(v) for v in flat]
    return Outcome(ok, s, budget={"saturation_change": f.diagnostics.get("change", 0.0)}, csv=f.to_csv())


def _run_vss(cfg: ExperimentConfig) -> Outcome:
    from .vss import ShootingControls, ode_residual, shoot_profile, subcritical_lower_check
    c = cfg.controls
    sc = _build("controls.shooting", ShootingControls.from_dict, c.get("shooting", {}))
    prof = shoot_profile(cfg.params, sc)
    res = ode_residual(prof)
    rtol = _number(c, "residual_tol", "controls", 1e-4)
    ok = (prof.found and res < rtol) if not cfg.params.supercritical else not prof.found
    summary = {**prof.to_dict(), "residual": res}
    samples = []
    if cfg.fixture is not None and prof.found and "samples" in c:
        a = c.get("a", 0.0)
        rep = subcritical_lower_check(cfg.fixture, cfg.params, a, _samples(c), _grid(c, cfg.params.N), prof)
        samples = rep.to_dict()["points"]
        summary["sandwich_passed"] = rep.passed
        summary["scheme_error"] = rep.scheme_error
        ok = ok and rep.passed
    return Outcome(ok, summary, samples=samples, csv=prof.to_csv())


def _run_lowerbound(cfg: ExperimentConfig) -> Outcome:
    from .verify import lower_bound_experiment
    c = cfg.controls
    x = _number(c, "x", "controls", 0.0)
    t = _number(c, "t", "controls", 1.0, positive=True)
    nlc = _build("controls.nonlinear", NonlinearControls.from_dict, c.get("nonlinear", {}))
    rep = lower_bound_experiment(cfg.fixture, cfg.params, x, t, _grid(c, cfg.params.N),
                                 _capacity_controls(c), nlc)
    d = rep.to_dict()
    ok = rep.chain_holds and (rep.W == 0 or rep.c > 0)
    cmin = _number(c, "c_min", "controls")
    if cmin is not None:
        ok = ok and rep.c >= cmin
    csv_text = "quantity,value\n" + "".join(f"{k},{d[k]!r}\n" for k in
                                             ("heat_eps", "nonlinear_eps", "lower", "W", "c", "solution"))
    return Outcome(ok, {k: v for k, v in d.items() if k != "budget"}, budget=rep.budget, csv=csv_text)


def _envelope_ok(summary: dict, c: dict) -> bool:
    if "envelope" not in c:
        return True
    env = c["envelope"]
    if not (isinstance(env, list) and len(env) == 2 and all(isinstance(v, (int, float)) for v in env)
            and 0 < env[0] <= env[1]):
        raise ConfigError("controls.envelope", "expected [low, high] with 0 < low <= high")
    drift = _number(c, "drift", "controls", 2.0, positive=True)
    return summary["min"] >= env[0] / drift and summary["max"] <= env[1] * drift


def _run_bilateral(cfg: ExperimentConfig) -> Outcome:
    from .pde import MaximalControls
    from .verify import bilateral_ratio, sample_grid
    c = cfg.controls
    F = cfg.fixture
    if cfg.params.N != 1:
        raise ConfigError("params.N", "bilateral ratios are computed for N = 1")
    if not cfg.params.supercritical:
        raise ConfigError("params.q", "bilateral ratios need q >= (N+2)/N")
    samples = _samples(c, sample_grid(F) if not F.is_empty() else [(0.0, 0.1), (0.0, 0.5)])
    mc = _build("controls.maximal", MaximalControls.from_dict, c.get("maximal", {})) if "maximal" in c else None
    rep = bilateral_ratio(F, cfg.params, samples, _grid(c, 1), _capacity_controls(c), mc,
                          label=cfg.raw["fixture"] if isinstance(cfg.raw.get("fixture"), str) else "")
    s = rep.summary()
    ok = s["vacuous"] or _envelope_ok(s, c)
    return Outcome(ok, {**s, "notes": rep.notes}, samples=rep.samples, budget=rep.budget, csv=rep.to_csv())


def _run_uplem(cfg: ExperimentConfig) -> Outcome:
    from .verify import uplem_experiment
    c = cfg.controls
    r = _number(c, "r", "controls", None, positive=True)
    rho = _number(c, "rho", "controls", None, positive=True)
    if r is None or rho is None:
        raise ConfigError("controls.r" if r is None else "controls.rho", "missing")
    try:
        rep = uplem_experiment(cfg.fixture, cfg.params, r, rho, _samples(c), _grid(c, cfg.params.N),
                               _capacity_controls(c))
    except InvalidParameterError as exc:
        raise ConfigError("controls", str(exc)) from None
    s = rep.summary()
    ok = s["vacuous"] or math.isfinite(s["max"])
    bound = _number(c, "bound", "controls")
    if bound is not None and not s["vacuous"]:
        ok = ok and s["max"] <= bound
    return Outcome(ok, s, samples=rep.samples, budget=rep.budget, csv=rep.to_csv())


def _run_est5(cfg: ExperimentConfig) -> Outcome:
    from .verify import est5_experiment
    c = cfg.controls
    x = _number(c, "x", "controls", 0.0)
    t = _number(c, "t", "controls", 1.0, positive=True)
    alpha = _number(c, "alpha", "controls", 0.5)
    if not 0 < alpha < 1:
        raise ConfigError("controls.alpha", f"must lie in (0, 1), got {alpha!r}")
    ks = c.get("ks", [0.25, 1.0, 4.0])
    if not (isinstance(ks, list) and ks and all(isinstance(k, (int, float)) and k > 0 for k in ks)):
        raise ConfigError("controls.ks", "expected a non-empty list of positive scales")
    nlc = _build("controls.nonlinear", NonlinearControls.from_dict, c.get("nonlinear", {}))
    rep = est5_experiment(cfg.fixture, cfg.params, x, t, alpha, tuple(float(k) for k in ks),
                          _capacity_controls(c), nlc)
    tol = _number(c, "spread_tol", "controls", 0.25)
    ok = rep["vacuous"] or rep["spread"] <= tol
    lines = ["k,J1,J2,S,ratio"] + [f"{r['k']!r},{r['J1']!r},{r['J2']!r},{r['S']!r},"
                                   f"{'' if r['ratio'] is None else repr(r['ratio'])}" for r in rep["rows"]]
    return Outcome(ok, {"alpha": alpha, "spread": rep["spread"], "vacuous": rep["vacuous"]},
                   samples=rep["rows"], csv="\n".join(lines) + "\n")


def _run_equivalence(cfg: ExperimentConfig) -> Outcome:
    from .verify import capacity_equivalence_check
    c = cfg.controls
    a = c.get("a", [0.0] * cfg.params.N)
    a = [a] if isinstance(a, (int, float)) and not isinstance(a, bool) else a
    if not isinstance(a, list) or len(a) != cfg.params.N:
        raise ConfigError("controls.a", f"expected a point in R^{cfg.params.N}")
    ns = c.get("n", [0])
    ns = [ns] if isinstance(ns, int) else ns
    if not (isinstance(ns, list) and ns and all(isinstance(n, int) and not isinstance(n, bool) and n >= 0
                                                for n in ns)):
        raise ConfigError("controls.n", "expected a non-negative integer or a list of them")
    factor = _number(c, "factor", "controls", 2.0, positive=True)
    rows = []
    ok = True
    for n in ns:
        # the piece is rescaled so that it lies in B(a, 1/sqrt(n+1))
        piece = cfg.fixture
        try:
            lhs, rhs = capacity_equivalence_check(piece, a, n, cfg.params, _capacity_controls(c))
        except InvalidParameterError as exc:
            raise ConfigError("fixture", str(exc)) from None
        ratio = lhs / rhs if rhs > 0 else None
        rows.append({"n": n, "lhs": lhs, "rhs": rhs, "ratio": ratio})
        if ratio is not None:
            ok = ok and 1 / factor <= ratio <= factor
    lines = ["n,lhs,rhs,ratio"] + [f"{r['n']},{r['lhs']!r},{r['rhs']!r},"
                                   f"{'' if r['ratio'] is None else repr(r['ratio'])}" for r in rows]
    return Outcome(ok, {"factor": factor, "count": len(rows)}, samples=rows, csv="\n".join(lines) + "\n")


RUNNERS = {
    "capacity": _run_capacity, "potential": _run_potential, "solve": _run_solve, "vss": _run_vss,
    "lowerbound": _run_lowerbound, "bilateral": _run_bilateral, "uplem": _run_uplem, "est5": _run_est5,
    "equivalence": _run_equivalence,
}


# ---------------------------------------------------------------------------
# output


def _clean(v):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, np.ndarray):
        return _clean(v.tolist())
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    return v


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _fixture_entry(cfg: ExperimentConfig):
    if cfg.fixture is None:
        return None
    entry = cfg.raw.get("fixture")
    return {"name": entry if isinstance(entry, str) else None, "set": cfg.fixture.to_dict()}


def execute(cfg: ExperimentConfig, seed: Optional[int] = None) -> tuple[int, dict, str]:
    """Run the experiment; returns ``(exit code, report, csv text)``."""
    report = {"id": cfg.experiment, "fixture": _fixture_entry(cfg), "config": cfg.raw,
              "params": cfg.params.to_dict(), "seed": seed}
    try:
        out = RUNNERS[cfg.experiment](cfg)
    except (NonConvergedError, QuadratureError) as exc:
        report.update({"status": "non-convergence", "passed": False, "error": str(exc),
                       "samples": [], "summary": {}, "budget": {}})
        return EXIT_NONCONVERGED, report, ""
    report.update({"status": "pass" if out.passed else "fail", "passed": out.passed, "samples": out.samples,
                   "summary": out.summary, "budget": out.budget, **out.extra})
    return (EXIT_PASS if out.passed else EXIT_FAIL), report, out.csv


def load_config(path: str) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from None
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return ExperimentConfig.from_dict(d)


def run(config_path: str, out: Optional[str] = None, jobs: Optional[int] = None,
        seed: Optional[int] = None) -> int:
    """Execute a config file, write ``<stem>.json`` and ``<stem>.csv``; return the exit code."""
    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if jobs is not None:
        cfg.jobs = jobs
    elif cfg.jobs is None:
        cfg.jobs = os.cpu_count() or 1
    target = os.environ.get("CAPWIENER_OUT") or out or cfg.output or "."
    try:
        code, report, csv_text = execute(cfg, seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    d = Path(target)
    d.mkdir(parents=True, exist_ok=True)
    stem = Path(config_path).stem
    (d / f"{stem}.json").write_text(dumps(report), encoding="utf-8")
    if csv_text:
        (d / f"{stem}.csv").write_text(csv_text, encoding="utf-8")
    print(f"{cfg.experiment}: {report['status']} -> {d / (stem + '.json')}")
    return code


# ---------------------------------------------------------------------------
# argument parsing


def _set_arg(text: str) -> CompactSet:
    if text in FIXTURES:
        return FIXTURES[text][0]
    p = Path(text)
    if not p.exists():
        raise ConfigError("set", f"{text!r} is neither a fixture name nor a file")
    try:
        return _resolve_set(json.loads(p.read_text(encoding="utf-8")), "set")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None


def _direct(args) -> int:
    """Shortcut subcommands: build a config in memory and print the result."""
    try:
        if args.command == "vss":
            raw = {"experiment": "vss", "params": {"N": args.N, "q": args.q}}
            cfg = ExperimentConfig.from_dict(raw)
        else:
            F = _set_arg(args.set)
            raw = {"experiment": args.command, "params": {"N": F.dim, "q": args.q}, "fixture": F.to_dict(),
                   "controls": {}}
            if getattr(args, "h", None) is not None:
                raw["controls"]["capacity"] = {"h": args.h}
            if args.command == "potential":
                raw["controls"].update({"x": args.x, "t": args.t})
            elif args.command == "lowerbound":
                raw["controls"].update({"x": args.x[0], "t": args.t})
            elif args.command == "solve":
                raw["controls"]["T"] = args.T
            cfg = ExperimentConfig.from_dict(raw)
        cfg.jobs = args.jobs or 1
        code, report, csv_text = execute(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "potential":
        sys.stdout.write(csv_text)
    else:
        sys.stdout.write(dumps({k: report[k] for k in ("status", "summary", "budget", "samples")
                                if report.get(k) not in (None, [], {})}))
    if getattr(args, "csv", None) and csv_text:
        Path(args.csv).write_text(csv_text, encoding="utf-8")
    return code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="capwiener", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment config")
    r.add_argument("--config", required=True)
    r.add_argument("--out", default=None, help="output directory (CAPWIENER_OUT overrides)")
    r.add_argument("--jobs", type=int, default=None)
    r.add_argument("--seed", type=int, default=None, help="only used by Monte-Carlo coverage checks")

    sub.add_parser("list-fixtures", help="print the built-in fixture catalog")

    def common(p, q_default=3.0):
        p.add_argument("set", help="fixture name or compact-set JSON file")
        p.add_argument("--q", type=float, default=q_default)
        p.add_argument("--jobs", type=int, default=1)

    c = sub.add_parser("capacity", help="capacity of a compact set")
    common(c)
    c.add_argument("--h", type=float, default=None)
    c.add_argument("--csv", default=None, help="write the capacitary measure atoms here")

    p = sub.add_parser("potential", help="per-term CSV of the capacitary potential")
    common(p)
    p.add_argument("--x", type=float, nargs="+", default=[0.0])
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--h", type=float, default=None)

    s = sub.add_parser("solve", help="maximal solution with infinite data on the set")
    common(s)
    s.add_argument("--T", type=float, default=0.5)
    s.add_argument("--csv", default=None)

    v = sub.add_parser("vss", help="self-similar profile by shooting")
    v.add_argument("--N", type=int, default=1)
    v.add_argument("--q", type=float, default=2.0)
    v.add_argument("--csv", default=None)
    v.add_argument("--jobs", type=int, default=1)

    lb = sub.add_parser("lowerbound", help="lower-bound chain at one point")
    common(lb)
    lb.add_argument("--x", type=float, nargs=1, default=[0.0])
    lb.add_argument("--t", type=float, default=1.0)
    lb.add_argument("--h", type=float, default=None)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return run(args.config, args.out, args.jobs, args.seed)
    if args.command == "list-fixtures":
        print(catalog_text())
        return EXIT_PASS
    return _direct(args)


if __name__ == "__main__":
    sys.exit(main())
