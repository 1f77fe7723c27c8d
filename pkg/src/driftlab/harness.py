"""Scenario orchestration: config parsing, runs, artifact emission, verdicts.

A scenario is a JSON document validated against ``SCENARIO_SCHEMA``.  Running
one produces, under its output directory: a JSON-lines step log, snapshot
files at the ladder times, a functionals CSV, one decay-report CSV per
(theorem, q), correction manifests, and a top-level ``manifest.json`` listing
every file with its content hash plus all measured verdicts.  Exit status is
0 when every verdict passes, 2 on verdict failure, 1 on execution errors.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import corrections as corr
from .functionals import (ACCUMULATOR_KINDS, DuhamelAccumulator,
                          functional_csv_header, functional_csv_row, lq_norm,
                          moments)
from .grid import GridSpec, SpectralField, read_snapshot, write_snapshot
from .kernels import KernelHandle, poisson_closed_form, poisson_periodized, sample_kernel
from .riesz import riesz_gradient, riesz_realspace_oracle, gaussian_drift_radial
from .solver import SolverConfig, StateTrajectory, checkpoint_state, gaussian_data, run
from .verifier import (ExpansionContext, decay_report, fit_decay,
                       order_separation, report_csv_lines, theorem_rate)


class ScenarioError(ValueError):
    pass


SCENARIO_SCHEMA = {
    "type": "object",
    "required": ["name", "equation", "grid"],
    "$defs": {
        "grid": {
            "type": "object",
            "required": ["n", "L", "N", "theta"],
            "properties": {
                "n": {"type": "integer", "minimum": 1, "maximum": 3},
                "L": {"type": "number", "exclusiveMinimum": 0},
                "N": {"type": "integer", "minimum": 8},
                "theta": {"type": "number", "exclusiveMinimum": 0, "maximum": 2},
            },
        },
    },
    "properties": {
        "name": {"type": "string"},
        "equation": {"enum": ["drift-diffusion", "burgers", "corrections"]},
        "grid": {"$ref": "#/$defs/grid"},
        "aux_grid": {"$ref": "#/$defs/grid"},
        "initial_data": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["gaussian"]},
                "amplitude": {"type": "number"},
                "width": {"type": "number", "exclusiveMinimum": 0},
                "axis_widths": {"type": "array", "items": {"type": "number"}},
                "center": {"type": "array", "items": {"type": "number"}},
                "cross": {"type": "number"},
            },
        },
        "solver": {
            "type": "object",
            "properties": {
                "dt0": {"type": "number", "exclusiveMinimum": 0},
                "t_end": {"type": "number", "exclusiveMinimum": 0},
                "stepper": {"enum": ["IF-RK2", "IF-Euler"]},
                "cfl_safety": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "dt_max": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "theorems": {"type": "array", "items": {
            "enum": ["thm1", "thm2", "thm3", "thm4", "ap", "burgers"]}},
        "ladder": {
            "type": "object",
            "required": ["t_min", "t_max", "points"],
            "properties": {
                "t_min": {"type": "number", "exclusiveMinimum": 0},
                "t_max": {"type": "number", "exclusiveMinimum": 0},
                "points": {"type": "integer", "minimum": 2},
            },
        },
        "qs": {"type": "array", "items": {"enum": [1, 2, "inf"]}},
        "accumulators": {"type": "array", "items": {"enum": list(ACCUMULATOR_KINDS)}},
        "checks": {"type": "array", "items": {"enum": [
            "scaling-J", "scaling-Jtilde", "scaling-J2", "scaling-J-burgers",
            "divergence-signature", "accumulator-log-divergence",
            "accumulator-tail", "burgers-log-necessity", "weighted-moment-bound",
            "vanishing-log"]}},
        "nodes": {"type": "object", "properties": {
            "first": {"type": "integer", "minimum": 4},
            "second": {"type": "integer", "minimum": 4},
            "s_min": {"type": "number", "exclusiveMinimum": 0}}},
        "seed": {"type": "integer"},
        "scaling_pairs": {"type": "array"},
        "output_dir": {"type": "string"},
    },
}


def validate_config(cfg: dict) -> None:
    import jsonschema
    try:
        jsonschema.validate(cfg, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as e:
        path = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ScenarioError(f"config field '{path}': {e.message}") from None


@dataclass
class Scenario:
    name: str
    equation: str
    grid: GridSpec
    aux_grid: GridSpec
    initial_data: dict
    theorems: list
    ladder: list
    qs: list
    accumulator_kinds: list
    checks: list
    solver: dict
    nodes: dict
    seed: int
    scaling_pairs: list

    @classmethod
    def from_config(cls, cfg: dict) -> "Scenario":
        validate_config(cfg)
        g = cfg["grid"]
        grid = GridSpec(n=g["n"], L=float(g["L"]), N=g["N"], theta=float(g["theta"]))
        ladder_cfg = cfg.get("ladder")
        ladder = []
        if ladder_cfg:
            ladder = [float(t) for t in
                      np.geomspace(ladder_cfg["t_min"], ladder_cfg["t_max"],
                                   ladder_cfg["points"])]
        theorems = cfg.get("theorems", [])
        for thm in theorems:
            from .verifier import _in_regime
            if not _in_regime(thm, grid.n, grid.theta):
                raise ScenarioError(
                    f"theorem target '{thm}' is incompatible with "
                    f"n = {grid.n}, theta = {grid.theta}")
        qs = [np.inf if q == "inf" else float(q) for q in cfg.get("qs", [1, 2, "inf"])]
        aux = cfg.get("aux_grid")
        aux_grid = (GridSpec(n=aux["n"], L=float(aux["L"]), N=aux["N"],
                             theta=float(aux["theta"])) if aux else grid)
        return cls(
            name=cfg["name"], equation=cfg["equation"], grid=grid, aux_grid=aux_grid,
            initial_data=cfg.get("initial_data", {"kind": "gaussian"}),
            theorems=theorems, ladder=ladder, qs=qs,
            accumulator_kinds=cfg.get("accumulators", []),
            checks=cfg.get("checks", []),
            solver=cfg.get("solver", {}),
            nodes=cfg.get("nodes", {"first": 20, "second": 14}),
            seed=cfg.get("seed", 0),
            scaling_pairs=cfg.get("scaling_pairs", [[1.0, 2.0]]),
        )

    def build_initial_data(self) -> SpectralField:
        p = dict(self.initial_data)
        if p.pop("kind", "gaussian") != "gaussian":
            raise ScenarioError("unknown initial data kind")
        return gaussian_data(self.grid, **p)


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _qlabel(q) -> str:
    return "inf" if q == np.inf else f"{q:g}"


class ScenarioRunner:
    def __init__(self, scenario: Scenario, output_dir: Path):
        self.sc = scenario
        self.out = Path(output_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.manifest = {"name": scenario.name, "verdicts": {}, "measured": {},
                         "files": {}, "policies": {"slope_tolerance": 0.15}}
        self.verdict_failures = []

    # -- helpers -----------------------------------------------------------

    def _aux_spec(self):
        return self.sc.aux_grid

    def _record(self, name: str, ok: bool, **measured):
        self.manifest["verdicts"][name] = "pass" if ok else "fail"
        if measured:
            self.manifest["measured"][name] = measured
        if not ok:
            self.verdict_failures.append(name)

    def _register_file(self, path: Path):
        self.manifest["files"][str(path.relative_to(self.out))] = _sha256(path)

    def _make_accumulators(self, M, m, kappa_pair=None):
        accs = {}
        for kind in self.sc.accumulator_kinds:
            extra = None
            if kind == "thm4_full":
                if kappa_pair is None:
                    raise ScenarioError("the thm4 coefficient accumulator needs "
                                        "the pair-moment matrix (aux grid)")
                M3 = M ** 3

                def extra(s, kappa=kappa_pair, M3=M3):
                    return M3 * kappa / (1.0 + s)

            accs[kind] = DuhamelAccumulator(kind, self.sc.grid, self.sc.grid.theta,
                                            M=M, m=m, extra_moment_fn=extra)
        return accs

    # -- main entry ---------------------------------------------------------

    def execute(self, resume: bool = False) -> int:
        sc = self.sc
        if sc.equation == "corrections":
            self._run_checks(None, None, None)
            self._finish()
            return 2 if self.verdict_failures else 0

        u0 = sc.build_initial_data()
        rec0 = moments(u0, t=0.0)
        kappa_pair = kappa_pp = None
        aux = self._aux_spec()
        if "thm4" in sc.theorems or "thm4_full" in sc.accumulator_kinds:
            prov = corr.JProvider(aux, s_ref=1.0, nodes_first=sc.nodes["first"],
                                  nodes_second=sc.nodes["second"])
            kappa_pair = corr.unit_pair_moments(aux, prov)
            self.manifest["measured"]["kappa_pair_diag"] = [
                float(kappa_pair[b + 1, b]) for b in range(sc.grid.n)]
        if "thm3" in sc.theorems:
            kappa_pp = corr.unit_interaction_moments(aux)
            self.manifest["measured"]["kappa_pp_diag"] = [
                float(kappa_pp[b + 1, b]) for b in range(sc.grid.n)]
        accs = self._make_accumulators(rec0.M, rec0.m, kappa_pair=kappa_pair)

        solver_cfg = SolverConfig(
            spec=sc.grid,
            dt0=sc.solver.get("dt0", 0.02),
            t_end=sc.solver.get("t_end", sc.ladder[-1] if sc.ladder else 10.0),
            stepper=sc.solver.get("stepper", "IF-RK2"),
            cfl_safety=sc.solver.get("cfl_safety", 0.8),
            dt_max=sc.solver.get("dt_max", 0.5),
            snapshot_times=tuple(sc.ladder),
            accumulators=list(accs.values()),
            equation=sc.equation if sc.equation != "corrections" else "drift-diffusion",
            keep_log=True,
        )

        log_path = self.out / "run_log.jsonl"
        resume_state, done_snapshots = None, []
        if resume:
            resume_state, done_snapshots = self._load_checkpoint(accs)
        mode = "a" if resume_state else "w"
        with open(log_path, mode) as log_fh:
            def writer(entry):
                log_fh.write(json.dumps(entry) + "\n")

            traj = run(solver_cfg, u0, log_writer=writer, resume=resume_state)

        times = [t for t, _ in done_snapshots] + traj.times
        fields = [f for _, f in done_snapshots] + traj.fields
        self._register_file(log_path)
        self._emit_snapshots(times, fields, accs)
        self._emit_functionals(times, fields, accs)
        self._check_mass(log_path, rec0.M)

        ctxs = {}
        for thm in sc.theorems:
            ctx = ExpansionContext(thm, sc.grid, rec0, accs=accs,
                                   nodes_first=sc.nodes["first"],
                                   nodes_second=sc.nodes["second"],
                                   s_min=sc.nodes.get("s_min"),
                                   kappa_pair=kappa_pair, kappa_pp=kappa_pp,
                                   aux_spec=aux)
            ctxs[thm] = ctx
            self._emit_decay_reports(ctx, times, fields)

        self._run_checks(times, fields, ctxs, accs=accs, rec0=rec0)
        self._finish()
        return 2 if self.verdict_failures else 0

    # -- emission ------------------------------------------------------------

    def _emit_snapshots(self, times, fields, accs):
        snap_dir = self.out / "snapshots"
        snap_dir.mkdir(exist_ok=True)
        for idx, (t, f) in enumerate(zip(times, fields)):
            path = snap_dir / f"snap_{idx:03d}.bin"
            write_snapshot(path, f, time=t)
            self._register_file(path)
            ck = snap_dir / f"checkpoint_{idx:03d}.json"
            with open(ck, "w") as fh:
                json.dump({"t": t, "snapshot": path.name,
                           "accumulators": [a.state() for a in accs.values()],
                           "kinds": list(accs.keys())}, fh)
            self._register_file(ck)

    def _load_checkpoint(self, accs):
        snap_dir = self.out / "snapshots"
        if not snap_dir.exists():
            return None, []
        cks = sorted(snap_dir.glob("checkpoint_*.json"))
        if not cks:
            return None, []
        with open(cks[-1]) as fh:
            ck = json.load(fh)
        done = []
        for path in sorted(snap_dir.glob("snap_*.bin")):
            f, t = read_snapshot(path)
            if t <= ck["t"] + 1e-12:
                done.append((t, f))
        state = {"t": ck["t"], "uhat": done[-1][1].coeffs,
                 "accumulators": ck["accumulators"]}
        return state, done

    def _emit_functionals(self, times, fields, accs):
        path = self.out / "functionals.csv"
        acc_list = list(accs.values())
        with open(path, "w") as fh:
            fh.write(functional_csv_header(self.sc.grid, list(accs.keys())) + "\n")
            for t, f in zip(times, fields):
                rec = moments(f, t=t)
                norms = {1: lq_norm(f, 1), 2: lq_norm(f, 2), "inf": lq_norm(f, np.inf)}
                fh.write(functional_csv_row(t, rec, norms, acc_list) + "\n")
                # interpolation inequality must hold on every stored snapshot
                if norms[2] ** 2 > norms[1] * norms["inf"] * (1 + 1e-10):
                    self._record(f"lq_interpolation_t{t:g}", False)
        self._register_file(path)

    def _check_mass(self, log_path, M0):
        worst = 0.0
        with open(log_path) as fh:
            for line in fh:
                entry = json.loads(line)
                if M0 != 0:
                    worst = max(worst, abs(entry["mass"] - M0) / abs(M0))
        self._record("mass_invariance", worst < 1e-8, worst_relative_drift=worst)

    def _emit_decay_reports(self, ctx, times, fields):
        for q in self.sc.qs:
            rep = decay_report(ctx, times, fields, q)
            path = self.out / f"decay_{ctx.theorem}_q{_qlabel(q)}.csv"
            with open(path, "w") as fh:
                fh.write("\n".join(report_csv_lines(rep)) + "\n")
            self._register_file(path)
            self._record(f"{ctx.theorem}_slope_q{_qlabel(q)}", rep.slope_ok,
                         fitted=rep.fitted_slope, theoretical=rep.theoretical_slope,
                         stderr=rep.fit_stderr)
        # order separation at q = 1: the last block must carry its own decay
        sep = order_separation(ctx, times, fields, 1)
        self._record(f"{ctx.theorem}_order_separation", sep["gap"] >= 0.3,
                     full_slope=sep["full_slope"], partial_slope=sep["partial_slope"],
                     gap=sep["gap"])

    # -- named checks ----------------------------------------------------------

    def _run_checks(self, times, fields, ctxs, accs=None, rec0=None):
        sc = self.sc
        for check in sc.checks:
            if check == "scaling-J":
                self._scaling_check("J", corr.build_J,
                                    lambda t1, t2: (t2 / t1) ** (-(2 - sc.grid.theta) / sc.grid.theta))
            elif check == "scaling-Jtilde":
                self._scaling_check("Jtilde",
                                    lambda spec, t, **kw: corr.build_Jtilde_Ktilde(spec, t, **kw)[0],
                                    lambda t1, t2: (t2 / t1) ** -2.0)
            elif check == "scaling-J2":
                prov = corr.JProvider(sc.grid, s_ref=max(max(p) for p in sc.scaling_pairs),
                                      nodes_first=sc.nodes["first"],
                                      nodes_second=sc.nodes["second"])
                self._scaling_check("J2",
                                    lambda spec, t, **kw: corr.build_J2_K(
                                        spec, t, 1.0, np.full(spec.n, 0.3),
                                        j_provider=prov,
                                        **{k: v for k, v in kw.items() if k != "s_min"})[0],
                                    lambda t1, t2: (t2 / t1) ** -2.0)
            elif check == "scaling-J-burgers":
                self._scaling_check("J_burgers", corr.build_J_burgers,
                                    lambda t1, t2: (t2 / t1) ** -1.0)
            elif check == "divergence-signature":
                self._divergence_signature()
            elif check == "vanishing-log":
                self._vanishing_log()
            elif check == "accumulator-log-divergence":
                self._acc_log_divergence(accs)
            elif check == "accumulator-tail":
                self._acc_tail(accs)
            elif check == "burgers-log-necessity":
                self._burgers_log_necessity(ctxs, times, fields)
            elif check == "weighted-moment-bound":
                self._weighted_moment_bound(times, fields)

    def _scaling_check(self, label, builder, predicted_fn):
        sc = self.sc
        s_min = sc.nodes.get("s_min")
        for t1, t2 in sc.scaling_pairs:
            x1 = builder(sc.grid, float(t1), nodes_first=sc.nodes["first"],
                         nodes_second=sc.nodes["second"], s_min=s_min)
            x2 = builder(sc.grid, float(t2), nodes_first=sc.nodes["first"],
                         nodes_second=sc.nodes["second"], s_min=s_min)
            lam0 = 0.95 * sc.grid.L / max(t1, t2) ** (1.0 / sc.grid.theta)
            n1 = corr.windowed_lq(x1, 1, lam0 * t1 ** (1.0 / sc.grid.theta))
            n2 = corr.windowed_lq(x2, 1, lam0 * t2 ** (1.0 / sc.grid.theta))
            measured = n2 / n1
            predicted = predicted_fn(t1, t2)
            ok = abs(measured - predicted) / predicted < 0.02
            self._record(f"scaling_{label}_{t1:g}_{t2:g}", ok,
                         measured=measured, predicted=predicted)
            man = self.out / f"scaling_{label}_{t1:g}_{t2:g}.json"
            with open(man, "w") as fh:
                json.dump({"target": label, "t_pair": [t1, t2],
                           "nodes": self.sc.nodes, "window_lambda0": lam0,
                           "measured_ratio": measured, "predicted_ratio": predicted},
                          fh, indent=1)
            self._register_file(man)

    def _divergence_signature(self):
        out = corr.jtilde_cutoff_study(self.sc.grid, 1.0)
        ss = sorted(out)
        slope = float(np.polyfit(np.log(ss), [math.log(out[s][0]) for s in ss], 1)[0])
        brackets = [out[s][1] for s in ss]
        spread = (max(brackets) - min(brackets)) / min(brackets)
        ok = abs(slope + 1.0) <= 0.15 and spread < 0.10
        self._record("divergence_signature", ok, naive_slope=slope,
                     bracket_spread=spread,
                     table={f"{s:g}": list(v) for s, v in out.items()})

    def _vanishing_log(self):
        spec = self.sc.grid
        from .corrections import _Engine
        engine = _Engine(spec, spec.theta)
        p = engine.kernel(1.0)
        grads = riesz_gradient(p)
        vals = [p.values * g.values for g in grads]
        from .functionals import moment_matrix_from_values
        mom = moment_matrix_from_values(spec, vals)
        l1 = sum(float(np.sum(np.abs(v)) * spec.cell_volume) for v in vals)
        ratio = float(np.max(np.abs(mom[0]))) / l1
        self._record("vanishing_log", ratio < 1e-8, mass_over_l1=ratio)

    def _acc_log_divergence(self, accs):
        acc = accs.get("uu_mmpp")
        if acc is None:
            self._record("accumulator_log_divergence", False, reason="missing kind")
            return
        # the |y|-weighted absolute partial integrals grow like log t: the
        # derivative against log(1+s) is constant once transients die and
        # before the box truncates the weighted tails (s <~ L/5)
        ss, integ = acc.abs_partial_integrals()
        xs = np.log1p(ss)
        mid, hi = 30.0, min(90.0, self.sc.grid.L / 5.0)
        sel_a = (ss >= 10.0) & (ss <= mid)
        sel_b = (ss >= mid) & (ss <= hi)
        if sel_a.sum() < 3 or sel_b.sum() < 3:
            self._record("accumulator_log_divergence", False, reason="series too short")
            return
        s1 = float(np.polyfit(xs[sel_a], integ[sel_a], 1)[0])
        s2 = float(np.polyfit(xs[sel_b], integ[sel_b], 1)[0])
        ok = s2 > 0 and abs(s2 - s1) / abs(s2) < 0.2
        self._record("accumulator_log_divergence", ok,
                     early_log_slope=s1, late_log_slope=s2)

    def _acc_tail(self, accs):
        theta = self.sc.grid.theta
        n = self.sc.grid.n
        expected_p = (n - 2.0) / theta
        for kind, acc in accs.items():
            if kind != "uu":
                continue
            fit = acc.tail_fit()
            if fit is None:
                self._record("accumulator_tail", False, reason="insufficient history")
                return
            amp, p = fit
            ok = abs(p - expected_p) / expected_p < 0.25 and not acc.diverging
            self._record("accumulator_tail", ok, fitted_exponent=p,
                         expected_exponent=expected_p,
                         tail_estimate=acc.tail_estimate)

    def _burgers_log_necessity(self, ctxs, times, fields):
        ctx = ctxs.get("burgers")
        if ctx is None:
            self._record("burgers_log_necessity", False, reason="no burgers context")
            return
        full = decay_report(ctx, times, fields, 1)
        nolog = decay_report(ctx, times, fields, 1, exclude=("burgers_log",))
        path = self.out / "decay_burgers_nolog_q1.csv"
        with open(path, "w") as fh:
            fh.write("\n".join(report_csv_lines(nolog)) + "\n")
        self._register_file(path)
        ok = full.fitted_slope < nolog.fitted_slope - 1e-3
        self._record("burgers_log_necessity", ok,
                     slope_with_log=full.fitted_slope,
                     slope_without_log=nolog.fitted_slope)

    def _weighted_moment_bound(self, times, fields):
        # ||x_j u(t)||_{n/(n-1)} / log(e+t) stays bounded: no growth trend
        ratios = []
        for t, f in zip(times, fields):
            rec = moments(f, t=t)
            ratios.append(float(np.max(rec.weighted_norm)) / math.log(math.e + t))
        first, last = np.mean(ratios[:2]), np.mean(ratios[-2:])
        ok = last <= first * 1.5
        self._record("weighted_moment_bound", ok, ratios=ratios)

    def _finish(self):
        path = self.out / "manifest.json"
        with open(path, "w") as fh:
            json.dump(self.manifest, fh, indent=1, sort_keys=True)


def run_scenario(config_path, output_dir=None, resume: bool = False) -> int:
    """Execute a scenario config; returns the process exit status."""
    try:
        with open(config_path) as fh:
            cfg = json.load(fh)
        sc = Scenario.from_config(cfg)
        out = Path(output_dir or cfg.get("output_dir") or f"out_{sc.name}")
        runner = ScenarioRunner(sc, out)
        return runner.execute(resume=resume)
    except (ScenarioError, ValueError, OSError) as e:
        print(f"error: {e}")
        return 1


def bundled_scenario_path(name: str) -> Path:
    here = Path(__file__).parent / "scenarios"
    path = here / f"{name}.json"
    if not path.exists():
        available = sorted(p.stem for p in here.glob("*.json"))
        raise ScenarioError(f"no bundled scenario '{name}'; available: {available}")
    return path


def list_bundled_scenarios():
    here = Path(__file__).parent / "scenarios"
    return sorted(p.stem for p in here.glob("*.json"))


# ---------------------------------------------------------------------------
# selftest: the fast invariant sweep

def selftest(printer=print) -> dict:
    """Fast invariant suite; returns {check: bool} and prints a line per check."""
    results = {}

    def check(name, ok):
        results[name] = bool(ok)
        printer(f"{'PASS' if ok else 'FAIL'}  {name}")

    # kernel closed forms
    spec = GridSpec(n=2, L=30.0, N=256, theta=2.0)
    g = sample_kernel(KernelHandle(spec=spec, t=1.0))
    check("heat kernel origin value", abs(g.values[0, 0] - 1 / (4 * math.pi)) < 1e-6)
    spec = GridSpec(n=2, L=30.0, N=512, theta=1.0)
    g = sample_kernel(KernelHandle(spec=spec, t=1.0))
    check("poisson kernel origin value", abs(g.values[0, 0] - 1 / (2 * math.pi)) < 1e-4)
    check("kernel unit mass", abs(g.mass - 1.0) < 1e-12)
    pts = np.array([[0.0, 0.0], [5.0, 2.0], [12.0, 0.0]])
    per = poisson_periodized(2, 30.0, 1.0, pts)
    idx = [(0, 0), (int(5 / spec.h), int(2 / spec.h)), (int(12 / spec.h), 0)]
    lattice_pts = np.array([[i * spec.h, j * spec.h] for i, j in idx])
    per = poisson_periodized(2, 30.0, 1.0, lattice_pts)
    vals = np.array([g.values[i, j] for i, j in idx])
    check("theta=1 kernel vs periodized closed form",
          float(np.max(np.abs(vals - per) / np.abs(per))) < 1e-6)

    # Parseval
    rng = np.random.default_rng(0)
    f = SpectralField.from_values(spec, rng.standard_normal(spec.shape))
    phys = float(np.sum(f.values ** 2) * spec.cell_volume)
    w = np.full(spec.spectral_shape, 2.0)
    w[..., 0] = 1.0
    w[..., -1] = 1.0
    spect = float(np.sum(w * np.abs(f.coeffs) ** 2) / (2 * spec.L) ** 2)
    check("parseval identity", abs(phys - spect) / phys < 1e-10)

    # derivative kernels have zero mean
    gd = sample_kernel(KernelHandle(spec=spec, t=1.0, alpha=(1, 0)))
    check("derivative kernel zero mean", abs(gd.mass) < 1e-12)

    # riesz radial oracle, n = 3, N = 48
    spec3 = GridSpec(n=3, L=8.0, N=48, theta=1.0)
    r2 = spec3.radius_array() ** 2
    u = SpectralField.from_values(spec3, (4 * math.pi) ** -1.5 * np.exp(-r2 / 4))
    grads = riesz_gradient(u)
    i = int(round(2.0 / spec3.h))
    got = abs(grads[0].values[i, 0, 0])
    expect = gaussian_drift_radial(3, i * spec3.h, width=2.0)
    check("riesz gradient radial oracle", abs(got - expect) / expect < 3e-2)

    # coarse scaling identity for the planar correction
    spec2 = GridSpec(n=2, L=15.0, N=256, theta=1.0)
    j2 = corr.build_J(spec2, 2.0, nodes_first=12, nodes_second=8)
    j4 = corr.build_J(spec2, 4.0, nodes_first=12, nodes_second=8)
    lam0 = 0.9 * spec2.L / 4.0
    ratio = corr.windowed_lq(j4, 1, 4 * lam0) / corr.windowed_lq(j2, 1, 2 * lam0)
    check("correction time-scaling ratio", abs(ratio - 0.5) / 0.5 < 5e-2)

    # vanishing log coefficient
    from .corrections import _Engine
    from .functionals import moment_matrix_from_values
    engine = _Engine(spec2, 1.0)
    p = engine.kernel(1.0)
    vals = [p.values * gj.values for gj in riesz_gradient(p)]
    mom = moment_matrix_from_values(spec2, vals)
    l1 = sum(float(np.sum(np.abs(v)) * spec2.cell_volume) for v in vals)
    check("vanishing log coefficient", float(np.max(np.abs(mom[0]))) / l1 < 1e-8)

    # fault injection: a 1% kernel-normalization error must break mass
    bad = SpectralField.from_coeffs(spec, 1.01 * sample_kernel(
        KernelHandle(spec=spec, t=1.0)).coeffs)
    check("fault injection caught by mass invariant", abs(bad.mass - 1.0) > 1e-8)

    return results
