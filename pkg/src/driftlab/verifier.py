"""Expansion assembly, residual decay fits, and rate verdicts.

Each regime's expansion is a sum of kernel-derivative terms weighted by data
moments plus the regime's correction fields; the remainder statements are
checked as fitted log-log slope inequalities against the theoretical rates
(little-o carries no constants, so slopes are the falsifiable content).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .corrections import (JProvider, build_J, build_J2_K, build_J_burgers,
                          build_Jtilde_Ktilde, log_companion_field,
                          unit_interaction_moments, unit_pair_moments)
from .functionals import MomentRecord, lq_norm, second_moment_coefficient
from .grid import GridSpec, SpectralField
from .kernels import KernelHandle, sample_kernel


class VerifierError(ValueError):
    pass


SLOPE_TOLERANCE = 0.15  # absorbs log factors and finite-time transients


THEOREM_REGIMES = {
    "thm1": "three dimensions with theta < 1",
    "thm2": "two dimensions with theta < 1",
    "thm3": "three dimensions at theta = 1",
    "thm4": "two dimensions at theta = 1",
    "ap": "any supported dimension with theta <= 1",
    "burgers": "the line at theta = 1",
}


def _in_regime(theorem: str, n: int, theta: float) -> bool:
    return {
        "thm1": n == 3 and 0 < theta < 1,
        "thm2": n == 2 and 0 < theta < 1,
        "thm3": n == 3 and theta == 1.0,
        "thm4": n == 2 and theta == 1.0,
        "ap": n >= 2 and 0 < theta <= 1.0,
        "burgers": n == 1 and theta == 1.0,
    }.get(theorem, False)


def governing_theorem(n: int, theta: float) -> str:
    for name in ("thm1", "thm2", "thm3", "thm4", "burgers"):
        if _in_regime(name, n, theta):
            return name
    raise VerifierError(f"no expansion regime covers n = {n}, theta = {theta}")


def theorem_rate(theorem: str, n: int, theta: float, q: float) -> float:
    """Remainder decay exponent of the named expansion."""
    if not _in_regime(theorem, n, theta):
        raise VerifierError(
            f"'{theorem}' governs {THEOREM_REGIMES.get(theorem, '?')}, "
            f"not n = {n}, theta = {theta}")
    one = 0.0 if q == np.inf else 1.0 / q
    if theorem == "thm1":
        return -(n / theta) * (1 - one) - 2.0 / theta
    if theorem == "thm2":
        return -(2 / theta) * (1 - one) - 2.0 / theta
    if theorem == "thm3":
        return -3.0 * (1 - one) - 2.0
    if theorem == "thm4":
        return -2.0 * (1 - one) - 2.0
    if theorem == "ap":
        return -(n / theta) * (1 - one) - 1.0 / theta
    if theorem == "burgers":
        return -(1 - one) - 1.0
    raise VerifierError(theorem)


def rate_table(n: int, theta: float, q: float) -> float:
    """Remainder exponent of the regime governing (n, theta)."""
    return theorem_rate(governing_theorem(n, theta), n, theta, q)


def fit_decay(times, norms):
    """Least-squares slope of log norm against log time.

    Returns (slope, stderr); stderr is the residual standard error of the
    slope estimate.
    """
    times = np.asarray(times, dtype=float)
    norms = np.asarray(norms, dtype=float)
    if times.size < 5:
        raise VerifierError("need at least 5 ladder points for a slope fit")
    if np.any(norms <= 0):
        raise VerifierError("norms must be positive for a log-log fit")
    x = np.log(times)
    y = np.log(norms)
    A = np.vstack([x, np.ones_like(x)]).T
    coef, res, *_ = np.linalg.lstsq(A, y, rcond=None)
    dof = max(x.size - 2, 1)
    ssr = float(res[0]) if res.size else float(np.sum((y - A @ coef) ** 2))
    sxx = float(np.sum((x - x.mean()) ** 2))
    stderr = math.sqrt(ssr / dof / sxx)
    return float(coef[0]), stderr


@dataclass
class ExpansionTerm:
    label: str
    field_at: object  # callable t -> SpectralField


@dataclass
class DecayReport:
    theorem: str
    q: float
    times: list
    residual_norms: list
    fitted_slope: float
    fit_stderr: float
    theoretical_slope: float
    slope_ok: bool
    monotone: bool

    @property
    def verdict(self) -> str:
        return "pass" if (self.slope_ok and self.monotone) else "fail"


def _alphas(n: int):
    out = []
    for i in range(n):
        for j in range(i, n):
            a = [0] * n
            a[i] += 1
            a[j] += 1
            out.append(tuple(a))
    return out


class ExpansionContext:
    """Builds and caches a regime's expansion term fields.

    moments   MomentRecord of the initial data
    accs      dict kind -> DuhamelAccumulator advanced by the run
    """

    def __init__(self, theorem: str, spec: GridSpec, moments: MomentRecord,
                 accs=None, nodes_first=20, nodes_second=14, s_min=None,
                 kappa_pair=None, kappa_pp=None, aux_spec=None):
        if not _in_regime(theorem, spec.n, spec.theta):
            raise VerifierError(
                f"'{theorem}' governs {THEOREM_REGIMES.get(theorem, '?')}, "
                f"not n = {spec.n}, theta = {spec.theta}")
        self.theorem = theorem
        self.spec = spec
        self.moments = moments
        self.accs = accs or {}
        self.nodes_first = nodes_first
        self.nodes_second = nodes_second
        self.s_min = s_min
        # coefficient matrices of the log companions; measured on an auxiliary
        # resolved grid when the run grid cannot hold the unit-time kernels
        self.aux_spec = aux_spec
        self._kappa_pair = kappa_pair
        self._kappa_pp = kappa_pp
        self._providers = {}
        self._field_cache = {}
        self._check_coefficients()

    # -- coefficient sources ------------------------------------------------

    def _check_coefficients(self):
        kind = self._acc_kind()
        if kind is None:
            return
        if kind not in self.accs:
            raise VerifierError(
                f"'{self.theorem}' needs the '{kind}' coefficient accumulator")
        acc = self.accs[kind]
        if acc.expected_divergence:
            raise VerifierError(
                f"the '{kind}' coefficient block diverges in this regime; "
                "the expansion requires the corresponding correction term")

    def _acc_kind(self):
        return {
            "thm1": "uu",
            "thm2": "uu_mmgg",
            "thm3": "uu_mmpp_shift",
            "thm4": "thm4_full",
            "burgers": "burgers_sq",
            "ap": None,
        }[self.theorem]

    def coefficient_matrix(self) -> np.ndarray:
        acc = self.accs[self._acc_kind()]
        return acc.coefficient_matrix(with_tail=True)

    # -- term fields ----------------------------------------------------------

    def _kernel(self, t, alpha=(), m=0):
        return sample_kernel(KernelHandle(spec=self.spec, t=t, alpha=alpha, m=m))

    def _provider_at(self, t):
        """Per-time provider: the reference is built directly at t and all
        earlier quadrature nodes are served by exact self-similar resampling."""
        key = float(t)
        if key not in self._providers:
            self._providers[key] = JProvider(self.spec, s_ref=t,
                                             nodes_first=self.nodes_first,
                                             nodes_second=self.nodes_second,
                                             s_min=self.s_min)
        return self._providers[key]

    def kappa_pair(self):
        if self._kappa_pair is None:
            spec = self.aux_spec or self.spec
            prov = JProvider(spec, s_ref=1.0, nodes_first=self.nodes_first,
                             nodes_second=self.nodes_second)
            self._kappa_pair = unit_pair_moments(spec, prov)
        return self._kappa_pair

    def kappa_pp(self):
        if self._kappa_pp is None:
            self._kappa_pp = unit_interaction_moments(self.aux_spec or self.spec)
        return self._kappa_pp

    def terms(self):
        spec, rec = self.spec, self.moments
        M = rec.M
        out = [ExpansionTerm("MG", lambda t: M * self._kernel(t))]
        if self.theorem == "ap":
            return out
        if self.theorem == "burgers":
            Mw, mw = M, rec.m[0]
            out.append(ExpansionTerm("burgers_log", lambda t: (
                (-Mw ** 2 / (4 * math.pi)) * math.log1p(0.5 * t)
                * self._kernel(t, alpha=(1,)))))
            if Mw == 0.0:
                out.append(ExpansionTerm("M2Jw", lambda t: SpectralField.zeros(spec)))
            else:
                out.append(ExpansionTerm("M2Jw", lambda t: Mw ** 2 * build_J_burgers(
                    spec, t, nodes_first=self.nodes_first, nodes_second=self.nodes_second,
                    s_min=self.s_min)))

            def drift_term(t):
                c = self.accs["burgers_sq"].coefficient_matrix(with_tail=True)[0, 0] \
                    if "burgers_sq" in self.accs else 0.0
                return (mw - 0.5 * c) * self._kernel(t, alpha=(1,))

            out.append(ExpansionTerm("drift_moment", drift_term))
            return out

        def m_grad(t):
            acc = SpectralField.zeros(spec)
            for j in range(spec.n):
                if rec.m[j] != 0.0:
                    a = [0] * spec.n
                    a[j] = 1
                    acc = acc + rec.m[j] * self._kernel(t, alpha=tuple(a))
            return acc

        out.append(ExpansionTerm("m_gradG", m_grad))

        def scaled(factor, builder):
            if factor == 0.0:
                return lambda t: SpectralField.zeros(spec)
            return lambda t: factor * builder(t)

        if self.theorem == "thm2":
            out.append(ExpansionTerm("M2J", scaled(M ** 2, lambda t: build_J(
                spec, t, nodes_first=self.nodes_first, nodes_second=self.nodes_second,
                s_min=self.s_min))))
        if self.theorem == "thm3":
            out.append(ExpansionTerm("M2Ktilde", scaled(M ** 2, lambda t:
                                     log_companion_field(spec, t, self.kappa_pp()))))
            out.append(ExpansionTerm("M2Jtilde", scaled(M ** 2, lambda t: build_Jtilde_Ktilde(
                spec, t, nodes_first=self.nodes_first,
                nodes_second=self.nodes_second, s_min=self.s_min)[0])))
        if self.theorem == "thm4":
            out.append(ExpansionTerm("M2J", scaled(M ** 2, lambda t: self._provider_at(t).reference)))
            out.append(ExpansionTerm("M3K", scaled(M ** 3, lambda t: log_companion_field(
                spec, t, self.kappa_pair()))))
            if M == 0.0:
                out.append(ExpansionTerm("J2", lambda t: SpectralField.zeros(spec)))
            else:
                out.append(ExpansionTerm("J2", lambda t: build_J2_K(
                    spec, t, M, rec.m, j_provider=self._provider_at(t),
                    nodes_first=self.nodes_first, nodes_second=self.nodes_second,
                    s_min=self.s_min)[0]))

        def second_block(t):
            acc = SpectralField.zeros(spec)
            for alpha in _alphas(spec.n):
                coeff = second_moment_coefficient(rec, alpha)
                fact = 2.0 if max(alpha) == 2 else 1.0
                if coeff != 0.0:
                    acc = acc + (coeff / fact) * self._kernel(t, alpha=alpha)
            return acc

        out.append(ExpansionTerm("second_moments", second_block))

        def nonlinear_block(t):
            C = self.coefficient_matrix()
            acc = SpectralField.zeros(spec)
            for b in range(spec.n):
                for j in range(spec.n):
                    if C[b, j] != 0.0:
                        a = [0] * spec.n
                        a[b] += 1
                        a[j] += 1
                        acc = acc + C[b, j] * self._kernel(t, alpha=tuple(a))
            return acc

        out.append(ExpansionTerm("nonlinear_moments", nonlinear_block))
        return out

    def order_groups(self):
        """Term labels grouped by asymptotic order; the last group is the
        final (t^{-2/theta}-rate) block of the expansion."""
        return {
            "ap": [["MG"]],
            "thm1": [["MG"], ["m_gradG"], ["second_moments", "nonlinear_moments"]],
            "thm2": [["MG"], ["m_gradG"], ["M2J"],
                     ["second_moments", "nonlinear_moments"]],
            "thm3": [["MG"], ["m_gradG"],
                     ["M2Ktilde", "M2Jtilde", "second_moments", "nonlinear_moments"]],
            "thm4": [["MG"], ["m_gradG"], ["M2J"],
                     ["M3K", "J2", "second_moments", "nonlinear_moments"]],
            "burgers": [["MG"], ["burgers_log", "M2Jw", "drift_moment"]],
        }[self.theorem]

    def field(self, t: float, drop_last: int = 0, exclude=()) -> SpectralField:
        """Expansion field; ``drop_last`` removes trailing order groups and
        ``exclude`` removes individual labels."""
        terms = self.terms()
        skip = set(exclude)
        if drop_last:
            for group in self.order_groups()[-drop_last:]:
                skip.update(group)
        total = SpectralField.zeros(self.spec)
        for term in terms:
            if term.label in skip:
                continue
            key = (term.label, float(t))
            if key not in self._field_cache:
                self._field_cache[key] = term.field_at(t)
            total = total + self._field_cache[key]
        return total


def assemble_expansion(theorem: str, t: float, spec: GridSpec,
                       moments: MomentRecord, accs=None, **kw) -> SpectralField:
    return ExpansionContext(theorem, spec, moments, accs=accs, **kw).field(t)


def decay_report(ctx: ExpansionContext, times, fields, q,
                 drop_last: int = 0, exclude=()) -> DecayReport:
    """Residual ladder and slope verdict for one exponent q."""
    norms = []
    for t, u in zip(times, fields):
        resid = u - ctx.field(t, drop_last=drop_last, exclude=exclude)
        norms.append(lq_norm(resid, q))
    slope, err = fit_decay(times, norms)
    theo = theorem_rate(ctx.theorem, ctx.spec.n, ctx.spec.theta, q)
    monotone = all(b <= a * (1 + 1e-9) for a, b in zip(norms, norms[1:]))
    return DecayReport(theorem=ctx.theorem, q=q, times=list(times),
                       residual_norms=norms, fitted_slope=slope, fit_stderr=err,
                       theoretical_slope=theo,
                       slope_ok=slope <= theo + SLOPE_TOLERANCE,
                       monotone=monotone)


def order_separation(ctx: ExpansionContext, times, fields, q) -> dict:
    """Fitted-slope gap between the full expansion and the one missing its
    last order block; a positive gap certifies the block carries real decay."""
    full = decay_report(ctx, times, fields, q)
    partial = decay_report(ctx, times, fields, q, drop_last=1)
    return {
        "full_slope": full.fitted_slope,
        "partial_slope": partial.fitted_slope,
        "gap": partial.fitted_slope - full.fitted_slope,
        "full": full,
        "partial": partial,
    }


def report_csv_lines(report: DecayReport) -> list:
    q_label = "inf" if report.q == np.inf else f"{report.q:g}"
    lines = ["theorem,q,t,residual,fitted_slope,theoretical_slope,verdict"]
    for t, r in zip(report.times, report.residual_norms):
        lines.append(
            f"{report.theorem},{q_label},{t:.12e},{r:.12e},"
            f"{report.fitted_slope:.12e},{report.theoretical_slope:.12e},"
            f"{report.verdict}")
    return lines
