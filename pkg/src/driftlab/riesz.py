"""Drift field of the elliptic coupling: grad (-Delta)^{-1} u on the torus.

The zero mode of the output is pinned to zero, which is the unique periodic
solution with a neutralizing uniform background charge; the omitted field is
spatially constant and vanishes in the infinite-box limit.  A direct real-space
quadrature oracle over the free-space kernel is provided for cross-validation
on small grids.
"""

from __future__ import annotations

import math

import numpy as np

from .grid import GridSpec, SpectralField, riesz_multiplier, derivative_multiplier, apply_multiplier


class RieszError(ValueError):
    pass


def riesz_constant(n: int) -> float:
    """Prefactor of the free-space kernel (x-y)/|x-y|^n."""
    return math.gamma(n / 2.0) / (2.0 * math.pi ** (n / 2.0))


def riesz_gradient(u: SpectralField) -> list:
    """Components of grad psi where -Delta psi = u - mean(u).

    Each component j has coefficients (i xi_j / |xi|^2) u_hat(xi), zero at
    xi = 0, hence zero grid mean.
    """
    if u.spec.n < 2:
        raise RieszError("the 1-D problem has no elliptic coupling")
    return [apply_multiplier(u, riesz_multiplier(ax)) for ax in range(u.spec.n)]


def divergence(fields: list) -> SpectralField:
    spec = fields[0].spec
    out = np.zeros(spec.spectral_shape, dtype=np.complex128)
    for ax, f in enumerate(fields):
        out = out + apply_multiplier(f, derivative_multiplier(ax)).coeffs
    return SpectralField.from_coeffs(spec, out)


def riesz_realspace_oracle(u: SpectralField, points: np.ndarray, max_N: int = 64,
                           subtract_mean: bool = True) -> np.ndarray:
    """Direct box quadrature of the free-space Riesz gradient; test use only.

    grad psi(x) = -c_n * integral (x-y)/|x-y|^n u(y) dy, oriented so the field
    points toward a positive density peak (psi solves -Delta psi = u).  The
    mean of u is removed first (mirrors the neutralizing background of the
    spectral route).  The singular self-cell integrates to zero analytically by
    symmetry of the odd kernel over a centered cell, so it is skipped.  Cost is
    O(N^n) per point; resolutions above ``max_N`` are refused.
    """
    spec = u.spec
    if spec.N > max_N:
        raise RieszError(f"oracle refuses N={spec.N} > {max_N} (cost guard)")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    coords = [np.broadcast_to(c, spec.shape).ravel() for c in spec.coord_arrays()]
    background = u.mass / (2 * spec.L) ** spec.n if subtract_mean else 0.0
    w = (u.values - background).ravel() * spec.cell_volume
    cn = riesz_constant(spec.n)
    out = np.zeros((pts.shape[0], spec.n))
    for i, p in enumerate(pts):
        d2 = np.zeros(coords[0].size)
        diffs = []
        for ax in range(spec.n):
            d = p[ax] - coords[ax]
            diffs.append(d)
            d2 = d2 + d * d
        keep = d2 > (0.25 * spec.h) ** 2  # drop the singular self-cell
        with np.errstate(divide="ignore"):
            kern = np.where(keep, np.where(keep, d2, 1.0) ** (-spec.n / 2.0), 0.0)
        for ax in range(spec.n):
            out[i, ax] = -cn * np.sum(diffs[ax] * kern * w)
    return out


def gaussian_drift_radial(n: int, r: float, width: float = 2.0) -> float:
    """|grad psi| at radius r for a unit-mass Gaussian exp(-|x|^2/width^2) source.

    Gauss's law: |grad psi|(r) = enclosed_mass(r) / (area(S^{n-1}) r^{n-1}).
    """
    if n == 3:
        a = width / math.sqrt(2.0)  # variance a^2 per axis
        enclosed = math.erf(r / (a * math.sqrt(2.0))) - math.sqrt(2.0 / math.pi) * (
            r / a
        ) * math.exp(-r * r / (2 * a * a))
        return enclosed / (4.0 * math.pi * r * r)
    if n == 2:
        enclosed = 1.0 - math.exp(-r * r / width ** 2)
        return enclosed / (2.0 * math.pi * r)
    raise RieszError("radial drift oracle defined for n = 2, 3")
