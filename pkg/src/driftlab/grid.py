"""Periodic-box spectral grid: transforms, Fourier multipliers, dealiased products.

All fields live on the centered box [-L, L)^n sampled at N points per axis.
Internally arrays use the FFT-natural ("wrapped") layout in which x = 0 sits at
index 0; the coordinate arrays returned by :class:`GridSpec` follow the same
layout, so user code normally never has to think about it.  Fourier
coefficients approximate the convolution-convention continuous transform

    u_hat(xi) = integral u(x) exp(-i xi . x) dx   ~   h^n * DFT(u)

so that the zero mode is the total mass, convolution is a plain coefficient
product, and the semigroup kernel exp(-t |xi|^theta) integrates to one exactly.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft as _sfft


def fft_workers() -> int:
    """Worker count for FFTs, configurable via DRIFTLAB_FFT_WORKERS."""
    try:
        return int(os.environ.get("DRIFTLAB_FFT_WORKERS", "0")) or (os.cpu_count() or 1)
    except ValueError:
        return os.cpu_count() or 1


class GridError(ValueError):
    pass


class SymmetryError(GridError):
    """A non-Hermitian symbol was applied while real output was demanded."""


@dataclass(frozen=True)
class GridSpec:
    """Geometry of the periodic computational box.

    n      spatial dimension (1, 2 or 3)
    L      half-length of the box [-L, L)^n
    N      points per axis, even
    theta  fractional dissipation order in (0, 2]
    """

    n: int
    L: float
    N: int
    theta: float

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise GridError(f"dimension must be 1, 2 or 3, got {self.n}")
        if self.N % 2 != 0 or self.N < 8:
            raise GridError(f"N must be even and >= 8, got {self.N}")
        if self.L <= 0:
            raise GridError(f"box half-length must be positive, got {self.L}")
        if not (0.0 < self.theta <= 2.0):
            raise GridError(f"theta must lie in (0, 2], got {self.theta}")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.n

    @property
    def spectral_shape(self) -> tuple:
        return (self.N,) * (self.n - 1) + (self.N // 2 + 1,)

    @property
    def cell_volume(self) -> float:
        return self.h ** self.n

    @cached_property
    def axis_coords(self) -> np.ndarray:
        """1-D physical coordinates in wrapped layout: 0, h, ..., L-h, -L, ..., -h."""
        return np.fft.ifftshift(-self.L + self.h * np.arange(self.N))

    def coord_arrays(self) -> list:
        """Open (broadcastable) coordinate arrays, one per axis."""
        out = []
        for ax in range(self.n):
            shape = [1] * self.n
            shape[ax] = self.N
            out.append(self.axis_coords.reshape(shape))
        return out

    def radius_array(self) -> np.ndarray:
        r2 = np.zeros(self.shape)
        for x in self.coord_arrays():
            r2 = r2 + x * x
        return np.sqrt(r2)

    @cached_property
    def xi_arrays(self) -> list:
        """Open wavevector arrays on the half-spectrum lattice, xi_k = (pi/L) k."""
        out = []
        for ax in range(self.n):
            if ax == self.n - 1:
                k = np.fft.rfftfreq(self.N, d=self.h) * 2.0 * np.pi
            else:
                k = np.fft.fftfreq(self.N, d=self.h) * 2.0 * np.pi
            shape = [1] * self.n
            shape[ax] = k.size
            out.append(k.reshape(shape))
        return out

    @cached_property
    def xi_norm(self) -> np.ndarray:
        s = np.zeros(self.spectral_shape)
        for xi in self.xi_arrays:
            s = s + xi * xi
        return np.sqrt(s)

    @cached_property
    def dissipation_symbol(self) -> np.ndarray:
        """|xi|^theta on the half-spectrum lattice (cached; used hot)."""
        return self.xi_norm ** self.theta

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """Sharp 2/3-rule mask: keep integer modes |k| <= floor(N/3) per axis."""
        kcut = self.N // 3
        mask = np.ones(self.spectral_shape, dtype=bool)
        for ax in range(self.n):
            if ax == self.n - 1:
                k = np.fft.rfftfreq(self.N) * self.N
            else:
                k = np.fft.fftfreq(self.N) * self.N
            shape = [1] * self.n
            shape[ax] = k.size
            mask &= np.abs(k.reshape(shape)) <= kcut
        return mask

    @cached_property
    def nyquist_mask(self) -> np.ndarray:
        """True on modes whose index hits -N/2 on some axis (no conjugate partner)."""
        mask = np.zeros(self.spectral_shape, dtype=bool)
        for ax in range(self.n):
            if ax == self.n - 1:
                k = np.fft.rfftfreq(self.N) * self.N
            else:
                k = np.fft.fftfreq(self.N) * self.N
            shape = [1] * self.n
            shape[ax] = k.size
            mask |= np.abs(k.reshape(shape)) == self.N // 2
        return mask

    def forward(self, values: np.ndarray) -> np.ndarray:
        return _sfft.rfftn(values, workers=fft_workers()) * self.cell_volume

    def inverse(self, coeffs: np.ndarray) -> np.ndarray:
        return _sfft.irfftn(coeffs, s=self.shape, workers=fft_workers()) / self.cell_volume

    def compatible(self, other: "GridSpec") -> bool:
        return (self.n, self.L, self.N) == (other.n, other.L, other.N)


class SpectralField:
    """A real field with synchronized physical and Fourier representations.

    Construct via :meth:`from_values` or :meth:`from_coeffs`; both
    representations are materialized lazily and cached.  Fields are treated as
    immutable: operations return new instances.
    """

    __slots__ = ("spec", "_values", "_coeffs")

    def __init__(self, spec: GridSpec, values=None, coeffs=None):
        if values is None and coeffs is None:
            raise GridError("need values or coeffs")
        self.spec = spec
        self._values = values
        self._coeffs = coeffs

    @classmethod
    def from_values(cls, spec: GridSpec, values: np.ndarray, validate: bool = True):
        values = np.asarray(values, dtype=np.float64)
        if values.shape != spec.shape:
            raise GridError(f"shape {values.shape} does not match grid {spec.shape}")
        if validate and not np.all(np.isfinite(values)):
            raise GridError("field contains non-finite entries")
        return cls(spec, values=values)

    @classmethod
    def from_coeffs(cls, spec: GridSpec, coeffs: np.ndarray, validate: bool = False):
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        if coeffs.shape != spec.spectral_shape:
            raise GridError(f"coeff shape {coeffs.shape} does not match {spec.spectral_shape}")
        if validate and not np.all(np.isfinite(coeffs)):
            raise GridError("coefficients contain non-finite entries")
        return cls(spec, coeffs=coeffs)

    @classmethod
    def zeros(cls, spec: GridSpec):
        return cls(spec, values=np.zeros(spec.shape))

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            self._values = self.spec.inverse(self._coeffs)
        return self._values

    @property
    def coeffs(self) -> np.ndarray:
        if self._coeffs is None:
            self._coeffs = self.spec.forward(self._values)
        return self._coeffs

    @property
    def mass(self) -> float:
        return float(self.coeffs.flat[0].real)

    def is_finite(self) -> bool:
        arr = self._values if self._values is not None else self._coeffs
        return bool(np.all(np.isfinite(arr)))

    def centered_values(self) -> np.ndarray:
        """Values reordered so axes run from -L to L-h (for IO and plotting)."""
        return np.fft.fftshift(self.values)

    def __add__(self, other):
        self._check(other)
        return SpectralField.from_coeffs(self.spec, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return SpectralField.from_coeffs(self.spec, self.coeffs - other.coeffs)

    def __mul__(self, a: float):
        return SpectralField.from_coeffs(self.spec, self.coeffs * float(a))

    __rmul__ = __mul__

    def _check(self, other):
        if not isinstance(other, SpectralField) or not self.spec.compatible(other.spec):
            raise GridError("incompatible fields")


@dataclass(frozen=True)
class Multiplier:
    """Fourier multiplier defined by a symbol on the wavevector lattice.

    symbol           callable(xi_arrays, xi_norm) -> complex/real array
    zero_mode        value assigned at xi = 0
    zero_nyquist     zero out partnerless Nyquist modes (needed by odd symbols)
    name             label used in error messages
    """

    symbol: object
    zero_mode: complex = None
    zero_nyquist: bool = False
    name: str = "multiplier"

    def evaluate(self, spec: GridSpec) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            arr = np.asarray(self.symbol(spec.xi_arrays, spec.xi_norm))
        arr = np.broadcast_to(arr, spec.spectral_shape).copy()
        if self.zero_mode is not None:
            arr.flat[0] = self.zero_mode
        if self.zero_nyquist:
            arr[spec.nyquist_mask] = 0.0
        if not np.all(np.isfinite(arr)):
            raise GridError(f"symbol '{self.name}' is not finite on the lattice")
        return arr


def hermitian_defect(spec: GridSpec, symbol_values: np.ndarray) -> float:
    """Max |m(-xi) - conj(m(xi))| over the self-conjugate planes of the half-spectrum.

    In the rfft layout only the first and last planes of the trailing axis
    contain both xi and -xi; a symbol inconsistent there would silently break
    the real-output guarantee.
    """
    defect = 0.0
    for plane_idx in (0, spec.N // 2):
        plane = np.take(symbol_values, plane_idx, axis=spec.n - 1)
        flipped = plane
        for ax in range(spec.n - 1):
            flipped = np.roll(np.flip(flipped, axis=ax), 1, axis=ax)
        defect = max(defect, float(np.max(np.abs(flipped - np.conj(plane)))))
    return defect


def apply_multiplier(f: SpectralField, m: Multiplier, require_real: bool = True) -> SpectralField:
    """Apply a Fourier multiplier: g_hat(xi) = m(xi) f_hat(xi)."""
    sym = m.evaluate(f.spec)
    if require_real:
        defect = hermitian_defect(f.spec, sym)
        scale = float(np.max(np.abs(sym))) or 1.0
        if defect > 1e-12 * scale:
            raise SymmetryError(
                f"symbol '{m.name}' is not Hermitian on self-conjugate modes "
                f"(defect {defect:.3e}); cannot produce a real field"
            )
    return SpectralField.from_coeffs(f.spec, sym * f.coeffs)


# ---------------------------------------------------------------------------
# standard symbols

def identity_multiplier() -> Multiplier:
    return Multiplier(symbol=lambda xi, r: np.ones_like(r), name="identity")


def fractional_laplacian_multiplier(theta: float) -> Multiplier:
    """|xi|^theta, the generator symbol of the fractional dissipation."""
    return Multiplier(
        symbol=lambda xi, r: r ** theta,
        zero_mode=0.0,
        name=f"|xi|^{theta}",
    )


def semigroup_multiplier(t: float, theta: float) -> Multiplier:
    """exp(-t |xi|^theta), the solution operator of the linear flow."""
    return Multiplier(
        symbol=lambda xi, r: np.exp(-t * r ** theta),
        name=f"exp(-{t}|xi|^{theta})",
    )


def derivative_multiplier(axis: int, order: int = 1) -> Multiplier:
    """(i xi_axis)^order with partnerless Nyquist modes zeroed for odd orders."""
    return Multiplier(
        symbol=lambda xi, r, a=axis, p=order: (1j * xi[a]) ** p,
        zero_nyquist=(order % 2 == 1),
        name=f"(i xi_{axis})^{order}",
    )


def riesz_multiplier(axis: int) -> Multiplier:
    """i xi_axis / |xi|^2 with the zero mode pinned to 0 (neutralizing background)."""
    def sym(xi, r, a=axis):
        r2 = r * r
        out = np.where(r2 > 0, 1j * xi[a] / np.where(r2 > 0, r2, 1.0), 0.0)
        return out

    return Multiplier(symbol=sym, zero_mode=0.0, zero_nyquist=True, name=f"i xi_{axis}/|xi|^2")


# ---------------------------------------------------------------------------
# products

def dealias(f: SpectralField) -> SpectralField:
    return SpectralField.from_coeffs(f.spec, np.where(f.spec.dealias_mask, f.coeffs, 0.0))


def dealiased_product(f: SpectralField, g: SpectralField) -> SpectralField:
    """Pointwise product with the 2/3 rule applied before and after multiplying."""
    if not isinstance(g, SpectralField) or not f.spec.compatible(g.spec):
        raise GridError("dealiased_product requires fields on the same grid")
    spec = f.spec
    mask = spec.dealias_mask
    fv = spec.inverse(np.where(mask, f.coeffs, 0.0))
    gv = spec.inverse(np.where(mask, g.coeffs, 0.0))
    prod = spec.forward(fv * gv)
    return SpectralField.from_coeffs(spec, np.where(mask, prod, 0.0))


def delta_field(spec: GridSpec) -> SpectralField:
    """Discrete delta at the origin: unit mass concentrated in one cell."""
    v = np.zeros(spec.shape)
    v.flat[0] = 1.0 / spec.cell_volume
    return SpectralField.from_values(spec, v)


# ---------------------------------------------------------------------------
# pointwise spectral evaluation (off-lattice probes)

def evaluate_at(f: SpectralField, points: np.ndarray) -> np.ndarray:
    """Evaluate the band-limited interpolant of f at arbitrary points.

    Direct Fourier sum, O(N^n) per point; intended for small probe sets.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    spec = f.spec
    c = f.coeffs / (2.0 * spec.L) ** spec.n
    # weight interior modes of the half-spectrum twice (their conjugates are implicit)
    w = np.full(spec.spectral_shape, 2.0)
    k_last = np.fft.rfftfreq(spec.N) * spec.N
    sel = [slice(None)] * spec.n
    for idx, kv in enumerate(k_last):
        if kv == 0 or kv == spec.N // 2:
            sel[-1] = idx
            w[tuple(sel)] = 1.0
    out = np.empty(points.shape[0])
    for i, p in enumerate(points):
        phase = np.zeros(spec.spectral_shape)
        for ax in range(spec.n):
            phase = phase + spec.xi_arrays[ax] * p[ax]
        out[i] = np.sum(w * (c * np.exp(1j * phase)).real)
    return out


# ---------------------------------------------------------------------------
# snapshot IO: one-line JSON header + row-major little-endian float64 payload

def write_snapshot(path, f: SpectralField, time: float) -> None:
    header = {
        "n": f.spec.n,
        "L": f.spec.L,
        "N": f.spec.N,
        "theta": f.spec.theta,
        "time": time,
    }
    with open(path, "wb") as fh:
        fh.write((json.dumps(header) + "\n").encode("ascii"))
        fh.write(f.centered_values().astype("<f8").tobytes(order="C"))


def read_snapshot(path):
    """Returns (field, time)."""
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode("ascii"))
        spec = GridSpec(n=header["n"], L=header["L"], N=header["N"], theta=header["theta"])
        payload = fh.read()
    arr = np.frombuffer(payload, dtype="<f8").reshape(spec.shape)
    values = np.fft.ifftshift(arr)
    return SpectralField.from_values(spec, values), float(header["time"])
