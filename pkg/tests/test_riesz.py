import math

import numpy as np
import pytest

from driftlab.grid import GridSpec, SpectralField, dealias, derivative_multiplier, apply_multiplier
from driftlab.riesz import (RieszError, gaussian_drift_radial, riesz_constant,
                            riesz_gradient, riesz_realspace_oracle, divergence)


def bandlimited_random(spec, seed, band):
    rng = np.random.default_rng(seed)
    f = SpectralField.from_values(spec, rng.standard_normal(spec.shape))
    c = f.coeffs.copy()
    for ax in range(spec.n):
        k = (np.fft.rfftfreq(spec.N) if ax == spec.n - 1 else np.fft.fftfreq(spec.N)) * spec.N
        shape = [1] * spec.n
        shape[ax] = k.size
        c = np.where(np.abs(k.reshape(shape)) <= band, c, 0.0)
    c.flat[0] = 0.0  # mean zero
    return SpectralField.from_coeffs(spec, c)


class TestRieszGradient:
    def test_kernel_constants(self):
        assert riesz_constant(2) == pytest.approx(1.0 / (2 * math.pi), rel=1e-14)
        assert riesz_constant(3) == pytest.approx(1.0 / (4 * math.pi), rel=1e-14)

    def test_radial_symmetry_zero_at_center(self):
        spec = GridSpec(n=2, L=10.0, N=64, theta=1.0)
        r2 = spec.radius_array() ** 2
        u = SpectralField.from_values(spec, np.exp(-r2))
        g = riesz_gradient(u)
        for comp in g:
            assert abs(comp.values[0, 0]) < 1e-12 * np.max(np.abs(comp.values))

    def test_zero_mean_components(self):
        spec = GridSpec(n=2, L=5.0, N=48, theta=1.0)
        u = bandlimited_random(spec, 1, 10)
        for comp in riesz_gradient(u):
            assert abs(comp.mass) < 1e-12

    def test_gaussian_enclosed_mass_n3(self):
        # unit-mass Gaussian (4 pi)^{-3/2} exp(-|x|^2/4); Gauss's law gives
        # |grad psi|(r) = [erf(r/2) - (r/sqrt(pi)) exp(-r^2/4)] / (4 pi r^2)
        m2 = math.erf(1.0) - (2.0 / math.sqrt(math.pi)) * math.exp(-1.0)
        assert m2 / (16 * math.pi) == pytest.approx(8.508e-3, rel=1e-3)
        spec = GridSpec(n=3, L=10.0, N=64, theta=1.0)
        r2 = spec.radius_array() ** 2
        u = SpectralField.from_values(spec, (4 * math.pi) ** -1.5 * np.exp(-r2 / 4.0))
        g = riesz_gradient(u)
        idx = int(round(2.0 / spec.h))
        x = idx * spec.h
        got = abs(g[0].values[idx, 0, 0])
        expect = gaussian_drift_radial(3, x, width=2.0)
        assert got == pytest.approx(expect, rel=2e-2)

    def test_skew_symmetry(self):
        spec = GridSpec(n=2, L=5.0, N=64, theta=1.0)
        u = bandlimited_random(spec, 2, 20)
        g = riesz_gradient(u)
        scale = np.sum(np.abs(u.values) ** 2) * spec.cell_volume
        for comp in g:
            inner = np.sum(u.values * comp.values) * spec.cell_volume
            assert abs(inner) < 1e-10 * scale

    def test_divergence_identity(self):
        spec = GridSpec(n=2, L=5.0, N=64, theta=1.0)
        u = dealias(bandlimited_random(spec, 3, 30))
        g = riesz_gradient(u)
        div = divergence(g)
        target = -(u.coeffs.copy())
        target.flat[0] = 0.0
        scale = np.max(np.abs(u.coeffs))
        assert np.max(np.abs(div.coeffs - target)) < 1e-10 * scale

    def test_one_dimensional_unsupported(self):
        spec = GridSpec(n=1, L=5.0, N=32, theta=1.0)
        u = SpectralField.from_values(spec, np.ones(32))
        with pytest.raises(RieszError):
            riesz_gradient(u)


class TestRealspaceOracle:
    def test_zero_field(self):
        spec = GridSpec(n=2, L=5.0, N=32, theta=1.0)
        u = SpectralField.zeros(spec)
        out = riesz_realspace_oracle(u, np.array([[0.3, -0.4]]))
        assert np.allclose(out, 0.0)

    def test_cost_guard(self):
        spec = GridSpec(n=2, L=5.0, N=128, theta=1.0)
        u = SpectralField.zeros(spec)
        with pytest.raises(RieszError):
            riesz_realspace_oracle(u, np.array([[0.0, 0.0]]))

    def test_cross_validates_spectral_route(self):
        # localized band-limited field: the one-period oracle then approximates
        # the periodic solve up to tail truncation (the dominant error)
        spec = GridSpec(n=2, L=6.0, N=48, theta=1.0)
        raw = bandlimited_random(spec, 4, 7)
        envelope = np.exp(-spec.radius_array() ** 2 / (0.25 * spec.L) ** 2)
        loc = SpectralField.from_values(spec, raw.values * envelope)
        c = loc.coeffs.copy()
        c.flat[0] = 0.0
        u = SpectralField.from_coeffs(spec, c)
        g = riesz_gradient(u)
        pts = np.array([[0.0, 0.0], [1.0, 0.5], [-2.0, 1.0]])
        oracle = riesz_realspace_oracle(u, pts)
        scale = max(np.max(np.abs(g[0].values)), np.max(np.abs(g[1].values)))
        for i, p in enumerate(pts):
            idx = tuple(int(round(c / spec.h)) % spec.N for c in p)
            spec_vals = np.array([g[0].values[idx], g[1].values[idx]])
            assert np.max(np.abs(spec_vals - oracle[i])) < 0.02 * scale

    def test_radial_gaussian_n3(self):
        spec = GridSpec(n=3, L=8.0, N=64, theta=1.0)
        r2 = spec.radius_array() ** 2
        u = SpectralField.from_values(spec, (4 * math.pi) ** -1.5 * np.exp(-r2 / 4.0))
        idx = int(round(2.0 / spec.h))
        x = idx * spec.h
        out = riesz_realspace_oracle(u, np.array([[x, 0.0, 0.0]]), subtract_mean=False)
        expect = -gaussian_drift_radial(3, x, width=2.0)  # drift points inward
        assert out[0, 0] == pytest.approx(expect, rel=1e-2)
        assert abs(out[0, 1]) < 1e-8 and abs(out[0, 2]) < 1e-8
