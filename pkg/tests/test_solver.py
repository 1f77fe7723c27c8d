import math

import numpy as np
import pytest

from driftlab.functionals import DuhamelAccumulator, lq_norm
from driftlab.grid import GridSpec, SpectralField
from driftlab.kernels import KernelHandle, sample_kernel
from driftlab.solver import (BlowUpError, SolverConfig, SolverError,
                             StepRejection, burgers_step, checkpoint_state,
                             gaussian_data, run, self_convergence_order, step)


def cfg2d(**kw):
    spec = kw.pop("spec", GridSpec(n=2, L=30.0, N=128, theta=1.0))
    base = dict(spec=spec, dt0=0.05, t_end=1.0, keep_log=False)
    base.update(kw)
    return SolverConfig(**base)


class TestStep:
    def test_zero_solution(self):
        spec = GridSpec(n=2, L=10.0, N=64, theta=1.0)
        out = step(SpectralField.zeros(spec), 0.1)
        assert np.allclose(out.values, 0.0)

    def test_linear_propagation_is_exact(self):
        # with the transport term off, any number of steps equals one exact
        # semigroup application in coefficients
        spec = GridSpec(n=2, L=20.0, N=64, theta=0.7)
        u0 = gaussian_data(spec, amplitude=0.3, width=2.0)
        cfg = cfg2d(spec=spec, dt0=0.173, t_end=1.0, grow_dt=False,
                    linear_only=True, snapshot_times=(1.0,))
        traj = run(cfg, u0)
        exact = sample_kernel(KernelHandle(spec=spec, t=1.0)).coeffs * u0.coeffs
        got = traj.fields[-1].coeffs
        assert np.max(np.abs(got - exact)) < 1e-12 * np.max(np.abs(exact))

    def test_mass_exactly_conserved(self):
        spec = GridSpec(n=2, L=30.0, N=128, theta=1.0)
        u0 = gaussian_data(spec, amplitude=1.0, width=2.0, center=(1.0, 0.0))
        u = u0
        for _ in range(5):
            u = step(u, 0.05)
        assert u.coeffs.flat[0].real == u0.coeffs.flat[0].real  # bitwise

    def test_cfl_rejection_carries_suggestion(self):
        spec = GridSpec(n=2, L=30.0, N=128, theta=1.0)
        u0 = gaussian_data(spec, amplitude=50.0, width=1.0)
        with pytest.raises(StepRejection) as exc:
            step(u0, 10.0)
        assert 0 < exc.value.suggested < 10.0

    def test_blowup_detection(self):
        spec = GridSpec(n=2, L=30.0, N=64, theta=1.0)
        u0 = gaussian_data(spec, amplitude=1e200, width=2.0)
        with pytest.raises(BlowUpError):
            step(u0, 1e-300)

    def test_self_convergence_second_order(self):
        spec = GridSpec(n=2, L=30.0, N=96, theta=1.0)
        u0 = gaussian_data(spec, amplitude=0.1, width=2.0)
        cfg = cfg2d(spec=spec)
        order, rel = self_convergence_order(cfg, u0, dt=0.25, t_end=5.0)
        assert order >= 1.9
        assert rel < 1e-6

    def test_euler_is_first_order(self):
        spec = GridSpec(n=2, L=30.0, N=96, theta=1.0)
        u0 = gaussian_data(spec, amplitude=0.5, width=2.0)
        cfg = cfg2d(spec=spec, stepper="IF-Euler")
        order, _ = self_convergence_order(cfg, u0, dt=0.25, t_end=5.0)
        assert 0.8 <= order <= 1.3


class TestRun:
    def test_snapshots_and_monotone_times(self):
        spec = GridSpec(n=2, L=30.0, N=96, theta=1.0)
        u0 = gaussian_data(spec, amplitude=0.4, width=2.0)
        cfg = cfg2d(spec=spec, t_end=2.0, snapshot_times=(0.5, 1.0, 2.0))
        traj = run(cfg, u0)
        assert traj.times == [0.5, 1.0, 2.0]
        masses = [f.mass for f in traj.fields]
        assert max(abs(m - 0.4) for m in masses) < 1e-10

    def test_degenerate_snapshot_schedule(self):
        spec = GridSpec(n=2, L=30.0, N=96, theta=1.0)
        u0 = gaussian_data(spec, amplitude=0.4, width=2.0)
        acc = DuhamelAccumulator("uu", spec, 1.0, M=0.4)
        cfg = cfg2d(spec=spec, t_end=0.5, snapshot_times=(5.0,), accumulators=[acc])
        traj = run(cfg, u0)
        assert traj.times == [] and traj.fields == []
        assert acc.s_last == pytest.approx(0.5)

    def test_nonnegativity_diagnostic(self):
        spec = GridSpec(n=2, L=30.0, N=128, theta=1.0)
        u0 = gaussian_data(spec, amplitude=1.0, width=2.0)
        cfg = cfg2d(spec=spec, t_end=3.0, snapshot_times=(3.0,))
        traj = run(cfg, u0)
        v = traj.fields[-1].values
        assert v.min() >= -1e-6 * v.max()

    def test_log_entries(self):
        spec = GridSpec(n=2, L=30.0, N=64, theta=1.0)
        u0 = gaussian_data(spec, amplitude=0.4, width=2.0)
        seen = []
        cfg = cfg2d(spec=spec, t_end=0.3, keep_log=True)
        run(cfg, u0, log_writer=seen.append)
        assert seen and all(e["dt"] > 0 for e in seen)
        assert all(set(e) == {"t", "dt", "mass", "l2", "linf", "max_drift"} for e in seen)

    def test_resume_matches_uninterrupted(self):
        spec = GridSpec(n=2, L=30.0, N=64, theta=1.0)
        u0 = gaussian_data(spec, amplitude=0.8, width=2.0, center=(1.0, -0.5))

        def fresh_acc():
            return DuhamelAccumulator("uu", spec, 1.0, M=0.8)

        cfg_full = cfg2d(spec=spec, t_end=2.0, snapshot_times=(1.0, 2.0),
                         accumulators=[fresh_acc()])
        full = run(cfg_full, u0)

        acc_a = fresh_acc()
        cfg_a = cfg2d(spec=spec, t_end=1.0, snapshot_times=(1.0,), accumulators=[acc_a])
        part = run(cfg_a, u0)
        state = checkpoint_state(1.0, part.fields[-1].coeffs, [acc_a])

        acc_b = fresh_acc()
        cfg_b = cfg2d(spec=spec, t_end=2.0, snapshot_times=(1.0, 2.0), accumulators=[acc_b])
        resumed = run(cfg_b, u0, resume=state)

        d = np.max(np.abs(resumed.fields[-1].coeffs - full.fields[-1].coeffs))
        assert d < 1e-12 * np.max(np.abs(full.fields[-1].coeffs))
        assert np.allclose(acc_b.value, cfg_full.accumulators[0].value, rtol=1e-12, atol=1e-15)


class TestBurgers:
    def test_zero_solution(self):
        spec = GridSpec(n=1, L=50.0, N=256, theta=1.0)
        out = burgers_step(SpectralField.zeros(spec), 0.1)
        assert np.allclose(out.values, 0.0)

    def test_linear_limit_is_poisson_smoothing(self):
        spec = GridSpec(n=1, L=100.0, N=1024, theta=1.0)
        w0 = gaussian_data(spec, amplitude=0.3, width=1.5)
        cfg = SolverConfig(spec=spec, dt0=0.1, t_end=2.0, equation="burgers",
                           linear_only=True, grow_dt=False, snapshot_times=(2.0,),
                           keep_log=False)
        traj = run(cfg, w0)
        exact = sample_kernel(KernelHandle(spec=spec, t=2.0)).coeffs * w0.coeffs
        assert np.max(np.abs(traj.fields[-1].coeffs - exact)) < 1e-12

    def test_mass_conservation_flux_form(self):
        spec = GridSpec(n=1, L=100.0, N=1024, theta=1.0)
        w0 = gaussian_data(spec, amplitude=1.0, width=1.5)
        cfg = SolverConfig(spec=spec, dt0=0.02, t_end=4.0, equation="burgers",
                           snapshot_times=(4.0,), keep_log=False)
        traj = run(cfg, w0)
        assert abs(traj.fields[-1].mass - 1.0) < 1e-10

    def test_two_dimensional_grid_rejected(self):
        spec = GridSpec(n=2, L=10.0, N=32, theta=1.0)
        with pytest.raises(SolverError):
            SolverConfig(spec=spec, dt0=0.1, t_end=1.0, equation="burgers")


class TestDecayClass:
    @pytest.mark.slow
    def test_linf_decay_rate_theta08(self):
        # measured sup-norm decay tracks the dimensional-analysis rate -n/theta;
        # the uniform torus background is subtracted so the late-time floor
        # does not contaminate the fit
        spec = GridSpec(n=2, L=600.0, N=768, theta=0.8)
        u0 = gaussian_data(spec, amplitude=0.5, width=4.0)
        ladder = tuple(float(t) for t in np.geomspace(10.0, 100.0, 9))
        cfg = SolverConfig(spec=spec, dt0=0.02, t_end=100.0, keep_log=False,
                           snapshot_times=ladder)
        traj = run(cfg, u0)
        background = 0.5 / (2 * spec.L) ** 2
        norms = [float(np.max(np.abs(f.values - background))) for f in traj.fields]
        slope = np.polyfit(np.log(traj.times), np.log(norms), 1)[0]
        assert slope == pytest.approx(-2.0 / 0.8, rel=0.10)

    @pytest.mark.slow
    def test_burgers_linf_decay(self):
        spec = GridSpec(n=1, L=2000.0, N=8192, theta=1.0)
        w0 = gaussian_data(spec, amplitude=0.5, width=2.0)
        cfg = SolverConfig(spec=spec, dt0=0.02, t_end=200.0, equation="burgers",
                           keep_log=True)
        traj = run(cfg, w0)
        ts = np.array([e["t"] for e in traj.log])
        linf = np.array([e["linf"] for e in traj.log])
        sel = ts >= 20.0
        slope = np.polyfit(np.log(ts[sel]), np.log(linf[sel]), 1)[0]
        assert slope == pytest.approx(-1.0, abs=0.1)
