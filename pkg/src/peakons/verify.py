"""Invariant suite run by the `verify` CLI subcommand.

Each check exercises one identity the pipeline must satisfy (roundtrips,
trace formulas, cross-route agreement, conservation, and an ODE
cross-check on a short horizon) and reports the measured residual.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from mpmath import mpc, mpf

from . import evolution, forward, inverse, ode, soleval
from .core import (
    DiscreteMeasurePair,
    SpectralData,
    measure_to_peakons,
    peakons_to_measure,
)
from .errors import PeakonError
from .precision import DEFAULT_REL_TOL, rel_residual, working_precision

ODE_TOL = 1e-6


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual: float
    tolerance: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  ({self.detail})" if self.detail else ""
        return (
            f"{status} {self.name}: residual={self.residual:.3e} "
            f"tol={self.tolerance:.1e}{extra}"
        )


def _measure_residual(a: DiscreteMeasurePair, b: DiscreteMeasurePair) -> mpf:
    if a.n_atoms != b.n_atoms:
        return mpf("inf")
    res = mpf(0)
    for pa, pb in zip(a.positions, b.positions):
        res = max(res, rel_residual(pa, pb))
    for wa, wb in zip(a.omega_weights, b.omega_weights):
        res = max(res, rel_residual(wa, wb))
    for va, vb in zip(a.upsilon_weights, b.upsilon_weights):
        res = max(res, rel_residual(va, vb))
    return res


def _spectral_residual(a: SpectralData, b: SpectralData) -> mpf:
    if a.size != b.size:
        return mpf("inf")
    res = mpf(0)
    for la, lb in zip(a.eigenvalues, b.eigenvalues):
        res = max(res, rel_residual(la, lb))
    for ga, gb in zip(a.norming_constants, b.norming_constants):
        res = max(res, rel_residual(ga, gb))
    return res


def verify_document(
    kind: str,
    payload,
    bits: int | None = None,
    rel_tol: float = DEFAULT_REL_TOL,
    rng_seed: int = 20140903,
) -> list[CheckResult]:
    """Run the invariant suite on a parsed problem document."""
    with working_precision(bits):
        results = []

        def check(name, residual, tol=rel_tol, detail=""):
            residual = float(residual)
            results.append(CheckResult(name, residual <= tol, residual, tol, detail))

        if kind == "peaks":
            measure, t0 = payload
            s = forward.forward_transform(measure, base_time=t0)
        else:
            s = payload
            t0 = s.base_time
            measure = inverse.reconstruct(s).measure
            check(
                "spectral_roundtrip",
                _spectral_residual(forward.forward_transform(measure, base_time=t0), s),
            )

        rec = inverse.reconstruct(s)
        check("measure_roundtrip", _measure_residual(rec.measure, measure))

        w = forward.wronskian(measure)
        check("wronskian_normalization", abs(w(mpf(0)) - 1))
        check(
            "wronskian_degree",
            abs(w.degree - measure.n_atoms - measure.dipole_count),
            detail=f"degree {w.degree}",
        )
        i1, i2 = forward.measure_moments(measure)
        t1, t2 = forward.trace_values(s.eigenvalues)
        check("trace_formula_1", rel_residual(t1, i1))
        check("trace_formula_2", rel_residual(t2, 2 * i2))
        if w.degree >= 1:
            check("wronskian_linear_coefficient",
                  rel_residual(w.coefficients[1], -i1))

        # norming-constant redundancy (both evaluation routes)
        dw = w.derivative()
        res = mpf(0)
        for lam, g2 in zip(s.eigenvalues, s.norming_constants):
            _, (_, c_lam) = forward.phi_minus_at_atoms(measure, lam)
            res = max(res, rel_residual(g2, -dw(lam) / c_lam))
        check("norming_constant_routes", res)

        # Weyl function: partial fraction vs continued fraction vs direct
        rng = random.Random(rng_seed)
        res = mpf(0)
        for _ in range(20):
            z = mpc(rng.uniform(-3, 3), rng.choice([-1, 1]) * rng.uniform(0.2, 2.5))
            m_pf = forward.weyl_partial_fraction(s, z)
            m_cf = forward.weyl_continued_fraction(measure, z)
            m_dir = forward.weyl_direct(measure, z)
            scale = max(abs(m_pf), mpf(1))
            res = max(res, abs(m_pf - m_cf) / scale, abs(m_pf - m_dir) / scale)
        check("weyl_function_routes", res)

        cf = forward.continued_fraction_coefficients(measure)
        check("string_length_sum", abs(sum(cf.lengths, mpf(0)) - 1))

        table = inverse.hankel_table(inverse.moments(s))
        res = max(inverse.sylvester_residuals(table), default=mpf(0))
        check("sylvester_identity", res)

        # conservation across a grid including any collision times
        report = evolution.collision_times(s) if s.size >= 2 else None
        ts = [t0 + mpf(i) / 2 for i in range(-4, 5)]
        if report is not None:
            ts.extend(report.times)
        res = mpf(0)
        mass_res = mpf(0)
        for t in sorted(ts):
            snap = evolution.solve_at(s, t)
            j1, j2 = forward.measure_moments(snap.measure)
            res = max(res, rel_residual(j1, i1), rel_residual(j2, i2))
            mass_res = max(mass_res, rel_residual(soleval.total_mass(snap.measure), i2))
        check("conservation_on_grid", res,
              detail=f"{len(ts)} times, {0 if report is None else len(report.times)} collisions")
        check("total_mass_equals_I2", mass_res)

        # ODE oracle on a short horizon (classical states only)
        if measure.dipole_count == 0 and measure.n_atoms >= 1:
            horizon = mpf("0.5")
            if report is not None:
                future = [t for t in report.times if t > t0]
                if future:
                    horizon = min(horizon, (future[0] - t0) / 2)
            try:
                state = measure_to_peakons(measure, time=t0)
                traj = ode.integrate(state, t0 + horizon)
                res = mpf(0)
                h0 = ode.hamiltonian(state)
                for frac in (0.25, 0.5, 0.75, 1.0):
                    t = float(t0) + frac * float(traj.times[-1] - float(t0))
                    st = traj.state_at(t)
                    res = max(res, abs(ode.hamiltonian(st) - h0) / abs(h0))
                    s_t = forward.forward_transform(
                        peakons_to_measure(st), base_time=t
                    )
                    expected = evolution.evolve_spectral(s, t)
                    res = max(res, _spectral_residual(s_t, expected))
                check("ode_oracle_short_horizon", res, tol=ODE_TOL,
                      detail=f"horizon {float(horizon):.3g}")
            except PeakonError as exc:
                results.append(
                    CheckResult("ode_oracle_short_horizon", False, float("inf"),
                                ODE_TOL, f"{type(exc).__name__}: {exc}")
                )
        return results
