"""Evaluate the conservative solution pair (u, mu) and collision limits.

u(x) = (1/2) sum omega_n e^{-|x - x_n|} is continuous with kinks at the
peaks; mu = upsilon-atoms + (u^2 + u_x^2) dx.  Peak heights can be
recovered from samples of u at the peak positions by a tridiagonal matrix,
the exact inverse of the interaction kernel e^{-|q_i - q_j|}.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import exp, mpf, sinh

from .core import DiscreteMeasurePair
from .errors import CoincidentPositions, ExtrapolationUnstable
from .precision import to_mpf


@dataclass(frozen=True)
class SolutionSample:
    """u on a grid with one-sided derivatives and the singular mu-atoms.

    ac_density is |u|^2 + |u_x|^2 using the right derivative (the two
    one-sided densities agree except on the null set of peak positions).
    """

    grid: tuple
    u_values: tuple
    ux_left: tuple
    ux_right: tuple
    ac_density: tuple
    atoms: tuple  # ((position, mass), ...) from upsilon


def u_at(measure: DiscreteMeasurePair, x):
    x = to_mpf(x)
    return sum(
        (w * exp(-abs(x - xn)) for xn, w in
         zip(measure.positions, measure.omega_weights)),
        mpf(0),
    ) / 2


def _ux_one_sided(measure, x, side):
    # d/dx e^{-|x-xn|} = -sgn(x-xn) e^{-|x-xn|}; at the kink take the
    # requested side (sgn(0) := -1 from the left, +1 from the right)
    acc = mpf(0)
    for xn, w in zip(measure.positions, measure.omega_weights):
        d = x - xn
        s = side if d == 0 else (1 if d > 0 else -1)
        acc -= w * s * exp(-abs(d)) / 2
    return acc


def evaluate_u(measure: DiscreteMeasurePair, grid) -> SolutionSample:
    xs = tuple(to_mpf(x) for x in grid)
    for a, b in zip(xs, xs[1:]):
        if not a < b:
            raise CoincidentPositions("grid must be strictly increasing")
    us = tuple(u_at(measure, x) for x in xs)
    uxl = tuple(_ux_one_sided(measure, x, -1) for x in xs)
    uxr = tuple(_ux_one_sided(measure, x, +1) for x in xs)
    dens = tuple(u * u + d * d for u, d in zip(us, uxr))
    atoms = tuple(
        (x, v)
        for x, v in zip(measure.positions, measure.upsilon_weights)
        if v > 0
    )
    return SolutionSample(xs, us, uxl, uxr, dens, atoms)


# ---------------------------------------------------------------------------
# height recovery (tridiagonal inverse of the interaction kernel)


def interaction_matrix(positions) -> list:
    """E with entries e^{-|q_j - q_i|} (samples = E @ heights)."""
    qs = [to_mpf(q) for q in positions]
    return [[exp(-abs(qi - qj)) for qj in qs] for qi in qs]


def height_recovery_matrix(positions) -> list:
    """The tridiagonal inverse of the interaction matrix.

    Interior diagonal entries are
    sinh(q_{n+1} - q_{n-1}) / (2 sinh(q_{n+1} - q_n) sinh(q_n - q_{n-1})),
    off-diagonal entries -1 / (2 sinh(q_{n+1} - q_n)).  With the phantom
    neighbors q_0 = -inf and q_{N+1} = +inf the sinh ratios converge, which
    fixes the boundary entries:

      n = 1:  sinh(q_2 - q_0)/sinh(q_1 - q_0) -> e^{q_2 - q_1}, so the
              entry is e^{d}/(2 sinh d) = 1/(1 - e^{-2d}) with d = q_2 - q_1;
      n = N:  symmetric, with d = q_N - q_{N-1};
      N = 1:  both neighbors phantom and the ratio tends to 2, giving 1.

    The brute-force check J E = identity validates these limits.
    """
    qs = [to_mpf(q) for q in positions]
    n = len(qs)
    for a, b in zip(qs, qs[1:]):
        if not a < b:
            raise CoincidentPositions("positions must be strictly increasing")
    j = [[mpf(0)] * n for _ in range(n)]
    if n == 0:
        return j
    if n == 1:
        j[0][0] = mpf(1)
        return j
    for i in range(n):
        if i == 0:
            d = qs[1] - qs[0]
            j[i][i] = 1 / (1 - exp(-2 * d))
        elif i == n - 1:
            d = qs[n - 1] - qs[n - 2]
            j[i][i] = 1 / (1 - exp(-2 * d))
        else:
            dl, dr = qs[i] - qs[i - 1], qs[i + 1] - qs[i]
            j[i][i] = sinh(dr + dl) / (2 * sinh(dr) * sinh(dl))
        if i + 1 < n:
            b = -1 / (2 * sinh(qs[i + 1] - qs[i]))
            j[i][i + 1] = b
            j[i + 1][i] = b
    return j


def heights_from_samples(positions, samples) -> tuple:
    """Recover peak heights p from u sampled at the peak positions."""
    j = height_recovery_matrix(positions)
    us = [to_mpf(u) for u in samples]
    return tuple(
        sum((j[i][k] * us[k] for k in range(len(us))), mpf(0))
        for i in range(len(us))
    )


# ---------------------------------------------------------------------------
# energy integral and total mass


def energy_integral(measure: DiscreteMeasurePair):
    """Closed form of the H^1-type integral of u^2 + u_x^2 over the line.

    On each interval between consecutive atoms u = a e^x + b e^{-x}, so
    u^2 + u_x^2 = 2 a^2 e^{2x} + 2 b^2 e^{-2x} (the cross terms cancel) and
    every piece integrates exactly.  Equals the integral of u d(omega).
    """
    n = measure.n_atoms
    if n == 0:
        return mpf(0)
    xs, ws = measure.positions, measure.omega_weights
    # plane-wave coefficients of u on the interval left of atom index i
    suffix = [mpf(0)] * (n + 1)  # sum over atoms >= i of w e^{-x}
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + ws[i] * exp(-xs[i])
    prefix = [mpf(0)] * (n + 1)  # sum over atoms < i of w e^{x}
    for i in range(n):
        prefix[i + 1] = prefix[i] + ws[i] * exp(xs[i])

    total = mpf(0)
    # left tail (-inf, x_1]: u = a e^x
    a = suffix[0] / 2
    total += 2 * a * a * exp(2 * xs[0]) / 2
    # interior intervals [x_i, x_{i+1}]
    for i in range(n - 1):
        a = suffix[i + 1] / 2
        b = prefix[i + 1] / 2
        lo, hi = xs[i], xs[i + 1]
        total += a * a * (exp(2 * hi) - exp(2 * lo))
        total += b * b * (exp(-2 * lo) - exp(-2 * hi))
    # right tail [x_N, inf): u = b e^{-x}
    b = prefix[n] / 2
    total += 2 * b * b * exp(-2 * xs[n - 1]) / 2
    return total


def total_mass(measure: DiscreteMeasurePair):
    """mu(R) = total dipole mass + energy integral; equals I2."""
    return sum(measure.upsilon_weights, mpf(0)) + energy_integral(measure)


# ---------------------------------------------------------------------------
# collision-limit diagnostics


def _neville_to_zero(hs, ys):
    """Polynomial extrapolation of y(h) to h = 0 through the given nodes."""
    ys = list(ys)
    n = len(hs)
    for level in range(1, n):
        for i in range(n - level):
            ys[i] = (hs[i + level] * ys[i] - hs[i] * ys[i + level]) / (
                hs[i + level] - hs[i]
            )
    return ys[0]


def collision_limit_diagnostics(
    times, p_lower, p_upper, q_lower, q_upper, t_collision, stability_tol=1e-2
):
    """Extrapolated limits of the colliding pair as t -> t_collision.

    Returns (height_sum_limit, atom_mass_limit): the limits of
    p_n + p_{n+1} and of 4 p_n p_{n+1} (q_n - q_{n+1}), from three-point
    Richardson extrapolation in h = t_collision - t over the last samples.
    Both combinations stay analytic through the collision even though the
    individual heights blow up, which is what makes the extrapolation work.
    """
    t_collision = to_mpf(t_collision)
    rows = sorted(
        zip(
            (to_mpf(t) for t in times),
            (to_mpf(p) for p in p_lower),
            (to_mpf(p) for p in p_upper),
            (to_mpf(q) for q in q_lower),
            (to_mpf(q) for q in q_upper),
        )
    )
    if len(rows) < 3:
        raise ExtrapolationUnstable("need at least three pre-collision samples")
    rows = rows[-3:]
    hs = [t_collision - t for t, *_ in rows]
    if any(h <= 0 for h in hs) or len(set(hs)) != 3:
        raise ExtrapolationUnstable("samples must strictly precede the collision")
    sums = [pl + pu for _, pl, pu, _, _ in rows]
    masses = [4 * pl * pu * (ql - qu) for _, pl, pu, ql, qu in rows]
    out = []
    for ys in (sums, masses):
        three = _neville_to_zero(hs, ys)
        two = _neville_to_zero(hs[-2:], ys[-2:])
        if abs(three - two) > mpf(stability_tol) * max(abs(three), mpf(1)):
            raise ExtrapolationUnstable(
                f"extrapolants disagree: {three} vs {two}"
            )
        out.append(three)
    return out[0], out[1]
