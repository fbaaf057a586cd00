"""Closed-form two-peakon solution, kept independent of the general pipeline.

Everything here is direct arithmetic on the two eigenvalues and the two
norming constants: quadratic roots for the spectrum, explicit moment
combinations for the positions and weights, and the explicit collision
time for the mixed-sign case.  Its only dependency is the core types, so
it can serve as a golden reference for the forward / inverse / evolution
machinery.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import exp, log, mpf, sqrt

from .core import DiscreteMeasurePair, MeasureSnapshot
from .errors import InvalidSpectralData
from .precision import hankel_zero_threshold, to_mpf, working_precision

PEAKON_PEAKON = "peakon_peakon"
PEAKON_ANTIPEAKON = "peakon_antipeakon"


@dataclass(frozen=True)
class TwoPeakonData:
    """Eigenvalues lambda1 < lambda2 with norming constants at base_time.

    lambda1 lambda2 > 0 is the two-peakon case (no collision ever);
    lambda1 lambda2 < 0 is the peakon-antipeakon case with exactly one
    collision time.
    """

    lambda1: mpf
    lambda2: mpf
    gamma1_sq: mpf
    gamma2_sq: mpf
    base_time: mpf

    def __post_init__(self):
        if not self.lambda1 < self.lambda2:
            raise InvalidSpectralData("eigenvalues must be sorted and distinct")
        if self.lambda1 == 0 or self.lambda2 == 0:
            raise InvalidSpectralData("zero eigenvalue")
        if not (self.lambda1 * self.gamma1_sq > 0 and self.lambda2 * self.gamma2_sq > 0):
            raise InvalidSpectralData("lambda * gamma^2 must be positive")

    @property
    def case(self) -> str:
        return PEAKON_PEAKON if self.lambda1 * self.lambda2 > 0 else PEAKON_ANTIPEAKON

    def gamma_sq_at(self, t) -> tuple:
        dt = to_mpf(t) - self.base_time
        return (
            self.gamma1_sq * exp(-dt / (2 * self.lambda1)),
            self.gamma2_sq * exp(-dt / (2 * self.lambda2)),
        )


def two_peakon_spectrum(omega1, omega2, x1, x2, base_time=0, bits=None) -> TwoPeakonData:
    """Spectral data of the measure with weights omega1, omega2 at x1 < x2.

    The Wronskian is the quadratic
        W(z) = 1 - (omega1 + omega2) z + omega1 omega2 (1 - e^{x1 - x2}) z^2
    (coefficients pinned by the trace formulas), and each norming constant
    evaluates in closed form to
        gamma^2 = omega1 e^{-x1} (1 - lambda omega2 (1 - e^{x1-x2}))^2
                  + omega2 e^{-x2}.
    """
    with working_precision(bits):
        w1, w2 = to_mpf(omega1), to_mpf(omega2)
        x1, x2 = to_mpf(x1), to_mpf(x2)
        if not x1 < x2:
            raise InvalidSpectralData("need x1 < x2")
        if w1 == 0 or w2 == 0:
            raise InvalidSpectralData("weights must be nonzero")
        c1 = -(w1 + w2)
        c2 = w1 * w2 * (1 - exp(x1 - x2))
        disc = c1 * c1 - 4 * c2
        if not disc > 0:
            raise InvalidSpectralData("quadratic discriminant not positive")
        # stable quadratic roots of c2 z^2 + c1 z + 1
        if c1 >= 0:
            q = -(c1 + sqrt(disc)) / 2
        else:
            q = -(c1 - sqrt(disc)) / 2
        roots = sorted([q / c2, 1 / q])

        def gamma_sq(lam):
            return (
                w1 * exp(-x1) * (1 - lam * w2 * (1 - exp(x1 - x2))) ** 2
                + w2 * exp(-x2)
            )

        return TwoPeakonData(
            roots[0], roots[1], gamma_sq(roots[0]), gamma_sq(roots[1]),
            to_mpf(base_time),
        )


def two_peakon_from_spectrum(lambda1, lambda2, gamma1_sq, gamma2_sq, base_time=0) -> TwoPeakonData:
    return TwoPeakonData(
        to_mpf(lambda1), to_mpf(lambda2), to_mpf(gamma1_sq), to_mpf(gamma2_sq),
        to_mpf(base_time),
    )


def two_peakon_collision_time(d: TwoPeakonData):
    """The unique collision time in the peakon-antipeakon case, else None.

    t = base_time + (2 lambda1 lambda2 / (lambda2 - lambda1))
        * log(-gamma1^2 / gamma2^2).
    """
    if d.case == PEAKON_PEAKON:
        return None
    return d.base_time + (
        2 * d.lambda1 * d.lambda2 / (d.lambda2 - d.lambda1)
    ) * log(-d.gamma1_sq / d.gamma2_sq)


def two_peakon_state(d: TwoPeakonData, t, bits=None) -> MeasureSnapshot:
    """The measure pair at time t, in closed form.

    With the first moment s1(t) = 1/gamma1^2(t) + 1/gamma2^2(t):
    away from its zero the two positions are

      x1 = log((lambda2 - lambda1)^2
               / (lambda1 lambda2 (lambda2 gamma1^2 + lambda1 gamma2^2))),
      x2 = log(1/(lambda1 gamma1^2) + 1/(lambda2 gamma2^2)),

    with weights omega2 = (s0 - 1)/s1 and
    omega1 = 1/lambda1 + 1/lambda2 - omega2.  At the zero of s1 the
    positions coincide: a single atom at x2 with omega = 1/lambda1 +
    1/lambda2 and dipole mass upsilon = -1/(lambda1 lambda2).
    """
    with working_precision(bits):
        t = to_mpf(t)
        l1, l2 = d.lambda1, d.lambda2
        g1, g2 = d.gamma_sq_at(t)
        s1 = 1 / g1 + 1 / g2
        collided = abs(s1) <= hankel_zero_threshold() * (abs(1 / g1) + abs(1 / g2))
        x_right = log(1 / (l1 * g1) + 1 / (l2 * g2))
        if collided:
            measure = DiscreteMeasurePair(
                (x_right,), (1 / l1 + 1 / l2,), (-1 / (l1 * l2),)
            )
        else:
            x_left = log(
                (l2 - l1) ** 2 / (l1 * l2 * (l2 * g1 + l1 * g2))
            )
            s0_minus_1 = 1 / (l1 * g1) + 1 / (l2 * g2)
            omega2 = s0_minus_1 / s1
            omega1 = 1 / l1 + 1 / l2 - omega2
            measure = DiscreteMeasurePair(
                (x_left, x_right), (omega1, omega2), (mpf(0), mpf(0))
            )
        return MeasureSnapshot.at(measure, t)


def two_peakon_singular_mass(d: TwoPeakonData):
    """Mass of the single mu-atom at the collision time (antipeakon case)."""
    if d.case == PEAKON_PEAKON:
        return mpf(0)
    return -1 / (d.lambda1 * d.lambda2)
