"""Working-precision plumbing shared by all numerical modules.

Everything downstream of the Hankel determinant tables is severely
ill-conditioned in double precision, so all scalar work runs on mpmath
reals at a configurable binary precision (default 200 bits).  Cross-check
tolerances are calibrated against that default and scale with it.
"""

from __future__ import annotations

import contextlib

from mpmath import mp, mpf, nstr

DEFAULT_PRECISION_BITS = 200
DEFAULT_REL_TOL = 1e-9

# Significant digits emitted by the CLI / document writers.
OUTPUT_DIGITS = 25


@contextlib.contextmanager
def working_precision(bits: int | None = None):
    """Scope mpmath's binary working precision.  Nestable."""
    with mp.workprec(bits or DEFAULT_PRECISION_BITS):
        yield mp


def to_mpf(value) -> mpf:
    """Convert to an mpmath real.

    ints and floats convert exactly; strings are rounded at the current
    working precision, so parse documents inside a precision scope.
    """
    if isinstance(value, bool) or value is None:
        raise TypeError(f"not a real number: {value!r}")
    return mpf(value)


def hankel_zero_threshold() -> mpf:
    """Relative threshold below which a Hankel determinant counts as zero.

    The inverse-problem dichotomy is exact-zero versus nonzero; numerically
    a near-zero determinant means a near-collision.  With P decimal digits
    of working precision the cutoff is 10^(-0.4 P): far above roundoff
    (10^-P) and far below any generically nonzero determinant.
    """
    return mpf(10) ** (-mpf(2) / 5 * mp.dps)


def isclose(a, b, rel_tol=DEFAULT_REL_TOL, abs_tol=0) -> bool:
    a, b = mpf(a), mpf(b)
    return abs(a - b) <= max(mpf(rel_tol) * max(abs(a), abs(b)), mpf(abs_tol))


def rel_residual(a, b) -> mpf:
    """|a - b| / max(|a|, |b|, 1): relative gap with an absolute floor."""
    a, b = mpf(a), mpf(b)
    return abs(a - b) / max(abs(a), abs(b), mpf(1))


def fmt(x, digits: int = OUTPUT_DIGITS) -> str:
    """Render a real with at most `digits` significant digits.

    Deterministic for fixed input and precision, which keeps output files
    byte-stable.
    """
    return nstr(mpf(x), digits, strip_zeros=True)
