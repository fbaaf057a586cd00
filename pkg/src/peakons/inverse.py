"""Inverse spectral problem: moments, Hankel determinants, reconstruction.

Given eigenvalues and norming constants with lambda * gamma^2 > 0, there is
a unique measure pair producing them.  The reconstruction goes through the
moment sequence of the Weyl function, four families of Hankel determinants,
and closed-form expressions for positions and weights.  Zeros in the
shifted determinant family signal dipoles (collision-time snapshots) and
route the affected atoms through a degenerate branch.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import log, mp, mpf, sqrt

from .core import DiscreteMeasurePair, MeasureSnapshot, SpectralData
from .errors import ConsecutiveZeros, LogDomainError, OrderingViolation
from .precision import hankel_zero_threshold, working_precision


@dataclass(frozen=True)
class MomentSequence:
    """Moments s_{-1}, s_0, ..., s_{2|sigma|+2} of the Weyl function.

    s_{-1} = 0, s_0 = 1 + sum 1/(lambda gamma^2), s_k = sum lambda^{k-1}/gamma^2.
    """

    values: tuple
    spectrum_size: int

    def s(self, k: int):
        return self.values[k + 1]


def moments(s: SpectralData) -> MomentSequence:
    size = s.size
    vals = [mpf(0)]  # s_{-1}
    vals.append(1 + sum((1 / (lam * g2) for lam, g2 in
                         zip(s.eigenvalues, s.norming_constants)), mpf(0)))
    power = [mpf(1) / g2 for g2 in s.norming_constants]
    for _ in range(1, 2 * size + 3):
        vals.append(sum(power, mpf(0)))
        power = [p * lam for p, lam in zip(power, s.eigenvalues)]
    return MomentSequence(tuple(vals), size)


# ---------------------------------------------------------------------------
# determinants


def bareiss_determinant(rows) -> mpf:
    """Fraction-free elimination with partial pivoting.

    Exact in exact arithmetic; on high-precision reals it preserves the
    near-identity structure of the badly conditioned Hankel matrices far
    better than plain LU.
    """
    n = len(rows)
    if n == 0:
        return mpf(1)
    m = [list(row) for row in rows]
    sign = 1
    prev = mpf(1)
    for k in range(n - 1):
        pivot_row = max(range(k, n), key=lambda i: abs(m[i][k]))
        if m[pivot_row][k] == 0:
            return mpf(0)
        if pivot_row != k:
            m[k], m[pivot_row] = m[pivot_row], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[k][k] * m[i][j] - m[i][k] * m[k][j]) / prev
            m[i][k] = mpf(0)
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _hankel_det(mom: MomentSequence, shift: int, k: int) -> mpf:
    if k == 0:
        return mpf(1)
    return bareiss_determinant(
        [[mom.s(shift + i + j) for j in range(k)] for i in range(k)]
    )


@dataclass(frozen=True)
class HankelTable:
    """The four determinant families for k = 0..|sigma|+1 with zero flags.

    delta0[k] > 0 for k = 1..|sigma|+1 and delta2[k] > 0 for k = 1..|sigma|;
    the delta1 row has no two consecutive zeros, delta1[|sigma|] != 0 and
    delta1[|sigma|+1] = 0.
    """

    delta_minus1: tuple
    delta0: tuple
    delta1: tuple
    delta2: tuple
    zero_flags: tuple
    spectrum_size: int


def hankel_table(mom: MomentSequence) -> HankelTable:
    size = mom.spectrum_size
    ks = range(size + 2)
    dm1 = tuple(_hankel_det(mom, -1, k) for k in ks)
    d0 = tuple(_hankel_det(mom, 0, k) for k in ks)
    d1 = tuple(_hankel_det(mom, 1, k) for k in ks)
    d2 = tuple(_hankel_det(mom, 2, k) for k in ks)

    tau = hankel_zero_threshold()
    flags = [False] * (size + 2)
    for k in range(1, size + 2):
        scale = sqrt(abs(d0[k] * d0[k + 1])) if k + 1 <= size + 1 else abs(d0[k])
        if 1 <= k <= size:
            scale = max(scale, sqrt(abs(d1[k - 1] * d1[k + 1])))
        flags[k] = abs(d1[k]) < tau * scale

    for k in range(1, size + 1):
        if d0[k] <= 0:
            raise ConsecutiveZeros(f"moment determinant of order {k} not positive")
        if d2[k] <= 0:
            raise ConsecutiveZeros(
                f"twice-shifted determinant of order {k} not positive"
            )
    if d0[size + 1] <= 0:
        raise ConsecutiveZeros("top moment determinant not positive")
    for k in range(1, size + 1):
        if flags[k] and flags[k + 1]:
            raise ConsecutiveZeros(
                f"shifted determinants of orders {k} and {k + 1} both vanish"
            )
    if size >= 1 and flags[size]:
        raise ConsecutiveZeros("terminal nonzero determinant flagged as zero")
    if not flags[size + 1]:
        raise ConsecutiveZeros("determinant beyond the spectrum size not zero")

    return HankelTable(dm1, d0, d1, d2, tuple(flags), size)


def sylvester_residuals(table: HankelTable) -> list:
    """Relative residuals of the determinant identity
    delta1[k+1] delta_minus1[k+1] - delta1[k] delta_minus1[k+2] = delta0[k+1]^2
    for k = 0..|sigma|-1 (test/verification support)."""
    out = []
    for k in range(table.spectrum_size):
        lhs = (
            table.delta1[k + 1] * table.delta_minus1[k + 1]
            - table.delta1[k] * table.delta_minus1[k + 2]
        )
        rhs = table.delta0[k + 1] ** 2
        out.append(abs(lhs - rhs) / max(abs(lhs), abs(rhs), mpf(1)))
    return out


# ---------------------------------------------------------------------------
# index map and reconstruction


@dataclass(frozen=True)
class KappaMap:
    """kappa(n) indexes the (n+1)-th nonzero member of the delta1 row,
    counting downwards from k = |sigma|; kappa_zero counts the zeros among
    k = 1..|sigma| and fixes N = |sigma| - kappa_zero."""

    values: tuple
    kappa_zero: int
    spectrum_size: int

    @property
    def n_atoms(self) -> int:
        return self.spectrum_size - self.kappa_zero

    def __call__(self, n: int) -> int:
        return self.values[n]


def kappa_map(table: HankelTable) -> KappaMap:
    size = table.spectrum_size
    nonzero = [k for k in range(size + 1) if not table.zero_flags[k]]
    kappa_zero = (size + 1) - len(nonzero)
    values = tuple(reversed(nonzero))
    return KappaMap(values, kappa_zero, size)


def _reconstruct(s: SpectralData) -> DiscreteMeasurePair:
    table = hankel_table(moments(s))
    kmap = kappa_map(table)
    d_m1, d0, d1, d2 = table.delta_minus1, table.delta0, table.delta1, table.delta2
    xs, ws, vs = [], [], []
    for n in range(1, kmap.n_atoms + 1):
        k = kmap(n)
        ratio = d0[k + 1] / d2[k]
        if not ratio > 1:
            raise LogDomainError(
                f"position ratio {ratio} <= 1 at atom {n}; precision exhausted"
            )
        xs.append(log(ratio - 1))
        base = d2[k] * (d0[k + 1] - d2[k])
        if not table.zero_flags[k + 1]:
            ws.append(base / (d1[k] * d1[k + 1]))
            vs.append(mpf(0))
        else:
            # dipole branch: the atom polynomial acquires a z^2 part
            ws.append(
                base / d0[k + 1] ** 2 * (d_m1[k + 1] / d1[k] - d_m1[k + 3] / d1[k + 2])
            )
            vs.append(-d0[k + 2] / d0[k + 1] * base / (d1[k] * d1[k + 2]))
    for a, b in zip(xs, xs[1:]):
        if not a < b:
            raise OrderingViolation(
                "reconstructed positions not strictly increasing"
            )
    return DiscreteMeasurePair(tuple(xs), tuple(ws), tuple(vs))


def reconstruct(s: SpectralData, bits: int | None = None) -> MeasureSnapshot:
    """Unique measure pair with the given spectrum and norming constants.

    Atoms whose indices hit a zero shifted determinant come out of the
    degenerate branch with upsilon_n > 0.  On a structure or log-domain
    failure (mathematically excluded, so diagnostic of precision only) the
    computation retries once at doubled precision.
    """
    try:
        with working_precision(bits):
            measure = _reconstruct(s)
    except (ConsecutiveZeros, LogDomainError):
        doubled = 2 * (bits or 0) or 2 * mp.prec
        with working_precision(doubled):
            measure = _reconstruct(s)
    return MeasureSnapshot.at(measure, s.base_time)
