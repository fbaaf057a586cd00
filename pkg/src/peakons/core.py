"""Shared domain types and the bridge between the PDE and spectral pictures.

The PDE side works with peak heights p_n at positions q_n; the spectral
side works with a pair of finite discrete measures: signed point weights
omega_n and non-negative dipole weights upsilon_n on the same support.
The two are related by omega_n = 2 p_n, x_n = q_n (and upsilon = 0 away
from collision times).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from mpmath import mpf

from .errors import (
    DipolePresent,
    DocumentFormatError,
    InvalidSpectralData,
    NegativeDipole,
    NonIncreasingPositions,
    NullAtom,
)
from .precision import fmt, to_mpf


# ---------------------------------------------------------------------------
# dense real polynomials


@dataclass(frozen=True)
class RealPolynomial:
    """Dense real-coefficient polynomial, constant term first.

    Trailing zero coefficients are stripped on construction; the zero
    polynomial is represented by the single coefficient 0.
    """

    coefficients: tuple

    @staticmethod
    def from_coefficients(coeffs) -> "RealPolynomial":
        cs = [to_mpf(c) for c in coeffs] or [mpf(0)]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        return RealPolynomial(tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, z):
        acc = self.coefficients[-1]
        for c in reversed(self.coefficients[:-1]):
            acc = acc * z + c
        return acc

    def derivative(self) -> "RealPolynomial":
        cs = [k * c for k, c in enumerate(self.coefficients)][1:]
        return RealPolynomial.from_coefficients(cs)

    def __add__(self, other: "RealPolynomial") -> "RealPolynomial":
        a, b = self.coefficients, other.coefficients
        if len(a) < len(b):
            a, b = b, a
        cs = list(a)
        for i, c in enumerate(b):
            cs[i] += c
        return RealPolynomial.from_coefficients(cs)

    def __mul__(self, other):
        if isinstance(other, RealPolynomial):
            a, b = self.coefficients, other.coefficients
            cs = [mpf(0)] * (len(a) + len(b) - 1)
            for i, ai in enumerate(a):
                for j, bj in enumerate(b):
                    cs[i + j] += ai * bj
            return RealPolynomial.from_coefficients(cs)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, factor) -> "RealPolynomial":
        factor = to_mpf(factor)
        return RealPolynomial.from_coefficients(
            [factor * c for c in self.coefficients]
        )


# ---------------------------------------------------------------------------
# measures and peakon states


@dataclass(frozen=True)
class DiscreteMeasurePair:
    """Positions with signed weights omega_n and dipole weights upsilon_n.

    Invariants: positions strictly increasing, upsilon_n >= 0,
    |omega_n| + upsilon_n > 0.  N = 0 (the zero measure) is allowed.
    """

    positions: tuple
    omega_weights: tuple
    upsilon_weights: tuple

    def __post_init__(self):
        n = len(self.positions)
        if len(self.omega_weights) != n or len(self.upsilon_weights) != n:
            raise NullAtom("positions and weights must have equal lengths")
        for a, b in zip(self.positions, self.positions[1:]):
            if not a < b:
                raise NonIncreasingPositions(
                    f"positions must be strictly increasing, got {a} >= {b}"
                )
        for x, w, v in zip(self.positions, self.omega_weights, self.upsilon_weights):
            if v < 0:
                raise NegativeDipole(f"upsilon < 0 at x = {x}")
            if abs(w) + v == 0:
                raise NullAtom(f"|omega| + upsilon = 0 at x = {x}")

    @property
    def n_atoms(self) -> int:
        return len(self.positions)

    @property
    def dipole_count(self) -> int:
        return sum(1 for v in self.upsilon_weights if v > 0)


def validate_measure(positions, omega_weights, upsilon_weights=None) -> DiscreteMeasurePair:
    """Validate raw sequences into a measure pair.

    Input order must already be strictly increasing; nothing is sorted.
    """
    if isinstance(positions, DiscreteMeasurePair):
        return positions
    xs = tuple(to_mpf(x) for x in positions)
    ws = tuple(to_mpf(w) for w in omega_weights)
    if upsilon_weights is None:
        upsilon_weights = [0] * len(xs)
    vs = tuple(to_mpf(v) for v in upsilon_weights)
    return DiscreteMeasurePair(xs, ws, vs)


ZERO_MEASURE = validate_measure([], [], [])


@dataclass(frozen=True)
class PeakonState:
    """Heights p_n and positions q_n of the classical peakon system."""

    heights: tuple
    positions: tuple
    time: mpf = field(default_factory=lambda: mpf(0))

    def __post_init__(self):
        if len(self.heights) != len(self.positions):
            raise NullAtom("heights and positions must have equal lengths")
        for a, b in zip(self.positions, self.positions[1:]):
            if not a < b:
                raise NonIncreasingPositions(
                    f"positions must be strictly increasing, got {a} >= {b}"
                )

    @property
    def n_peaks(self) -> int:
        return len(self.heights)


def peakon_state(heights, positions, time=0) -> PeakonState:
    return PeakonState(
        tuple(to_mpf(p) for p in heights),
        tuple(to_mpf(q) for q in positions),
        to_mpf(time),
    )


def peakons_to_measure(state: PeakonState) -> DiscreteMeasurePair:
    """omega_n = 2 p_n, x_n = q_n, upsilon = 0 (exact bijection)."""
    for p in state.heights:
        if p == 0:
            raise NullAtom("peakon heights must be nonzero")
    return DiscreteMeasurePair(
        tuple(state.positions),
        tuple(2 * p for p in state.heights),
        tuple(mpf(0) for _ in state.heights),
    )


def measure_to_peakons(measure: DiscreteMeasurePair, time=0) -> PeakonState:
    """Inverse of peakons_to_measure; requires a dipole-free measure."""
    if any(v > 0 for v in measure.upsilon_weights):
        raise DipolePresent(
            "measure carries dipole mass; no classical peakon representation"
        )
    return PeakonState(
        tuple(w / 2 for w in measure.omega_weights),
        tuple(measure.positions),
        to_mpf(time),
    )


@dataclass(frozen=True)
class MeasureSnapshot:
    """A measure pair attached to a time; flags collision-time snapshots."""

    measure: DiscreteMeasurePair
    time: mpf
    is_collision_time: bool

    def __post_init__(self):
        if self.is_collision_time != (self.measure.dipole_count > 0):
            raise ValueError("is_collision_time must match dipole content")

    @staticmethod
    def at(measure: DiscreteMeasurePair, time) -> "MeasureSnapshot":
        return MeasureSnapshot(measure, to_mpf(time), measure.dipole_count > 0)


# ---------------------------------------------------------------------------
# spectral data


@dataclass(frozen=True)
class SpectralData:
    """Distinct real nonzero eigenvalues with norming constants.

    Each pair must satisfy lambda * gamma^2 > 0.  base_time is the time
    at which the norming constants are taken.
    """

    eigenvalues: tuple
    norming_constants: tuple
    base_time: mpf = field(default_factory=lambda: mpf(0))

    def __post_init__(self):
        if len(self.eigenvalues) != len(self.norming_constants):
            raise InvalidSpectralData("eigenvalues/norming length mismatch")
        for a, b in zip(self.eigenvalues, self.eigenvalues[1:]):
            if not a < b:
                raise InvalidSpectralData("eigenvalues must be sorted and distinct")
        for lam, g2 in zip(self.eigenvalues, self.norming_constants):
            if lam == 0:
                raise InvalidSpectralData("zero eigenvalue")
            if not lam * g2 > 0:
                raise InvalidSpectralData(
                    f"lambda * gamma^2 must be positive, got lambda={lam}, gamma2={g2}"
                )

    @property
    def size(self) -> int:
        return len(self.eigenvalues)


def spectral_data(eigenvalues, norming_constants, base_time=0) -> SpectralData:
    """Validate and sort eigenvalue/norming pairs into SpectralData."""
    pairs = sorted(
        (to_mpf(lam), to_mpf(g2))
        for lam, g2 in zip(eigenvalues, norming_constants, strict=True)
    )
    return SpectralData(
        tuple(lam for lam, _ in pairs),
        tuple(g2 for _, g2 in pairs),
        to_mpf(base_time),
    )


EMPTY_SPECTRUM = SpectralData((), (), mpf(0))


# ---------------------------------------------------------------------------
# JSON problem documents
#
# {"t0": <number>, "peaks": [{"x": ..., "omega": ..., "upsilon": ...}, ...]}
# {"t0": <number>, "spectrum": [{"lambda": ..., "gamma2": ...}, ...]}
#
# Numbers may be JSON numbers or decimal strings (for >17 digit inputs).


def measure_from_document(doc: dict) -> tuple[DiscreteMeasurePair, mpf]:
    try:
        t0 = to_mpf(doc.get("t0", 0))
        peaks = doc["peaks"]
        xs = [to_mpf(p["x"]) for p in peaks]
        ws = [to_mpf(p["omega"]) for p in peaks]
        vs = [to_mpf(p.get("upsilon", 0)) for p in peaks]
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentFormatError(f"bad peaks document: {exc}") from exc
    return validate_measure(xs, ws, vs), t0


def spectral_from_document(doc: dict) -> SpectralData:
    try:
        t0 = to_mpf(doc.get("t0", 0))
        entries = doc["spectrum"]
        lams = [to_mpf(e["lambda"]) for e in entries]
        g2s = [to_mpf(e["gamma2"]) for e in entries]
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentFormatError(f"bad spectrum document: {exc}") from exc
    return spectral_data(lams, g2s, t0)


def parse_document(doc) -> tuple[str, object]:
    """Return ("peaks", (measure, t0)) or ("spectrum", SpectralData)."""
    if not isinstance(doc, dict):
        raise DocumentFormatError("document must be a JSON object")
    if "peaks" in doc:
        return "peaks", measure_from_document(doc)
    if "spectrum" in doc:
        return "spectrum", spectral_from_document(doc)
    raise DocumentFormatError('document needs a "peaks" or "spectrum" key')


def measure_document(measure: DiscreteMeasurePair, t0) -> dict:
    return {
        "t0": to_mpf(t0),
        "is_collision": measure.dipole_count > 0,
        "peaks": [
            {"x": x, "omega": w, "upsilon": v}
            for x, w, v in zip(
                measure.positions, measure.omega_weights, measure.upsilon_weights
            )
        ],
    }


def spectral_document(s: SpectralData) -> dict:
    return {
        "t0": s.base_time,
        "spectrum": [
            {"lambda": lam, "gamma2": g2}
            for lam, g2 in zip(s.eigenvalues, s.norming_constants)
        ],
    }


def dump_json(obj, digits=None) -> str:
    """Serialize a document, rendering mpmath reals at output precision.

    Deterministic (insertion-ordered dicts, fixed float rendering) so that
    output files are byte-stable for fixed input and precision.
    """
    pieces = []
    _dump(obj, pieces, digits)
    return "".join(pieces)


def _dump(obj, out: list, digits):
    if isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(f'"{k}": ')
            _dump(v, out, digits)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _dump(v, out, digits)
        out.append("]")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif obj is None:
        out.append("null")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, str):
        out.append('"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"')
    else:
        out.append(fmt(obj) if digits is None else fmt(obj, digits))
