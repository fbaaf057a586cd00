"""Time evolution of spectral data and collision-time location.

The flow is isospectral; each norming constant scales exponentially,
gamma^2(t) = e^{-(t - t0)/(2 lambda)} gamma^2(t0).  Collision times are the
zeros of the shifted Hankel determinants delta1[k](t), each of which is a
finite sum of real exponentials over the k-element subsets of the spectrum,
so the zero set is finite and can be enclosed constructively.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from mpmath import exp, mp, mpf, sign

from .core import MeasureSnapshot, SpectralData, spectral_data
from .errors import WindowDerivationFailure
from .inverse import reconstruct
from .precision import hankel_zero_threshold, to_mpf, working_precision

# subset enumeration cost C(|sigma|, k) stays desk-scale below this
MAX_SPECTRUM_FOR_SUBSETS = 16


def evolve_spectral(s: SpectralData, t, bits: int | None = None) -> SpectralData:
    """Rebase the spectral data at time t; eigenvalues are unchanged."""
    with working_precision(bits):
        t = to_mpf(t)
        dt = t - s.base_time
        g2s = [
            g2 * exp(-dt / (2 * lam))
            for lam, g2 in zip(s.eigenvalues, s.norming_constants)
        ]
        return spectral_data(s.eigenvalues, g2s, t)


def conserved_quantities(s: SpectralData) -> tuple:
    """(I1, I2) = (sum 1/lambda, half of sum 1/lambda^2): time independent."""
    i1 = sum((1 / lam for lam in s.eigenvalues), mpf(0))
    i2 = sum((1 / lam**2 for lam in s.eigenvalues), mpf(0)) / 2
    return i1, i2


def solve_at(s: SpectralData, t, bits: int | None = None) -> MeasureSnapshot:
    """Measure pair of the conservative solution at time t."""
    return reconstruct(evolve_spectral(s, t, bits=bits), bits=bits)


# ---------------------------------------------------------------------------
# exponential sums for the shifted Hankel determinants


@dataclass(frozen=True)
class ExponentialSum:
    """f(t) = sum of coeff * e^{rate (t - base_time)} with real data."""

    base_time: mpf
    terms: tuple  # ((coeff, rate), ...)

    def __call__(self, t):
        tau = to_mpf(t) - self.base_time
        return sum((c * exp(r * tau) for c, r in self.terms), mpf(0))

    def derivative(self) -> "ExponentialSum":
        return ExponentialSum(
            self.base_time, tuple((c * r, r) for c, r in self.terms if r != 0)
        )


def delta1_exponential_sum(s: SpectralData, k: int) -> ExponentialSum:
    """Closed form of t -> delta1[k](t) for the evolving spectral data.

    By Cauchy-Binet the k-th shifted Hankel determinant of the moments is a
    sum over k-element subsets J of the spectrum of (Lambda_J / Gamma_J)
    e^{(t - t0) Sigma_J}, with Lambda_J the squared Vandermonde of J,
    Gamma_J the product of norming constants at t0, and Sigma_J the sum of
    1/(2 lambda) over J.
    """
    size = s.size
    if not 1 <= k <= size:
        raise ValueError(f"need 1 <= k <= {size}, got {k}")
    if size > MAX_SPECTRUM_FOR_SUBSETS:
        raise ValueError(f"subset enumeration capped at |sigma| = {MAX_SPECTRUM_FOR_SUBSETS}")
    terms = []
    for subset in combinations(range(size), k):
        lams = [s.eigenvalues[i] for i in subset]
        vandermonde_sq = mpf(1)
        for a in range(k):
            for b in range(a + 1, k):
                vandermonde_sq *= (lams[a] - lams[b]) ** 2
        gamma_prod = mpf(1)
        for i in subset:
            gamma_prod *= s.norming_constants[i]
        rate = sum((1 / (2 * lam) for lam in lams), mpf(0))
        terms.append((vandermonde_sq / gamma_prod, rate))
    return ExponentialSum(s.base_time, tuple(terms))


# ---------------------------------------------------------------------------
# real zeros of exponential sums


def _group_terms(terms):
    """Merge exactly equal rates (symmetric spectra produce exact ties) and
    drop cancelled groups; returns (coeff, rate) sorted by rate."""
    groups = {}
    for c, r in terms:
        groups[r] = groups.get(r, mpf(0)) + c
    merged = sorted(((c, r) for r, c in groups.items() if c != 0), key=lambda t: t[1])
    return merged


def dominance_window(terms) -> tuple:
    """Interval [lo, hi] in t - base_time outside which a single extreme-rate
    term provably exceeds the sum of all the others (triangle inequality),
    so all real zeros lie inside."""
    groups = _group_terms(terms)
    if not groups:
        raise WindowDerivationFailure(
            "every rate group cancelled; the sum vanishes identically"
        )
    if len(groups) == 1:
        return mpf(0), mpf(0)
    m = len(groups)
    c_lo, r_lo = groups[0]
    c_hi, r_hi = groups[-1]
    hi = mpf(0)
    lo = mpf(0)
    for c, r in groups:
        if r < r_hi:
            hi = max(hi, (mp.log((m - 1) * abs(c)) - mp.log(abs(c_hi))) / (r_hi - r))
        if r > r_lo:
            lo = min(lo, (mp.log(abs(c_lo)) - mp.log((m - 1) * abs(c))) / (r - r_lo))
    pad = max(mpf(1), (hi - lo) / 100)
    return lo - pad, hi + pad


def _refine_zero(f, df, lo, hi, flo):
    x = (lo + hi) / 2
    target = mpf(2) ** (-mp.prec + 6)
    for _ in range(mp.prec + 40):
        fx = f(x)
        if fx == 0:
            return x
        if sign(fx) == sign(flo):
            lo = x
        else:
            hi = x
        dfx = df(x)
        x_new = x - fx / dfx if dfx != 0 else (lo + hi) / 2
        if not lo < x_new < hi:
            x_new = (lo + hi) / 2
        if abs(x_new - x) <= max(abs(x_new), mpf(1)) * target:
            return x_new
        x = x_new
    return x


def _exp_sum_zeros_in(groups, lo, hi, tangencies):
    """All zeros in [lo, hi] of sum c e^{r tau}, tau relative time.

    Factoring out the lowest rate leaves a constant plus positive-rate
    terms; the derivative of that has one fewer group, so recursion yields
    the critical points and the sum is monotone between them.  Tangential
    near-zeros at critical points (double roots) are recorded separately.
    """
    m = len(groups)
    if m <= 1:
        return []
    r_min = groups[0][1]
    shifted = [(c, r - r_min) for c, r in groups]

    def f(tau):
        return sum((c * exp(r * tau) for c, r in shifted), mpf(0))

    def df(tau):
        return sum((c * r * exp(r * tau) for c, r in shifted if r != 0), mpf(0))

    deriv_groups = _group_terms([(c * r, r) for c, r in shifted if r != 0])
    crits = _exp_sum_zeros_in(deriv_groups, lo, hi, []) if len(deriv_groups) > 1 else []

    tau_zero = hankel_zero_threshold()
    nodes = [lo] + crits + [hi]
    values = [f(x) for x in nodes]
    zeros = []
    for (a, fa), (b, fb) in zip(zip(nodes, values), zip(nodes[1:], values[1:])):
        if fa == 0:
            if not zeros or zeros[-1] != a:
                zeros.append(a)
            continue
        if sign(fa) != sign(fb) and fb != 0:
            zeros.append(_refine_zero(f, df, a, b, fa))
    # a critical point with |f| below threshold is a tangency (double root)
    for c, fc in zip(nodes[1:-1], values[1:-1]):
        scale = sum((abs(cf) * exp(r * c) for cf, r in shifted), mpf(0))
        if fc != 0 and abs(fc) < tau_zero * scale and (not zeros or all(abs(c - z) > tau_zero for z in zeros)):
            tangencies.append(c)
    return zeros


def exponential_sum_zeros(es: ExponentialSum, window=None, bits: int | None = None):
    """All real zeros of the sum, plus tangential near-zeros, as absolute
    times; the scan window is derived from term dominance when not given."""
    with working_precision(bits):
        groups = _group_terms(es.terms)
        if not groups:
            raise WindowDerivationFailure(
                "every rate group cancelled; the sum vanishes identically"
            )
        if len(groups) == 1:
            return [], [], (es.base_time, es.base_time)
        if window is None:
            lo, hi = dominance_window(es.terms)
        else:
            lo, hi = to_mpf(window[0]) - es.base_time, to_mpf(window[1]) - es.base_time
        tangencies = []
        zeros = _exp_sum_zeros_in(groups, lo, hi, tangencies)
        return (
            [es.base_time + z for z in zeros],
            [es.base_time + c for c in tangencies],
            (es.base_time + lo, es.base_time + hi),
        )


# ---------------------------------------------------------------------------
# collision report


@dataclass(frozen=True)
class CollisionEvent:
    time: mpf
    vanishing_orders: tuple  # k with delta1[k](time) = 0
    snapshot: MeasureSnapshot
    tangential: bool = False


@dataclass(frozen=True)
class CollisionReport:
    times: tuple
    events: tuple
    window: tuple


def collision_times(
    s: SpectralData, window=None, bits: int | None = None
) -> CollisionReport:
    """All times at which the evolving solution carries a dipole.

    Collisions happen exactly when some delta1[k](t) vanishes for
    k = 1..|sigma|-1 (the k = |sigma| determinant never does).  Each zero
    set is finite; zeros from different k are merged when they coincide to
    working precision.
    """
    with working_precision(bits):
        found = {}  # time -> (set of k, tangential)
        w_lo, w_hi = None, None
        for k in range(1, s.size):
            es = delta1_exponential_sum(s, k)
            zeros, tangs, (lo, hi) = exponential_sum_zeros(es, window=window)
            w_lo = lo if w_lo is None else min(w_lo, lo)
            w_hi = hi if w_hi is None else max(w_hi, hi)
            for t, tang in [(z, False) for z in zeros] + [(c, True) for c in tangs]:
                merged = False
                for t0 in found:
                    if abs(t - t0) <= mpf(2) ** (-mp.prec // 2) * max(1, abs(t0)):
                        found[t0][0].add(k)
                        found[t0][1] = found[t0][1] or tang
                        merged = True
                        break
                if not merged:
                    found[t] = [{k}, tang]
        times = tuple(sorted(found))
        events = tuple(
            CollisionEvent(
                t, tuple(sorted(found[t][0])), solve_at(s, t), found[t][1]
            )
            for t in times
        )
        if w_lo is None:
            w_lo = w_hi = s.base_time
        return CollisionReport(times, events, (w_lo, w_hi))
