"""Forward spectral analysis of a discrete measure pair.

The spectral problem is -f'' + f/4 = (z omega + z^2 upsilon) f with point
measures omega, upsilon.  Between atoms a solution is a combination of
e^{x/2} and e^{-x/2}; crossing an atom leaves f continuous and kicks the
derivative by -(z omega_n + z^2 upsilon_n) f(x_n) (left-to-right).  The
decaying solutions phi_-(z, x) = e^{x/2} near -infinity and
phi_+(z, x) = e^{-x/2} near +infinity are therefore polynomial in z at any
fixed x, and their Wronskian W is a polynomial whose zeros are exactly the
eigenvalues: all real, simple and nonzero.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import cosh, exp, mp, mpf, sign, sinh, tanh

from .core import (
    DiscreteMeasurePair,
    RealPolynomial,
    SpectralData,
    spectral_data,
)
from .errors import (
    CrossCheckFailure,
    DivisionByZeroInFraction,
    PoleHit,
    RootIsolationFailure,
)
from .precision import DEFAULT_REL_TOL, to_mpf, working_precision

_ONE = RealPolynomial.from_coefficients([1])
_HALF = RealPolynomial.from_coefficients(["0.5"])


# ---------------------------------------------------------------------------
# transfer matrices

# Propagation of (f, f') by a gap d between atoms (unimodular):
#   [[cosh(d/2), 2 sinh(d/2)], [sinh(d/2)/2, cosh(d/2)]]
# Crossing an atom left-to-right (unimodular):
#   [[1, 0], [-(z omega + z^2 upsilon), 1]]


def transfer_matrices(measure: DiscreteMeasurePair) -> list:
    """The polynomial-valued 2x2 factors of the left-to-right propagation,
    ordered as applied: jump at x_1, gap x_1->x_2, jump at x_2, ..."""
    factors = []
    for n in range(measure.n_atoms):
        w, v = measure.omega_weights[n], measure.upsilon_weights[n]
        jump = RealPolynomial.from_coefficients([0, -w, -v])
        factors.append(((_ONE, RealPolynomial.from_coefficients([0])), (jump, _ONE)))
        if n + 1 < measure.n_atoms:
            d = measure.positions[n + 1] - measure.positions[n]
            ch = RealPolynomial.from_coefficients([cosh(d / 2)])
            sh = sinh(d / 2)
            factors.append(
                (
                    (ch, RealPolynomial.from_coefficients([2 * sh])),
                    (RealPolynomial.from_coefficients([sh / 2]), ch),
                )
            )
    return factors


def matrix_determinant(factor) -> RealPolynomial:
    (a, b), (c, d) = factor
    return a * d + (-1) * (b * c)


def _propagate_polynomials(measure: DiscreteMeasurePair):
    """Propagate phi_- as a polynomial pair from x_1- to x_N+.

    Works with the normalized start (1, 1/2); the true phi_- carries an
    extra factor e^{x_1/2}.
    """
    f, fp = _ONE, _HALF
    for n in range(measure.n_atoms):
        w, v = measure.omega_weights[n], measure.upsilon_weights[n]
        jump = RealPolynomial.from_coefficients([0, w, v])
        fp = fp + (-1) * (jump * f)
        if n + 1 < measure.n_atoms:
            d = measure.positions[n + 1] - measure.positions[n]
            ch, sh = cosh(d / 2), sinh(d / 2)
            f, fp = ch * f + (2 * sh) * fp, (sh / 2) * f + ch * fp
    return f, fp


def wronskian(measure: DiscreteMeasurePair, bits: int | None = None) -> RealPolynomial:
    """Wronskian polynomial of the decaying solutions; W(0) = 1.

    degree(W) = N + (number of atoms with upsilon_n > 0), the z coefficient
    is -sum(omega) and the z^2 coefficient is fixed by the trace formulas.
    """
    with working_precision(bits):
        if measure.n_atoms == 0:
            return _ONE
        f, fp = _propagate_polynomials(measure)
        scale = exp((measure.positions[0] - measure.positions[-1]) / 2)
        w = scale * (fp + _HALF * f)
        # the constant term is 1 up to rounding of the exponentials;
        # renormalize so W(0) = 1 holds exactly
        return w.scale(1 / w.coefficients[0])


# ---------------------------------------------------------------------------
# real root isolation: Cauchy bound, interlaced bisection, Newton polish


def _horner(coeffs, x):
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def _cauchy_bound(coeffs) -> mpf:
    lead = abs(coeffs[-1])
    return 1 + max(abs(c) for c in coeffs[:-1]) / lead


def _polish_root(coeffs, dcoeffs, lo, hi, flo) -> mpf:
    """Safeguarded Newton inside a bracket with a sign change."""
    x = (lo + hi) / 2
    target = mpf(2) ** (-mp.prec + 6)
    for _ in range(mp.prec + 40):
        fx = _horner(coeffs, x)
        if fx == 0:
            return x
        if sign(fx) == sign(flo):
            lo = x
        else:
            hi = x
        dfx = _horner(dcoeffs, x)
        step_ok = False
        if dfx != 0:
            x_new = x - fx / dfx
            if lo < x_new < hi:
                step_ok = True
        if not step_ok:
            x_new = (lo + hi) / 2
        if abs(x_new - x) <= abs(x_new) * target:
            return x_new
        x = x_new
    return x


def _real_roots(coeffs) -> list:
    """All roots of a polynomial known to have only real simple roots.

    Critical points (roots of the derivative, found recursively) strictly
    interlace the roots, so the polynomial is monotone on each cell of the
    partition of the Cauchy interval by critical points and each cell
    brackets exactly one root.
    """
    degree = len(coeffs) - 1
    if degree <= 0:
        return []
    if degree == 1:
        return [-coeffs[0] / coeffs[1]]
    dcoeffs = [k * c for k, c in enumerate(coeffs)][1:]
    bound = _cauchy_bound(coeffs)
    crits = [t for t in _real_roots(dcoeffs) if -bound < t < bound]
    nodes = [-bound] + sorted(crits) + [bound]
    values = [_horner(coeffs, t) for t in nodes]
    roots = []
    for (lo, flo), (hi, fhi) in zip(zip(nodes, values), zip(nodes[1:], values[1:])):
        if flo == 0:
            raise RootIsolationFailure("root coincides with a critical point")
        if sign(flo) != sign(fhi) and fhi != 0:
            roots.append(_polish_root(coeffs, dcoeffs, lo, hi, flo))
    if len(roots) != degree:
        raise RootIsolationFailure(
            f"isolated {len(roots)} real simple roots, expected {degree}; "
            "upstream precision loss suspected"
        )
    return roots


def eigenvalues(w: RealPolynomial, bits: int | None = None) -> tuple:
    """All zeros of the Wronskian: real, simple, nonzero, sorted ascending."""
    with working_precision(bits):
        if abs(w.coefficients[0] - 1) > mpf(2) ** -20:
            raise RootIsolationFailure("Wronskian must satisfy W(0) = 1")
        roots = sorted(_real_roots(list(w.coefficients)))
        if any(r == 0 for r in roots):
            raise RootIsolationFailure("zero eigenvalue found; W(0) = 1 excludes it")
        return tuple(roots)


# ---------------------------------------------------------------------------
# decaying solutions at fixed z, norming constants


def phi_minus_at_atoms(measure: DiscreteMeasurePair, z):
    """Values of phi_-(z, .) at the atoms plus its plane-wave coefficients
    (A, B) to the right of the support: phi_- = A e^{x/2} + B e^{-x/2} there.

    A equals the Wronskian; B/A is the Weyl function.
    """
    if measure.n_atoms == 0:
        return [], (mpf(1), mpf(0))
    x1 = measure.positions[0]
    f, fp = exp(x1 / 2), exp(x1 / 2) / 2
    values = []
    for n in range(measure.n_atoms):
        values.append(f)
        coupling = z * measure.omega_weights[n] + z * z * measure.upsilon_weights[n]
        fp = fp - coupling * f
        if n + 1 < measure.n_atoms:
            d = measure.positions[n + 1] - measure.positions[n]
            ch, sh = cosh(d / 2), sinh(d / 2)
            f, fp = ch * f + 2 * sh * fp, sh / 2 * f + ch * fp
    xN = measure.positions[-1]
    a = exp(-xN / 2) * (fp + f / 2)
    b = exp(xN / 2) * (f / 2 - fp)
    return values, (a, b)


def phi_plus_at_atoms(measure: DiscreteMeasurePair, z):
    """Values of phi_+(z, .) at the atoms (right-to-left propagation from
    the exact plane wave e^{-x/2} at the right edge of the support)."""
    n_atoms = measure.n_atoms
    if n_atoms == 0:
        return []
    xN = measure.positions[-1]
    f, fp = exp(-xN / 2), -exp(-xN / 2) / 2
    values = [mpf(0)] * n_atoms
    values[-1] = f
    for n in range(n_atoms - 1, 0, -1):
        coupling = z * measure.omega_weights[n] + z * z * measure.upsilon_weights[n]
        fp = fp + coupling * f
        d = measure.positions[n - 1] - measure.positions[n]
        ch, sh = cosh(d / 2), sinh(d / 2)
        f, fp = ch * f + 2 * sh * fp, sh / 2 * f + ch * fp
        values[n - 1] = f
    return values


def norming_constants(
    measure: DiscreteMeasurePair,
    eigs,
    base_time=0,
    bits: int | None = None,
    rel_tol=DEFAULT_REL_TOL,
) -> SpectralData:
    """Norming constants gamma^2 for each eigenvalue.

    gamma^2 = sum phi_+(lambda, x_n)^2 (omega_n + 2 lambda upsilon_n).
    The redundant route -W'(lambda) = c_lambda gamma^2, with c_lambda the
    proportionality constant phi_- = c_lambda phi_+, is a mandatory
    cross-check; disagreement signals precision loss.
    """
    with working_precision(bits):
        w = wronskian(measure)
        dw = w.derivative()
        g2s = []
        for lam in eigs:
            plus = phi_plus_at_atoms(measure, lam)
            g2 = mpf(0)
            for n in range(measure.n_atoms):
                g2 += plus[n] ** 2 * (
                    measure.omega_weights[n] + 2 * lam * measure.upsilon_weights[n]
                )
            _, (_, c_lam) = phi_minus_at_atoms(measure, lam)
            if c_lam == 0:
                raise CrossCheckFailure("vanishing eigenfunction coupling constant")
            g2_alt = -dw(lam) / c_lam
            if abs(g2 - g2_alt) > mpf(rel_tol) * max(abs(g2), abs(g2_alt)):
                raise CrossCheckFailure(
                    f"norming constant routes disagree at lambda={lam}: "
                    f"{g2} vs {g2_alt}"
                )
            if not lam * g2 > 0:
                raise CrossCheckFailure(
                    f"lambda * gamma^2 <= 0 at lambda={lam}: gamma2={g2}"
                )
            g2s.append(g2)
        return spectral_data(eigs, g2s, base_time)


def forward_transform(
    measure: DiscreteMeasurePair, base_time=0, bits: int | None = None
) -> SpectralData:
    """Full forward map: measure pair -> (eigenvalues, norming constants)."""
    with working_precision(bits):
        w = wronskian(measure)
        eigs = eigenvalues(w)
        return norming_constants(measure, eigs, base_time=base_time)


# ---------------------------------------------------------------------------
# trace formulas


def trace_values(eigs) -> tuple:
    """(sum 1/lambda, sum 1/lambda^2) over the spectrum."""
    s1 = sum((1 / to_mpf(lam) for lam in eigs), mpf(0))
    s2 = sum((1 / to_mpf(lam) ** 2 for lam in eigs), mpf(0))
    return s1, s2


def measure_moments(measure: DiscreteMeasurePair) -> tuple:
    """The conserved pair (I1, I2) evaluated directly on the measure.

    I1 = sum omega_n.  I2 = integral of u d(omega) + total dipole mass,
    with u(x) = (1/2) sum omega_n e^{-|x - x_n|}; the double sum makes the
    first integral (1/2) sum_{n,k} omega_n omega_k e^{-|x_n - x_k|}.
    By the trace formulas I1 = sum 1/lambda and 2 I2 = sum 1/lambda^2.
    """
    i1 = sum(measure.omega_weights, mpf(0))
    i2 = sum(measure.upsilon_weights, mpf(0))
    xs, ws = measure.positions, measure.omega_weights
    for n in range(measure.n_atoms):
        for k in range(measure.n_atoms):
            i2 += ws[n] * ws[k] * exp(-abs(xs[n] - xs[k])) / 2
    return i1, i2


# ---------------------------------------------------------------------------
# Weyl function: spectral side and coefficient side


def weyl_partial_fraction(s: SpectralData, z):
    """M(z) = z * sum over eigenvalues of 1/(gamma^2 lambda (lambda - z))."""
    acc = mpf(0)
    for lam, g2 in zip(s.eigenvalues, s.norming_constants):
        if z == lam:
            raise PoleHit(f"z = {lam} is an eigenvalue")
        acc += 1 / (g2 * lam * (lam - z))
    return z * acc


@dataclass(frozen=True)
class ContinuedFractionCoefficients:
    """String lengths l_0..l_N and atom polynomials m_1..m_N.

    l_n = (tanh(x_{n+1}/2) - tanh(x_n/2)) / 2 with x_0 = -inf, x_{N+1} = +inf,
    so the lengths are positive and telescope to sum 1.
    m_n(z) = (z omega_n + z^2 upsilon_n) * 4 cosh^2(x_n/2).
    """

    lengths: tuple
    atom_polynomials: tuple


def continued_fraction_coefficients(
    measure: DiscreteMeasurePair,
) -> ContinuedFractionCoefficients:
    xs = measure.positions
    n_atoms = measure.n_atoms
    ts = [tanh(x / 2) for x in xs]
    bounds = [mpf(-1)] + ts + [mpf(1)]
    lengths = tuple((b - a) / 2 for a, b in zip(bounds, bounds[1:]))
    polys = []
    for n in range(n_atoms):
        c = 4 * cosh(xs[n] / 2) ** 2
        polys.append(
            RealPolynomial.from_coefficients(
                [0, measure.omega_weights[n] * c, measure.upsilon_weights[n] * c]
            )
        )
    return ContinuedFractionCoefficients(lengths, tuple(polys))


def weyl_continued_fraction(measure: DiscreteMeasurePair, z):
    """Evaluate M(z) by the finite continued fraction in the string data.

    Built bottom-up: M_0 = -1/l_0, then 1/M_n = -l_n + 1/(m_n(z) + M_{n-1});
    M(z) = 1 + M_N(z).
    """
    cf = continued_fraction_coefficients(measure)
    cur = -1 / cf.lengths[0]
    for n in range(1, measure.n_atoms + 1):
        den = cf.atom_polynomials[n - 1](z) + cur
        if den == 0:
            raise DivisionByZeroInFraction(f"intermediate pole hit at z = {z}")
        den = -cf.lengths[n] + 1 / den
        if den == 0:
            raise DivisionByZeroInFraction(f"intermediate pole hit at z = {z}")
        cur = 1 / den
    return 1 + cur


def weyl_direct(measure: DiscreteMeasurePair, z):
    """M(z) as the ratio B/A of the plane-wave coefficients of phi_- to the
    right of the support (third, independent route; test oracle)."""
    _, (a, b) = phi_minus_at_atoms(measure, z)
    if a == 0:
        raise PoleHit(f"z = {z} is an eigenvalue")
    return b / a


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class Classification:
    """Dipole/sign diagnostics tying the measure and spectral sides together.

    spectrum_size - n_atoms = eta_plus = kappa_zero, and for dipole-free
    measures the signs of the leading principal minors of the shifted moment
    matrix determine the sign of omega: all positive iff omega >= 0,
    alternating starting negative iff omega <= 0.
    """

    spectrum_size: int
    n_atoms: int
    eta_plus: int
    kappa_zero: int
    wronskian_degree: int
    omega_sign: str  # 'nonnegative' | 'nonpositive' | 'indefinite' | 'undetermined'
    delta1_signs: tuple


def _sign_pattern_class(signs) -> str:
    if all(s > 0 for s in signs):
        return "nonnegative"
    if all(s == (-1) ** (k + 1) for k, s in enumerate(signs)):
        return "nonpositive"
    return "indefinite"


def classify(obj, bits: int | None = None) -> Classification:
    """Classify a measure pair, spectral data set or Hankel table."""
    from .inverse import HankelTable, hankel_table, kappa_map, moments

    with working_precision(bits):
        if isinstance(obj, DiscreteMeasurePair):
            measure = obj
            w = wronskian(measure)
            s = forward_transform(measure)
            table = hankel_table(moments(s))
            kmap = kappa_map(table)
            eta_plus = measure.dipole_count
            if not (s.size - measure.n_atoms == eta_plus == kmap.kappa_zero):
                raise CrossCheckFailure(
                    "dipole count, spectral excess and Hankel zero count disagree"
                )
            signs = tuple(
                0 if table.zero_flags[k] else int(sign(table.delta1[k]))
                for k in range(1, s.size + 1)
            )
            if eta_plus == 0:
                if all(v == 0 for v in measure.upsilon_weights) and measure.n_atoms:
                    if all(x > 0 for x in measure.omega_weights):
                        expected = "nonnegative"
                    elif all(x < 0 for x in measure.omega_weights):
                        expected = "nonpositive"
                    else:
                        expected = "indefinite"
                    got = _sign_pattern_class(signs)
                    if got != expected:
                        raise CrossCheckFailure(
                            f"sign pattern {signs} inconsistent with {expected} weights"
                        )
                omega_sign = _sign_pattern_class(signs) if measure.n_atoms else "nonnegative"
            else:
                omega_sign = "undetermined"
            return Classification(
                s.size,
                measure.n_atoms,
                eta_plus,
                kmap.kappa_zero,
                w.degree,
                omega_sign,
                signs,
            )

        if isinstance(obj, SpectralData):
            table = hankel_table(moments(obj))
        elif isinstance(obj, HankelTable):
            table = obj
        else:
            raise TypeError(f"cannot classify {type(obj).__name__}")
        kmap = kappa_map(table)
        size = table.spectrum_size
        signs = tuple(
            0 if table.zero_flags[k] else int(sign(table.delta1[k]))
            for k in range(1, size + 1)
        )
        omega_sign = (
            _sign_pattern_class(signs) if kmap.kappa_zero == 0 else "undetermined"
        )
        return Classification(
            size,
            kmap.n_atoms,
            kmap.kappa_zero,
            kmap.kappa_zero,
            size,
            omega_sign,
            signs,
        )


# ---------------------------------------------------------------------------
# integral-equation route (test oracle)


def phi_minus_integral_equation(measure: DiscreteMeasurePair, z):
    """phi_- at the atoms via the equivalent Volterra-type sum.

    phi_-(z, x_n) = e^{x_n/2} + sum over atoms strictly left of x_n of
    (e^{-(x_n - x_j)/2} - e^{(x_n - x_j)/2}) (z omega_j + z^2 upsilon_j)
    phi_-(z, x_j).  Independent of the transfer-matrix propagation.
    """
    xs = measure.positions
    values = []
    for n in range(measure.n_atoms):
        acc = exp(xs[n] / 2)
        for j in range(n):
            kernel = exp(-(xs[n] - xs[j]) / 2) - exp((xs[n] - xs[j]) / 2)
            coupling = z * measure.omega_weights[j] + z * z * measure.upsilon_weights[j]
            acc += kernel * coupling * values[j]
        values.append(acc)
    return values
