"""Real-root counting for univariate polynomials.

Closed-form sign rules for monic cubics (count and sign of the real roots) and
monic quartics (number of real roots), an exact-arithmetic Sturm sequence, and a
companion-matrix eigenvalue oracle.

Band tests on the sign quantities of a monic polynomial ``x^k + a1 x^(k-1) + ...``
use the root scale ``s = max_i |a_i|**(1/i)`` and the weighted degree of the
quantity (``a_i`` has weight ``i``), so the band is invariant under ``x -> t x``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from homportrait.core import HomPortraitError, in_band

#: imaginary-part threshold for calling an eigenvalue real
TAU_IM = 1e-8
#: relative separation below which two real roots count as coincident
ROOT_SEPARATION = 1e-8


class NonSquarefree(HomPortraitError):
    """gcd(p, p') has positive degree."""


class DegenerateSigns(HomPortraitError):
    """A quantity gating a closed-form root rule lies in the band."""


@dataclass(frozen=True)
class Poly:
    """Real polynomial, coefficients lowest degree first."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @classmethod
    def from_descending(cls, coeffs: Sequence[float]) -> "Poly":
        return cls(tuple(reversed(list(coeffs))))

    def trimmed(self, tol: float = 0.0) -> "Poly":
        c = list(self.coeffs)
        while c and abs(c[-1]) <= tol:
            c.pop()
        return Poly(tuple(c))

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    @property
    def degree(self) -> int:
        """Degree after dropping exact zero leading terms; -1 for the zero polynomial."""
        return len(self.trimmed().coeffs) - 1

    @property
    def lead(self) -> float:
        t = self.trimmed().coeffs
        return t[-1] if t else 0.0

    @property
    def scale(self) -> float:
        return max((abs(c) for c in self.coeffs), default=0.0)

    def __call__(self, x):
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "Poly":
        return Poly(tuple(k * c for k, c in enumerate(self.coeffs) if k > 0))

    def monic(self) -> "Poly":
        t = self.trimmed()
        if t.is_zero:
            raise ValueError("zero polynomial has no monic form")
        return Poly(tuple(c / t.lead for c in t.coeffs))


def root_scale(*monic_coeffs) -> np.ndarray:
    """``max_i |a_i|**(1/i)`` for the non-leading coefficients ``a_1, a_2, ...``."""
    parts = [np.abs(np.asarray(a, dtype=float)) ** (1.0 / (i + 1)) for i, a in enumerate(monic_coeffs)]
    return np.maximum.reduce(parts)


# --------------------------------------------------------------------------- Sturm


def _exact(p: Poly) -> list[Fraction]:
    c = [Fraction(x) for x in p.coeffs]
    while c and c[-1] == 0:
        c.pop()
    return c


def _remainder(num: list[Fraction], den: list[Fraction]) -> list[Fraction]:
    r = list(num)
    dd = len(den) - 1
    for k in range(len(r) - 1, dd - 1, -1):
        q = r[k] / den[-1]
        for i in range(dd + 1):
            r[k - dd + i] -= q * den[i]
    r = r[:dd]
    while r and r[-1] == 0:
        r.pop()
    return r


def _exact_sturm(p: Poly) -> list[list[Fraction]]:
    # float inputs are exact rationals, so this sequence has no rounding at all
    c = _exact(p)
    if len(c) < 2:
        raise ValueError("Sturm sequence needs a polynomial of degree >= 1")
    seq = [c, [k * x for k, x in enumerate(c)][1:]]
    while len(seq[-1]) > 1:
        rem = [-x for x in _remainder(seq[-2], seq[-1])]
        if not rem:
            raise NonSquarefree(f"repeated roots: gcd has degree {len(seq[-1]) - 1}")
        lead = abs(rem[-1])
        seq.append([x / lead for x in rem])
    return seq


def sturm_sequence(p: Poly) -> list[Poly]:
    """Sturm sequence ``p, p', -rem(p, p'), ...`` with remainders scaled to ``|lead| = 1``.

    Computed in exact rational arithmetic on the (exactly representable) float
    coefficients. Raises NonSquarefree when a remainder vanishes before a
    nonzero constant is reached.
    """
    return [Poly(tuple(float(x) for x in q)) for q in _exact_sturm(p)]


def _sign_changes(values) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def _signs_at(seq: list[list[Fraction]], x: float) -> list:
    if math.isinf(x):
        return [q[-1] * (1 if x > 0 or (len(q) - 1) % 2 == 0 else -1) for q in seq]
    xf = Fraction(x)
    out = []
    for q in seq:
        acc = Fraction(0)
        for c in reversed(q):
            acc = acc * xf + c
        out.append(acc)
    return out


def sturm_count(p: Poly, lo: float = -math.inf, hi: float = math.inf) -> int:
    """Number of distinct real roots of ``p`` in the open interval ``(lo, hi)``."""
    p = p.trimmed()
    if p.is_zero:
        raise ValueError("zero polynomial")
    if p.degree == 0:
        return 0
    seq = _exact_sturm(p)
    for x in (lo, hi):
        if not math.isinf(x) and _signs_at(seq[:1], x)[0] == 0:
            raise ValueError(f"p vanishes at interval endpoint {x}")
    return _sign_changes(_signs_at(seq, lo)) - _sign_changes(_signs_at(seq, hi))


# --------------------------------------------------------------------------- oracle


def _companion(desc: np.ndarray) -> np.ndarray:
    """Companion matrices for a stack of descending coefficient rows (leading != 0)."""
    desc = np.atleast_2d(np.asarray(desc, dtype=float))
    m, k1 = desc.shape
    k = k1 - 1
    comp = np.zeros((m, k, k))
    comp[:, 0, :] = -desc[:, 1:] / desc[:, :1]
    if k > 1:
        idx = np.arange(k - 1)
        comp[:, idx + 1, idx] = 1.0
    return comp


def companion_roots(p: Poly) -> np.ndarray:
    """All complex roots of ``p`` as eigenvalues of its companion matrix.

    LAPACK's general eigensolver balances the matrix before the QR iteration.
    """
    p = p.trimmed()
    if p.degree < 1:
        raise ValueError("companion_roots needs degree >= 1")
    desc = np.array(p.coeffs[::-1])
    if p.degree == 1:
        return np.array([-desc[1] / desc[0]], dtype=complex)
    return np.linalg.eigvals(_companion(desc)[0])


def is_real_root(z, tau: float = TAU_IM):
    z = np.asarray(z)
    return np.abs(z.imag) < tau * (1 + np.abs(z.real))


def real_roots(p: Poly, tau: float = TAU_IM) -> np.ndarray:
    """Sorted real roots of ``p`` according to the companion oracle."""
    z = companion_roots(p)
    return np.sort(z[is_real_root(z, tau)].real)


def real_roots_batch(desc: np.ndarray, tau: float = TAU_IM) -> tuple[np.ndarray, np.ndarray]:
    """Real roots for a stack of polynomials of equal degree.

    Returns ``(roots, mask)``: ``roots`` is ``(m, k)`` sorted ascending with
    non-real entries set to ``+inf``; ``mask`` marks the real ones.
    """
    desc = np.atleast_2d(np.asarray(desc, dtype=float))
    m, k1 = desc.shape
    if m == 0:
        return np.zeros((0, k1 - 1)), np.zeros((0, k1 - 1), bool)
    if k1 == 3:
        a, b, c = desc.T
        disc = b * b - 4 * a * c
        sq = np.sqrt(np.maximum(disc, 0.0))
        # cancellation-free pair of quadratic roots
        qq = -0.5 * (b + np.copysign(sq, b))
        with np.errstate(divide="ignore", invalid="ignore"):
            r1 = qq / a
            r2 = np.where(qq != 0, c / qq, 0.0)
        roots = np.sort(np.stack([r1, r2], axis=1), axis=1)
        mask = np.repeat((disc > 0)[:, None], 2, axis=1)
        return np.where(mask, roots, np.inf), mask
    z = np.linalg.eigvals(_companion(desc))
    mask = is_real_root(z, tau)
    vals = np.where(mask, z.real, np.inf)
    order = np.argsort(vals, axis=1)
    return np.take_along_axis(vals, order, 1), np.take_along_axis(mask, order, 1)


# --------------------------------------------------------------------------- sign rules


@dataclass(frozen=True)
class RealRootProfile:
    n_negative: int
    n_zero: int
    n_positive: int
    distinct: bool
    witnesses: dict

    @property
    def n_real(self) -> int:
        return self.n_negative + self.n_zero + self.n_positive


def cubic_quantities(a, b, c):
    """``(c2, d2, d3)`` for ``x^3 + a x^2 + b x + c``; ``d3`` is the discriminant."""
    c2 = a * b - 9 * c
    d2 = a * a - 3 * b
    d3 = -27 * c * c + 18 * a * b * c - 4 * a**3 * c + a * a * b * b - 4 * b**3
    return c2, d2, d3


def cubic_signature_batch(a, b, c):
    """Vectorised cubic sign rule.

    Returns ``(n_negative, n_positive, ok)``; rows with ``ok == False`` had a
    gating quantity in the band and carry meaningless counts.
    """
    a, b, c = (np.asarray(v, dtype=float) for v in (a, b, c))
    with np.errstate(all="ignore"):
        c2, d2, d3 = cubic_quantities(a, b, c)
        s = root_scale(a, b, c)
        # only the quantities read by the branch taken are gated; a and d2 never decide a case
        three = d3 > 0
        ok = ~(in_band(c, s, 3) | in_band(d3, s, 6) | (three & (in_band(c2, s, 3) | in_band(b, s, 2))))
        ok &= np.isfinite(c2) & np.isfinite(d3)
    one = d3 < 0
    cpos, bpos, c2pos = c > 0, b > 0, c2 > 0
    # three real roots: cases split on c, then c2, then b
    neg3 = np.where(
        cpos,
        np.where(c2pos & bpos, 3, 1),
        np.where(c2pos | ~bpos, 2, 0),
    )
    n_neg = np.where(one, np.where(cpos, 1, 0), neg3)
    n_pos = np.where(one, np.where(cpos, 0, 1), 3 - neg3)
    return n_neg.astype(np.int64), n_pos.astype(np.int64), ok


def cubic_signature(a: float, b: float, c: float) -> RealRootProfile:
    """Number and signs of the real roots of ``x^3 + a x^2 + b x + c``.

    Raises DegenerateSigns when a sign quantity read by the applicable case is zero
    within the band.
    """
    n_neg, n_pos, ok = cubic_signature_batch(a, b, c)
    c2, d2, d3 = cubic_quantities(a, b, c)
    if not ok:
        raise DegenerateSigns(f"cubic sign quantities in band: a={a}, b={b}, c={c}, c2={c2}, d2={d2}, d3={d3}")
    return RealRootProfile(int(n_neg), 0, int(n_pos), True, {"c2": c2, "d2": d2, "d3": d3})


def quartic_quantities(a, b, c, d):
    """``(d2, c2, d3, c3, d4)`` for ``x^4 + a x^3 + b x^2 + c x + d``."""
    d2 = 3 * a * a - 8 * b
    c2 = a * c - 16 * d
    d3 = -3 * a**3 * c + a * a * b * b - 6 * a * a * d + 14 * a * b * c - 4 * b**3 + 16 * b * d - 18 * c * c
    c3 = -9 * a**3 * d + a * a * b * c + 32 * a * b * d + 3 * a * c * c - 4 * b * b * c - 48 * c * d
    d4 = (
        -27 * a**4 * d * d
        + 18 * a**3 * b * c * d
        - 4 * a**3 * c**3
        - 4 * a * a * b**3 * d
        + a * a * b * b * c * c
        + 144 * a * a * b * d * d
        - 6 * a * a * c * c * d
        - 80 * a * b * b * c * d
        + 18 * a * b * c**3
        + 16 * b**4 * d
        - 4 * b**3 * c * c
        - 192 * a * c * d * d
        - 128 * b * b * d * d
        + 144 * b * c * c * d
        - 27 * c**4
        + 256 * d**3
    )
    return d2, c2, d3, c3, d4


def quartic_real_count_batch(a, b, c, d):
    """Vectorised quartic rule. Returns ``(count, ok)``."""
    a, b, c, d = (np.asarray(v, dtype=float) for v in (a, b, c, d))
    with np.errstate(all="ignore"):
        d2, c2, d3, c3, d4 = quartic_quantities(a, b, c, d)
        s = root_scale(a, b, c, d)
        # the rule assumes c, d != 0; d2 and d3 matter only when d4 > 0
        pos4 = d4 > 0
        ok = ~(
            in_band(c, s, 3)
            | in_band(d, s, 4)
            | in_band(d4, s, 12)
            | (pos4 & in_band(d2, s, 2))
            | (pos4 & (d2 > 0) & in_band(d3, s, 6))
        )
        # overflow (a nearly vanishing leading coefficient upstream) goes to the caller's fallback
        ok &= np.isfinite(d2) & np.isfinite(d3) & np.isfinite(d4)
    count = np.where(d4 < 0, 2, np.where((d2 > 0) & (d3 > 0), 4, 0))
    return count.astype(np.int64), ok


def quartic_real_count(a: float, b: float, c: float, d: float) -> int:
    """Number of real roots (0, 2 or 4) of ``x^4 + a x^3 + b x^2 + c x + d``."""
    count, ok = quartic_real_count_batch(a, b, c, d)
    if not ok:
        raise DegenerateSigns(f"quartic sign quantities in band: {(a, b, c, d)}")
    return int(count)


def signs_by_sturm(p: Poly) -> RealRootProfile:
    """Fallback profile from Sturm counts on ``(-inf, 0)`` and ``(0, inf)``."""
    if p.trimmed().coeffs[:1] == (0.0,):
        raise DegenerateSigns("root at zero")
    neg = sturm_count(p, -math.inf, 0.0)
    pos = sturm_count(p, 0.0, math.inf)
    return RealRootProfile(neg, 0, pos, True, {})


def roots_separated(roots: np.ndarray) -> bool:
    """True when consecutive sorted roots are further apart than the separation rule."""
    roots = np.asarray(roots)
    if roots.size < 2:
        return True
    gaps = np.diff(roots)
    return bool(np.all(gaps > ROOT_SEPARATION * (1 + np.abs(roots[1:]))))
