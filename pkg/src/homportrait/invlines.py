"""Invariant straight lines through the origin.

A line ``y = κ x`` is invariant iff ``t_n(κ) = q_n(1, κ) - κ p_n(1, κ)`` vanishes;
the line ``x = 0`` is invariant iff ``A[0,n] = 0``. For a degree-3 field with four
invariant lines the singular points at infinity along ``y = κ_j x`` are saddles
or nodes according to the sign of ``-t_3'(κ_j) p_3(1, κ_j)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from homportrait.core import DegenerateField, HomPortraitError, Reason, VectorField, in_band, row_scale
from homportrait.realroots import (
    NonSquarefree,
    Poly,
    quartic_real_count_batch,
    real_roots,
    real_roots_batch,
    roots_separated,
    sturm_count,
)


class WrongLineCount(HomPortraitError):
    pass


class DegenerateLinesWarning(UserWarning):
    pass


@dataclass(frozen=True)
class DirectionPoly:
    """Coefficients of ``t_n`` in descending powers of κ plus degeneracy flags."""

    coeffs: tuple[float, ...]
    x_axis_invariant: bool
    identically_zero: bool

    @property
    def poly(self) -> Poly:
        return Poly.from_descending(self.coeffs)

    def __call__(self, kappa):
        return self.poly(kappa)


def direction_coeffs(coeffs, degree: int) -> np.ndarray:
    """Descending coefficients of ``t_n`` for each row of a ``(N, 2n+2)`` array."""
    rows = np.atleast_2d(np.asarray(coeffs, dtype=float))
    n = degree
    p, q = rows[:, : n + 1], rows[:, n + 1 :]
    asc = np.zeros((rows.shape[0], n + 2))
    asc[:, : n + 1] += q
    asc[:, 1:] -= p
    return asc[:, ::-1]


def direction_poly(f: VectorField) -> DirectionPoly:
    desc = direction_coeffs(f.coeffs, f.degree)[0]
    s = f.scale
    zero = in_band(desc, s, 1)
    return DirectionPoly(tuple(float(c) for c in desc), bool(zero[0]), bool(np.all(zero)))


def _flag(mask, reason: Reason) -> np.ndarray:
    return np.where(mask, int(reason), 0).astype(np.int64)


def _sturm_lines(desc_row) -> tuple[int, int]:
    try:
        return sturm_count(Poly.from_descending(desc_row)), 0
    except NonSquarefree:
        return 0, int(Reason.REPEATED_DIRECTION)


def count_lines_batch(coeffs, degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Generic invariant-line counts ``l`` and degeneracy flags for each row."""
    rows = np.atleast_2d(np.asarray(coeffs, dtype=float))
    s = row_scale(rows)
    desc = direction_coeffs(rows, degree)
    zero = in_band(desc, s[:, None], 1)
    reasons = _flag(np.all(zero, axis=1), Reason.DIRECTION_POLY_ZERO)
    reasons |= _flag(zero[:, 0], Reason.X_AXIS_INVARIANT)
    if degree == 1:
        lead, mid, const = desc.T
        disc = mid * mid - 4 * lead * const
        lines = np.where(disc > 0, 2, 0)
        reasons |= _flag(in_band(disc, s, 2), Reason.REPEATED_DIRECTION)
    elif degree == 2:
        # t2 = -c k^3 + (f-b) k^2 + (e-a) k + d; three real roots iff the discriminant is positive
        a, b, c, d, e, f = rows.T
        bf, ae = b - f, a - e
        disc = (
            -27 * c * c * d * d
            - 18 * c * d * bf * ae
            + 4 * d * bf**3
            + bf * bf * ae * ae
            - 4 * c * ae**3
        )
        lines = np.where(disc > 0, 3, 1)
        reasons |= _flag(in_band(disc, s, 4), Reason.REPEATED_DIRECTION)
    elif degree == 3:
        with np.errstate(all="ignore"):
            monic = desc[:, 1:] / desc[:, :1]
            lines, ok = quartic_real_count_batch(*monic.T)
        lines = lines.copy()
        for k in np.flatnonzero(~ok & (reasons == 0)):
            lines[k], extra = _sturm_lines(desc[k])
            reasons[k] |= extra
    else:
        lines = np.zeros(rows.shape[0], dtype=np.int64)
        for k in np.flatnonzero(reasons == 0):
            lines[k], extra = _sturm_lines(desc[k])
            reasons[k] |= extra
    return lines.astype(np.int64), reasons


def count_lines_lenient(f: VectorField) -> tuple[int, Reason]:
    """Line count that tolerates an invariant ``x = 0`` axis.

    Returns ``(l, warnings)`` where ``warnings`` is ``Reason.X_AXIS_INVARIANT``
    when the count includes the vertical axis. Raises DegenerateField for
    ``t_n ≡ 0`` or repeated directions.
    """
    lines, reasons = count_lines_batch(f.coeffs, f.degree)
    r = Reason(int(reasons[0]))
    if r == Reason.X_AXIS_INVARIANT:
        dp = direction_poly(f)
        trimmed = dp.poly.trimmed(1e-10 * max(1.0, f.scale))
        if trimmed.degree < 1:
            return 1, r
        try:
            extra = sturm_count(trimmed)
        except NonSquarefree:
            raise DegenerateField(r | Reason.REPEATED_DIRECTION) from None
        return extra + 1, r
    if r:
        raise DegenerateField(r)
    return int(lines[0]), Reason.NONE


def count_lines(f: VectorField, strict: bool = True) -> int:
    """Number of invariant straight lines through the origin.

    With ``strict=True`` every measure-zero configuration raises DegenerateField.
    With ``strict=False`` an invariant vertical axis is counted (``l + 1``) and a
    DegenerateLinesWarning is issued.
    """
    if strict:
        lines, reasons = count_lines_batch(f.coeffs, f.degree)
        if reasons[0]:
            raise DegenerateField(reasons[0])
        return int(lines[0])
    l, warn = count_lines_lenient(f)
    if warn:
        warnings.warn("x=0 is an invariant line; counted as l+1", DegenerateLinesWarning, stacklevel=2)
    return l


def invariant_slopes(f: VectorField) -> tuple[np.ndarray, bool]:
    """Real slopes κ of the invariant lines ``y = κx`` and whether ``x = 0`` is invariant."""
    dp = direction_poly(f)
    if dp.identically_zero:
        raise DegenerateField(Reason.DIRECTION_POLY_ZERO)
    trimmed = dp.poly.trimmed(1e-10 * max(1.0, f.scale))
    slopes = real_roots(trimmed) if trimmed.degree >= 1 else np.zeros(0)
    return slopes, dp.x_axis_invariant


# --------------------------------------------------------------------------- infinity


@dataclass(frozen=True)
class InfinitySigns:
    roots: tuple[float, ...]
    signs: tuple[float, ...]

    @property
    def saddles(self) -> tuple[bool, ...]:
        return tuple(s < 0 for s in self.signs)

    @property
    def alternating(self) -> bool:
        """Node-saddle-node-saddle pattern: ``s1 s2 < 0`` and ``s2 s3 < 0``."""
        s = self.signs
        return s[0] * s[1] < 0 and s[1] * s[2] < 0


def _poly_eval_asc(asc, x):
    acc = np.zeros_like(x)
    for k in range(asc.shape[1] - 1, -1, -1):
        acc = acc * x + asc[:, k : k + 1]
    return acc


def infinity_signs_batch(coeffs) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sorted roots ``(m, 4)``, signs ``s_j`` and a validity mask for cubic rows."""
    rows = np.atleast_2d(np.asarray(coeffs, dtype=float))
    s = row_scale(rows)
    desc = direction_coeffs(rows, 3)
    roots, real = real_roots_batch(desc)
    ok = np.all(real, axis=1)
    roots = np.where(real, roots, 0.0)
    gaps = np.diff(roots, axis=1)
    ok &= np.all(gaps > 1e-8 * (1 + np.abs(roots[:, 1:])), axis=1)
    deriv_asc = desc[:, ::-1][:, 1:] * np.arange(1, 5)
    tprime = _poly_eval_asc(deriv_asc, roots)
    p1k = _poly_eval_asc(rows[:, :4], roots)
    signs = -tprime * p1k
    band = in_band(signs, (s * s)[:, None] * (1 + np.abs(roots)) ** 6, 1)
    return roots, signs, ok & ~np.any(band, axis=1)


def infinity_signs(f: VectorField) -> InfinitySigns:
    """Ordered roots of ``t_3`` and their saddle (<0) / node (>0) signs."""
    if f.degree != 3:
        raise ValueError("infinity signs are defined for cubic fields")
    lines = count_lines(f)
    if lines != 4:
        raise WrongLineCount(f"need 4 invariant lines, found {lines}")
    roots, signs, ok = infinity_signs_batch(f.coeffs)
    if not ok[0] or not roots_separated(roots[0]):
        raise DegenerateField(Reason.INFINITY_SIGN)
    return InfinitySigns(tuple(map(float, roots[0])), tuple(map(float, signs[0])))
