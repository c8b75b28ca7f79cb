"""Phase-portrait labels from (index, number of invariant lines).

The only pair that does not determine the label is ``(i, l) = (1, 4)`` for cubic
fields, where C4 is the portrait whose singular points at infinity alternate
node-saddle-node-saddle and C3 is the other one.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from homportrait.core import (
    BandHit,
    Classified,
    ClassificationOutcome,
    Degenerate,
    DegenerateField,
    HomPortraitError,
    NoConvergence,
    PortraitLabel,
    Reason,
    VectorField,
    describe,
    eval_field,
    in_band,
    row_scale,
)
from homportrait.index import VanishesOnCircle, index_batch, winding_index
from homportrait.invlines import (
    count_lines_batch,
    count_lines_lenient,
    direction_coeffs,
    infinity_signs_batch,
    invariant_slopes,
)
from homportrait.realroots import real_roots_batch

L = PortraitLabel

#: (degree, index, lines) -> label; (3, 1, 4) is split by the infinity tiebreak
PORTRAIT_TABLE: dict[tuple[int, int, int], tuple[PortraitLabel, ...]] = {
    (1, -1, 2): (L.L1,),
    (1, 1, 2): (L.L2,),
    (1, 1, 0): (L.L3,),
    (2, -2, 3): (L.Q1,),
    (2, 0, 3): (L.Q2,),
    (2, 2, 3): (L.Q3,),
    (2, 0, 1): (L.Q4,),
    (2, 2, 1): (L.Q5,),
    (3, -3, 4): (L.C1,),
    (3, -1, 4): (L.C2,),
    (3, 1, 4): (L.C3, L.C4),
    (3, 3, 4): (L.C5,),
    (3, -1, 2): (L.C6,),
    (3, 1, 2): (L.C7,),
    (3, 3, 2): (L.C8,),
    (3, 1, 0): (L.C9,),
}


class UnrealizedPair(HomPortraitError):
    """An (index, lines) pair that has probability zero; signals a bug or a borderline input."""

    def __init__(self, degree: int, index: int, lines: int):
        self.pair = (degree, index, lines)
        super().__init__(f"(i, l) = ({index}, {lines}) is not realised for degree {degree}")


@dataclass(frozen=True)
class TableEntry:
    index: int
    lines: int
    labels: tuple[PortraitLabel, ...]


def portrait_table(n: int) -> list[TableEntry]:
    if n not in (1, 2, 3):
        raise ValueError(f"portrait table only for degree 1..3, got {n}")
    return [TableEntry(i, l, labels) for (d, i, l), labels in PORTRAIT_TABLE.items() if d == n]


# --------------------------------------------------------------------------- scalar path


def classify_linear(A: float, B: float, C: float, D: float) -> ClassificationOutcome:
    """Saddle / node / focus from determinant, trace and ``trace^2 - 4 det``."""
    s = max(abs(A), abs(B), abs(C), abs(D))
    det = A * D - B * C
    tr = A + D
    disc = tr * tr - 4 * det
    reasons = Reason.NONE
    if in_band(det, s, 2):
        reasons |= Reason.DET_ZERO
    if in_band(disc, s, 2):
        reasons |= Reason.DISC_ZERO
    if disc < 0 and in_band(tr, s, 1):
        reasons |= Reason.TRACE_ZERO
    if reasons:
        return Degenerate(reasons)
    if det < 0:
        return Classified(L.L1, -1, 2)
    if disc > 0:
        return Classified(L.L2, 1, 2)
    return Classified(L.L3, 1, 0)


def _tiebreak(f: VectorField) -> Optional[PortraitLabel]:
    _, signs, ok = infinity_signs_batch(f.coeffs)
    if not ok[0]:
        return None
    s = signs[0]
    return L.C4 if s[0] * s[1] < 0 and s[1] * s[2] < 0 else L.C3


def classify(f: VectorField, strict: bool = False, oracle_fallback: bool = True) -> ClassificationOutcome:
    """Portrait label of ``f`` with its (index, lines) evidence.

    ``strict=False`` counts an invariant vertical axis as an extra line (with a
    warning) instead of declaring the field degenerate. ``oracle_fallback``
    replaces a non-well-posed closed-form index by the winding number, but only
    when the line structure of ``f`` is generic; compound degeneracies are
    reported as Degenerate.
    """
    n = f.degree
    if n not in (1, 2, 3):
        raise ValueError(f"classification is available for degree 1..3, got {n}")
    lines_arr, line_r = count_lines_batch(f.coeffs, n)
    lines, line_reasons = int(lines_arr[0]), Reason(int(line_r[0]))
    notes: list[str] = []
    if line_reasons == Reason.X_AXIS_INVARIANT and not strict:
        try:
            lines, _ = count_lines_lenient(f)
        except DegenerateField as exc:
            return Degenerate(exc.reasons)
        notes.append("x=0 is an invariant line (measure-zero configuration)")
        lenient_lines = True
    else:
        lenient_lines = False
    idx_arr, idx_r = index_batch(f.coeffs, n)
    index, index_reasons = int(idx_arr[0]), Reason(int(idx_r[0]))
    source = "symbolic"
    if index_reasons:
        if not (oracle_fallback and not line_reasons):
            return Degenerate(index_reasons | line_reasons)
        try:
            index = winding_index(f)
        except (VanishesOnCircle, NoConvergence) as exc:
            return Degenerate(index_reasons, (str(exc),))
        source = "winding"
        notes.append("closed-form index not applicable (" + ", ".join(describe(index_reasons)) + ")")
    if line_reasons and not lenient_lines:
        return Degenerate(line_reasons)
    labels = PORTRAIT_TABLE.get((n, index, lines))
    if labels is None:
        raise UnrealizedPair(n, index, lines)
    tiebreak = len(labels) > 1
    if tiebreak:
        label = None if lenient_lines else _tiebreak(f)
        if label is None:
            return Degenerate(Reason.INFINITY_SIGN | line_reasons)
    else:
        label = labels[0]
    return Classified(label, index, lines, tiebreak, source, tuple(notes))


# --------------------------------------------------------------------------- attractor


def _polar_parts(f: VectorField, theta):
    c, s = np.cos(theta), np.sin(theta)
    P, Q = eval_field(f, c, s)
    return c * P + s * Q, c * Q - s * P


def radial_growth(f: VectorField, tol: float = 1e-8) -> float:
    """Change of ``log r`` along one revolution of a field without invariant lines.

    ``d(log r)/dθ = R/Θ``; an orbit turns in the direction of ``sign Θ``, so one
    revolution contributes ``∮ R/|Θ| dθ``.
    """
    theta = np.linspace(0, 2 * math.pi, 4096, endpoint=False)
    _, Th = _polar_parts(f, theta)
    if np.min(np.abs(Th)) < 1e-10 * max(1.0, f.scale) or np.any(np.sign(Th) != np.sign(Th[0])):
        raise BandHit(Reason.REPEATED_DIRECTION, "angular velocity too close to zero")
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, _ = integrate.quad(lambda t: _ratio(f, t), 0.0, 2 * math.pi, epsabs=tol, epsrel=0.0, limit=500)
        except integrate.IntegrationWarning as exc:
            raise NoConvergence(str(exc)) from None
    return val


def _ratio(f: VectorField, t: float) -> float:
    R, Th = _polar_parts(f, t)
    return float(R / abs(Th))


def _attractor_state(f: VectorField) -> int:
    """-1 global attractor, +1 global repeller, 0 neither."""
    n = f.degree
    if n % 2 == 0:
        raise ValueError("global attractors/repellers only occur for odd degree")
    slopes, x_axis = invariant_slopes(f)
    if slopes.size or x_axis:
        vals = [(sum(c * k**j for j, c in enumerate(f.p)), f.scale * (1 + abs(k)) ** n) for k in slopes]
        if x_axis:
            vals.append((f.q[-1], f.scale))
        for v, ref in vals:
            if in_band(v, ref, 1):
                raise BandHit(Reason.INFINITY_SIGN, "radial speed on an invariant line is zero")
        signs = [v > 0 for v, _ in vals]
        if not any(signs):
            return -1
        if all(signs):
            return 1
        return 0
    growth = radial_growth(f)
    if abs(growth) < 1e-8:
        raise BandHit(Reason.INFINITY_SIGN, "zero radial growth per revolution")
    return -1 if growth < 0 else 1


def is_global_attractor(f: VectorField) -> bool:
    """Whether every orbit of an odd-degree field tends to the origin.

    With invariant lines: the radial speed ``p_n(1, κ)`` is negative on each of
    them (and ``q_n(0, 1) < 0`` if ``x = 0`` is invariant). Without: orbits spiral
    and ``log r`` decreases over each revolution.
    """
    return _attractor_state(f) == -1


def is_global_repeller(f: VectorField) -> bool:
    return _attractor_state(f) == 1


# --------------------------------------------------------------------------- batch path

DEGENERATE = -1
UNREALIZED = -2


@dataclass
class BatchResult:
    """Per-row outcome arrays of :func:`classify_batch`.

    ``label`` indexes ``PortraitLabel.for_degree(n)``; ``DEGENERATE`` and
    ``UNREALIZED`` mark rows without a label. ``attractor`` is -1/+1/0 for
    attractor/repeller/neither and 2 for an undecidable (band-hit) row.
    """

    degree: int
    label: np.ndarray
    index: np.ndarray
    lines: np.ndarray
    reasons: np.ndarray
    fallback: np.ndarray
    attractor: np.ndarray


def _lookup_codes(n: int):
    labels = PortraitLabel.for_degree(n)
    return {(i, l): labels.index(ls[0]) for (d, i, l), ls in PORTRAIT_TABLE.items() if d == n}


def classify_batch(coeffs: np.ndarray, degree: int, oracle_fallback: bool = False) -> BatchResult:
    """Strict classification of every row of a ``(N, 2n+2)`` coefficient array."""
    n = degree
    rows = np.atleast_2d(np.asarray(coeffs, dtype=float))
    N = rows.shape[0]
    lines, line_r = count_lines_batch(rows, n)
    index, idx_r = index_batch(rows, n)
    fallback = np.zeros(N, dtype=bool)
    if oracle_fallback:
        for k in np.flatnonzero((idx_r != 0) & (line_r == 0)):
            try:
                index[k] = winding_index(VectorField.from_coeffs(n, rows[k]))
            except (VanishesOnCircle, NoConvergence):
                continue
            idx_r[k] = 0
            fallback[k] = True
    reasons = idx_r | line_r
    label = np.full(N, DEGENERATE, dtype=np.int64)
    good = reasons == 0
    label[good] = UNREALIZED
    for (i, l), code in _lookup_codes(n).items():
        label[good & (index == i) & (lines == l)] = code
    if n == 3:
        c3, c4 = PortraitLabel.for_degree(3).index(L.C3), PortraitLabel.for_degree(3).index(L.C4)
        tie = np.flatnonzero(label == c3)
        if tie.size:
            _, s, ok = infinity_signs_batch(rows[tie])
            alt = (s[:, 0] * s[:, 1] < 0) & (s[:, 1] * s[:, 2] < 0)
            label[tie[ok & alt]] = c4
            label[tie[~ok]] = DEGENERATE
            reasons[tie[~ok]] |= int(Reason.INFINITY_SIGN)
    attractor = np.zeros(N, dtype=np.int64)
    if n % 2 == 1:
        sel = np.flatnonzero(label >= 0)
        attractor[sel] = attractor_state_batch(rows[sel], n, lines[sel])
    return BatchResult(n, label, index, lines, reasons, fallback, attractor)


def _poly_rows_eval(asc, x):
    acc = np.zeros_like(x)
    for k in range(asc.shape[1] - 1, -1, -1):
        acc = acc * x + asc[:, k : k + 1]
    return acc


def _growth_batch(rows: np.ndarray, n: int, tol: float = 1e-8, max_points: int = 2**14):
    """Periodic trapezoid rule for ``∮ R/|Θ| dθ`` with per-row doubling.

    Returns ``(growth, ok)``; rows with a near-zero Θ or no convergence are not ok.
    """
    m_rows = rows.shape[0]
    growth = np.zeros(m_rows)
    ok = np.zeros(m_rows, dtype=bool)
    p, q = rows[:, : n + 1], rows[:, n + 1 :]
    s = row_scale(rows)

    def integrand(sub, theta):
        c, sn = np.cos(theta)[None, :], np.sin(theta)[None, :]
        mono = np.stack([c ** (n - k) * sn**k for k in range(n + 1)], axis=0)  # (n+1, 1, m)
        P = np.einsum("rk,krm->rm", p[sub], mono)
        Q = np.einsum("rk,krm->rm", q[sub], mono)
        R, Th = c * P + sn * Q, c * Q - sn * P
        return R, Th

    m = 64
    active = np.arange(m_rows)
    theta = np.linspace(0, 2 * math.pi, m, endpoint=False)
    R, Th = integrand(active, theta)
    bad = np.min(np.abs(Th), axis=1) < 1e-10 * np.maximum(1.0, s[active])
    bad |= np.any(np.sign(Th) != np.sign(Th[:, :1]), axis=1)
    active = active[~bad]
    prev = (R[~bad] / np.abs(Th[~bad])).mean(axis=1) * 2 * math.pi
    while active.size and m < max_points:
        # midpoints of the current grid refine the rule to 2m points
        mid = theta + math.pi / m
        R, Th = integrand(active, mid)
        if np.any(Th == 0):
            Th = np.where(Th == 0, np.nan, Th)
        sign_flip = np.any(np.sign(Th) != np.sign(Th[:, :1]), axis=1) | np.any(np.isnan(Th), axis=1)
        cur = 0.5 * prev + (R / np.abs(Th)).mean(axis=1) * math.pi
        done = (np.abs(cur - prev) < tol) & ~sign_flip
        growth[active[done]] = cur[done]
        ok[active[done]] = True
        keep = ~done & ~sign_flip
        active, prev = active[keep], cur[keep]
        m *= 2
        theta = np.linspace(0, 2 * math.pi, m, endpoint=False)
    return growth, ok


def attractor_state_batch(rows: np.ndarray, n: int, lines: np.ndarray) -> np.ndarray:
    """-1 attractor, +1 repeller, 0 neither, 2 undecidable, for odd-degree rows."""
    out = np.zeros(rows.shape[0], dtype=np.int64)
    if rows.shape[0] == 0:
        return out
    s = row_scale(rows)
    with_lines = np.flatnonzero(lines > 0)
    if with_lines.size:
        sub = rows[with_lines]
        roots, real = real_roots_batch(direction_coeffs(sub, n))
        kappa = np.where(real, roots, 0.0)
        radial = _poly_rows_eval(sub[:, : n + 1], kappa)
        ref = s[with_lines, None] * (1 + np.abs(kappa)) ** n
        undecided = np.any(real & in_band(radial, ref, 1), axis=1)
        undecided |= real.sum(axis=1) != lines[with_lines]
        neg = np.all(~real | (radial < 0), axis=1)
        pos = np.all(~real | (radial > 0), axis=1)
        out[with_lines] = np.select([undecided, neg, pos], [2, -1, 1], default=0)
    spiral = np.flatnonzero(lines == 0)
    if spiral.size:
        growth, ok = _growth_batch(rows[spiral], n)
        state = np.where(growth < 0, -1, 1)
        for k in np.flatnonzero(~ok):
            try:
                state[k] = _attractor_state(VectorField.from_coeffs(n, rows[spiral[k]]))
            except (DegenerateField, NoConvergence):
                state[k] = 2
        state[ok & (np.abs(growth) < 1e-8)] = 2
        out[spiral] = state
    return out
