"""Topological index of the origin.

Closed forms: the sign of the determinant for linear fields, and for quadratic
and cubic fields the signature of the Eisenbud-Levine bilinear form on the local
algebra, reduced to sign tests on a handful of rational functions of the
coefficients. ``winding_index`` is an independent numerical oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from homportrait.core import (
    HomPortraitError,
    NoConvergence,
    NotWellPosed,
    Reason,
    VectorField,
    eval_field,
    in_band,
    row_scale,
)
from homportrait.realroots import cubic_quantities, root_scale

WINDING_INITIAL_SAMPLES = 2**10
WINDING_MAX_SAMPLES = 2**20


class VanishesOnCircle(HomPortraitError):
    pass


def _as_rows(coeffs) -> np.ndarray:
    return np.atleast_2d(np.asarray(coeffs, dtype=float))


def _flags(mask, flag: Reason) -> np.ndarray:
    return np.where(mask, int(flag), 0).astype(np.int64)


# --------------------------------------------------------------------------- n = 1


def linear_index_batch(coeffs) -> tuple[np.ndarray, np.ndarray]:
    A, B, C, D = _as_rows(coeffs).T
    s = row_scale(_as_rows(coeffs))
    det = A * D - B * C
    reasons = _flags(in_band(det, s, 2), Reason.DET_ZERO)
    return np.where(det < 0, -1, 1).astype(np.int64), reasons


def linear_index(f: VectorField) -> int:
    """-1 for a saddle (``AD - BC < 0``), +1 otherwise."""
    _check_degree(f, 1)
    idx, reasons = linear_index_batch(f.coeffs)
    if reasons[0]:
        raise NotWellPosed(reasons[0])
    return int(idx[0])


# --------------------------------------------------------------------------- n = 2


@dataclass(frozen=True)
class QuadraticIndexData:
    lam: float
    mu: float
    j: float
    eps: int
    violations: Reason

    @property
    def wellposed(self) -> bool:
        return not self.violations


def _quadratic_quantities(coeffs):
    rows = _as_rows(coeffs)
    a, b, c, d, e, f = rows.T
    s = row_scale(rows)
    den = a * f - c * d
    lam_num = a * e - b * d
    mu_num = b * f - c * e
    with np.errstate(all="ignore"):
        lam = -lam_num / den
        mu = -mu_num / den
        j = 4 * den * (1 - lam * mu)
        reasons = (
            _flags(in_band(den, s, 2), Reason.AF_CD_ZERO)
            | _flags(in_band(lam_num, s, 2) | in_band(mu_num, s, 2), Reason.LAMBDA_MU_ZERO)
            | _flags(in_band(lam * mu - 1), Reason.LAMBDA_MU_ONE)
            | _flags(in_band(lam_num + mu_num, s, 2), Reason.LAMBDA_PLUS_MU_ZERO)
            | _flags(in_band(j, s, 2), Reason.JACOBIAN_ZERO)
        )
        # NaNs from a vanishing denominator are already flagged; keep them out of sign tests
        reasons |= _flags(~np.isfinite(lam * mu), Reason.AF_CD_ZERO)
    return lam, mu, j, reasons


def quadratic_index_batch(coeffs) -> tuple[np.ndarray, np.ndarray]:
    lam, mu, j, reasons = _quadratic_quantities(coeffs)
    eps = np.where(j > 0, 1.0, -1.0)
    with np.errstate(all="ignore"):
        idx = np.where(lam * mu - 1 < 0, 0, np.where(eps * (lam + mu) > 0, 2, -2))
    return idx.astype(np.int64), reasons


def quadratic_index_data(f: VectorField) -> QuadraticIndexData:
    _check_degree(f, 2)
    lam, mu, j, reasons = _quadratic_quantities(f.coeffs)
    return QuadraticIndexData(
        float(lam[0]), float(mu[0]), float(j[0]), 1 if j[0] > 0 else -1, Reason(int(reasons[0]))
    )


def quadratic_index(f: VectorField) -> int:
    """Index in {-2, 0, 2} of a well-posed quadratic field.

    0 iff ``λμ - 1 < 0``; otherwise ``2 * sign(ε (λ + μ))`` with ``ε = sign(j)``.
    """
    _check_degree(f, 2)
    idx, reasons = quadratic_index_batch(f.coeffs)
    if reasons[0]:
        raise NotWellPosed(reasons[0])
    return int(idx[0])


# --------------------------------------------------------------------------- n = 3


@dataclass(frozen=True)
class CubicIndexData:
    r: float
    s: float
    p: float
    q: float
    h1: float
    h2: float
    h3: float
    h4: float
    j: float
    alpha: float
    beta: float
    gamma: float
    C2: float
    D3: float
    eps: int
    violations: Reason

    @property
    def wellposed(self) -> bool:
        return not self.violations


def _cubic_quantities(coeffs):
    rows = _as_rows(coeffs)
    a, b, c, d, e, f, g, h = rows.T
    sc = row_scale(rows)
    den = a * h - d * e
    # x^3 = r x^2y + s xy^2 from h*P - d*Q; y^3 = p x^2y + q xy^2 from a*Q - e*P
    r_num = b * h - d * f
    s_num = c * h - d * g
    p_num = a * f - b * e
    q_num = a * g - e * c
    # near-singular rows overflow to inf/nan here; they are flagged below
    with np.errstate(all="ignore"):
        r, s, p, q = (-num / den for num in (r_num, s_num, p_num, q_num))
        omps = 1 - p * s
        h2 = (r + s * q) / omps
        h3 = (p * r + q) / omps
        h1 = r * h2 + s
        h4 = p + q * h3
        j = (
            (3 * a * f - 3 * b * e) * h1
            + (6 * a * g - 6 * c * e) * h2
            + (9 * a * h + 3 * b * g - 3 * c * f - 9 * d * e)
            + (6 * b * h - 6 * d * f) * h3
            + (3 * c * h - 3 * d * g) * h4
        )
        eps = np.where(j > 0, 1.0, -1.0)
        alpha = -eps * (1 + h1 + h4)
        beta = h1 * h4 - h2**2 - h3**2 + h1 + h4 - 1
        gamma = eps * (h1 * h3**2 + h2**2 * h4 - h1 * h4 - 2 * h2 * h3 + 1)
        C2, _, D3 = cubic_quantities(alpha, beta, gamma)
    with np.errstate(all="ignore"):
        rs = root_scale(alpha, beta, gamma)
        reasons = (
            _flags(in_band(den, sc, 2), Reason.AH_DE_ZERO)
            | _flags(in_band(omps), Reason.PS_ONE)
            | _flags(
                in_band(r_num, sc, 2) | in_band(s_num, sc, 2) | in_band(p_num, sc, 2) | in_band(q_num, sc, 2),
                Reason.RSPQ_ZERO,
            )
            | _flags(
                in_band(h1) | in_band(h2) | in_band(h3) | in_band(h4) | in_band(j, sc, 2),
                Reason.H_ZERO,
            )
            | _flags(in_band(alpha) | in_band(beta) | in_band(gamma), Reason.ALPHA_BETA_GAMMA_ZERO)
            | _flags(in_band(C2, rs, 3) | in_band(D3, rs, 6), Reason.C2_D3_ZERO)
        )
        finite = np.isfinite(D3) & np.isfinite(C2)
    reasons |= _flags(~finite & (reasons == 0), Reason.PS_ONE)
    return dict(
        r=r, s=s, p=p, q=q, h1=h1, h2=h2, h3=h3, h4=h4, j=j,
        alpha=alpha, beta=beta, gamma=gamma, C2=C2, D3=D3, eps=eps,
    ), reasons


def cubic_index_from_signs(D3, C2, beta, gamma) -> np.ndarray:
    """The four-case sign table for the cubic index (vectorised)."""
    D3, C2, beta, gamma = (np.asarray(v) for v in (D3, C2, beta, gamma))
    Dp, Cp, bp, gp = D3 > 0, C2 > 0, beta > 0, gamma > 0
    minus3 = Dp & Cp & bp & gp
    plus3 = Dp & ~Cp & bp & ~gp
    minus1 = (~Dp & gp) | (Dp & ~gp & Cp) | (Dp & ~gp & ~Cp & ~bp)
    plus1 = (~Dp & ~gp) | (Dp & gp & ~Cp) | (Dp & gp & Cp & ~bp)
    idx = np.select([minus3, minus1, plus1, plus3], [-3, -1, 1, 3], default=0)
    return idx.astype(np.int64)


def cubic_index_batch(coeffs) -> tuple[np.ndarray, np.ndarray]:
    qd, reasons = _cubic_quantities(coeffs)
    with np.errstate(invalid="ignore"):
        idx = cubic_index_from_signs(qd["D3"], qd["C2"], qd["beta"], qd["gamma"])
    return idx, reasons


def cubic_index_data(f: VectorField) -> CubicIndexData:
    _check_degree(f, 3)
    qd, reasons = _cubic_quantities(f.coeffs)
    vals = {k: float(v[0]) for k, v in qd.items()}
    vals["eps"] = int(vals["eps"])
    return CubicIndexData(**vals, violations=Reason(int(reasons[0])))


def cubic_index(f: VectorField) -> int:
    """Index in {-3, -1, 1, 3} of a well-posed cubic field."""
    _check_degree(f, 3)
    idx, reasons = cubic_index_batch(f.coeffs)
    if reasons[0]:
        raise NotWellPosed(reasons[0])
    return int(idx[0])


# --------------------------------------------------------------------------- dispatch

_BATCH = {1: linear_index_batch, 2: quadratic_index_batch, 3: cubic_index_batch}


def index_batch(coeffs, degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Symbolic index and violated-condition flags for a ``(N, 2n+2)`` array."""
    return _BATCH[degree](coeffs)


def symbolic_index(f: VectorField) -> int:
    if f.degree not in _BATCH:
        raise ValueError(f"closed-form index only for degree 1..3, got {f.degree}")
    return {1: linear_index, 2: quadratic_index, 3: cubic_index}[f.degree](f)


def _check_degree(f: VectorField, n: int) -> None:
    if f.degree != n:
        raise ValueError(f"expected a degree-{n} field, got degree {f.degree}")


# --------------------------------------------------------------------------- oracle


def winding_index(
    f: VectorField,
    radius: float = 1.0,
    angular_tol: float = math.pi / 2,
    initial_samples: int = WINDING_INITIAL_SAMPLES,
) -> int:
    """Degree of ``f/|f|`` on the circle of the given radius.

    The sample count doubles until every step turns the field by less than
    ``angular_tol`` and the swept angle is within 0.01 turns of an integer.
    """
    m = initial_samples
    floor = 1e-13 * f.scale * radius**f.degree
    while m <= WINDING_MAX_SAMPLES:
        theta = np.linspace(0.0, 2 * math.pi, m, endpoint=False)
        P, Q = eval_field(f, radius * np.cos(theta), radius * np.sin(theta))
        norm = np.hypot(P, Q)
        if f.scale == 0 or np.min(norm) <= floor:
            raise VanishesOnCircle(f"|f| below {floor:g} on the circle of radius {radius}")
        ang = np.arctan2(Q, P)
        steps = np.diff(np.append(ang, ang[0]))
        steps = (steps + math.pi) % (2 * math.pi) - math.pi
        turns = steps.sum() / (2 * math.pi)
        if np.max(np.abs(steps)) < angular_tol and abs(turns - round(turns)) < 0.01:
            return int(round(turns))
        m *= 2
    raise NoConvergence(f"winding number not resolved with {WINDING_MAX_SAMPLES} samples")
