"""Expected number of invariant lines of a random degree-n field.

The direction polynomial of a field with i.i.d. N(0, 1) coefficients is
``C_0 + C_1 κ + ... + C_{n+1} κ^{n+1}`` with independent centred normal ``C_j``,
variance 1 at both ends and 2 in between. The Edelman-Kostlan formula gives
its expected number of real zeros as ``(1/π) ∫ |w'(κ)| dκ`` with ``w`` the
normalised curve ``M^{1/2} (1, κ, ..., κ^{n+1})``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from homportrait.core import NoConvergence


@dataclass(frozen=True)
class EKSpec:
    n: int
    closed_form: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")

    @property
    def variances(self) -> np.ndarray:
        v = np.full(self.n + 2, 2.0)
        v[0] = v[-1] = 1.0
        return v

    @property
    def M(self) -> np.ndarray:
        return np.diag(self.variances)


def _closed_form_1(k):
    return math.sqrt(2) / (math.pi * (1 + k * k))


def _closed_form_2(t):
    num = 2 * t**8 + 8 * t**6 + 13 * t**4 + 8 * t**2 + 2
    return math.sqrt(num) / ((t * t + 1) * (t**4 + t * t + 1)) / math.pi


def _closed_form_3(t):
    num = 2 * t**8 + 4 * t**6 + 12 * t**4 + 4 * t**2 + 2
    return math.sqrt(num) / ((t * t + 1) * (t**4 + 1)) / math.pi


CLOSED_FORMS = {1: _closed_form_1, 2: _closed_form_2, 3: _closed_form_3}


def ek_spec(n: int) -> EKSpec:
    return EKSpec(n, CLOSED_FORMS.get(n))


def ek_integrand(spec: EKSpec, kappa):
    """``|w'(κ)| / π``, vectorised over ``kappa``.

    Uses ``|w'|^2 = sum_{i<j} (v_i v'_j - v_j v'_i)^2 / |v|^4`` on the moment
    vector rescaled by ``max(1, |κ|)^(n+1)``, which leaves the ratio unchanged
    and keeps large κ finite.
    """
    k = np.asarray(kappa, dtype=float)
    deg = spec.n + 1
    powers = np.arange(deg + 1)
    sd = np.sqrt(spec.variances)
    scale = np.maximum(1.0, np.abs(k))[..., None]
    kk = k[..., None]
    u = kk / scale
    v = sd * u**powers * scale ** (powers - deg)
    dv = sd * powers * u ** np.maximum(powers - 1, 0) * scale ** (powers - 1 - deg)
    cross = v[..., :, None] * dv[..., None, :] - v[..., None, :] * dv[..., :, None]
    num = 0.5 * np.sum(cross * cross, axis=(-2, -1))
    den = np.sum(v * v, axis=-1)
    return np.sqrt(num) / den / math.pi


def expected_lines(n: int, tol: float = 1e-10) -> float:
    """Λ_n, the expected number of invariant lines, by adaptive quadrature.

    Integrates over ``κ = tan u`` on ``[0, π/2)`` and doubles (the integrand is even).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    spec = ek_spec(n)

    def g(u):
        c = math.cos(u)
        return float(ek_integrand(spec, math.tan(u))) / (c * c)

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            half, _ = integrate.quad(g, 0.0, math.pi / 2, epsabs=tol / 4, epsrel=0.0, limit=200)
        except integrate.IntegrationWarning as exc:
            raise NoConvergence(str(exc)) from None
    return 2 * half
