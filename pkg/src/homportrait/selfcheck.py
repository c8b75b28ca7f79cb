"""Oracle-equivalence checks: closed forms against independent numerical routes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from homportrait.core import NoConvergence, VectorField
from homportrait.index import VanishesOnCircle, index_batch, winding_index
from homportrait.invlines import count_lines_batch, direction_coeffs
from homportrait.montecarlo import DEFAULT_SEED, NormalStream, sample_coeffs
from homportrait.realroots import (
    cubic_signature_batch,
    quartic_real_count_batch,
    real_roots_batch,
)

IndexFn = Callable[[np.ndarray, int], tuple]


@dataclass
class CheckResult:
    name: str
    checked: int = 0
    skipped: int = 0
    mismatches: int = 0
    examples: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.mismatches == 0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.mismatches} mismatches in {self.checked} checked ({self.skipped} skipped)"


def check_index(coeffs: np.ndarray, degree: int, index_fn: Optional[IndexFn] = None) -> CheckResult:
    """Closed-form index versus the winding number on the unit circle."""
    index_fn = index_fn or index_batch
    res = CheckResult(f"index n={degree} (closed form vs winding)")
    idx, reasons = index_fn(coeffs, degree)
    for k in range(coeffs.shape[0]):
        if reasons[k]:
            res.skipped += 1
            continue
        try:
            w = winding_index(VectorField.from_coeffs(degree, coeffs[k]))
        except (VanishesOnCircle, NoConvergence):
            res.skipped += 1
            continue
        res.checked += 1
        if w != idx[k]:
            res.mismatches += 1
            if len(res.examples) < 5:
                res.examples.append((coeffs[k].tolist(), int(idx[k]), w))
    return res


def check_lines(coeffs: np.ndarray, degree: int) -> CheckResult:
    """Discriminant/sign-rule line count versus companion-matrix real roots of t_n."""
    res = CheckResult(f"lines n={degree} (sign rules vs companion matrix)")
    lines, reasons = count_lines_batch(coeffs, degree)
    ok = reasons == 0
    _, real = real_roots_batch(direction_coeffs(coeffs[ok], degree))
    oracle = real.sum(axis=1)
    res.checked = int(ok.sum())
    res.skipped = int((~ok).sum())
    bad = oracle != lines[ok]
    res.mismatches = int(bad.sum())
    res.examples = coeffs[ok][bad][:5].tolist()
    return res


def check_root_rules(stream: NormalStream, samples: int) -> list[CheckResult]:
    """Cubic sign rule and quartic count rule versus companion-matrix roots."""
    out = []
    cub = stream.normals(3 * samples).reshape(samples, 3)
    neg, pos, ok = cubic_signature_batch(*cub.T)
    roots, real = real_roots_batch(np.column_stack([np.ones(samples), cub]))
    oracle_neg = np.sum(real & (roots < 0), axis=1)
    oracle_pos = np.sum(real & (roots > 0), axis=1)
    bad = ok & ((oracle_neg != neg) | (oracle_pos != pos))
    out.append(CheckResult("cubic root signs (sign rule vs companion)", int(ok.sum()), int((~ok).sum()), int(bad.sum())))
    qua = stream.normals(4 * samples).reshape(samples, 4)
    count, ok = quartic_real_count_batch(*qua.T)
    _, real = real_roots_batch(np.column_stack([np.ones(samples), qua]))
    bad = ok & (real.sum(axis=1) != count)
    out.append(CheckResult("quartic real roots (sign rule vs companion)", int(ok.sum()), int((~ok).sum()), int(bad.sum())))
    return out


def run_selfcheck(
    degree: int, samples: int, seed: int = DEFAULT_SEED, index_fn: Optional[IndexFn] = None
) -> list[CheckResult]:
    """All oracle-equivalence checks for one degree on ``samples`` seeded fields."""
    stream = NormalStream(seed, 0)
    coeffs = sample_coeffs(degree, stream, samples)
    results = [check_index(coeffs, degree, index_fn), check_lines(coeffs, degree)]
    results += check_root_rules(NormalStream(seed, 1), samples)
    return results
