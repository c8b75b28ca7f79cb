"""Reproducible Monte Carlo estimates of portrait probabilities.

Coefficients are i.i.d. N(0, 1). Normal variates come from a Box-Muller
transform of Philox (counter-based) uniforms; partition ``k`` of a run uses the
key derived from ``(seed, k)``, so a report depends only on
``(degree, samples, seed, partitions)`` and not on scheduling.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from homportrait.classifier import DEGENERATE, UNREALIZED, classify_batch
from homportrait.core import HomPortraitError, PortraitLabel, Reason, VectorField
from homportrait.kostlan import expected_lines

DEFAULT_SEED = 20190601
DEFAULT_CHUNK = 2**16


class WrongDegree(HomPortraitError):
    pass


# --------------------------------------------------------------------------- RNG


class NormalStream:
    """Standard normal variates from a keyed Philox stream via Box-Muller."""

    def __init__(self, seed: int, stream_id: int = 0):
        ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream_id),))
        self._bitgen = np.random.Philox(key=ss.generate_state(2, np.uint64))
        self._spare = np.empty(0)

    def uniforms(self, count: int) -> np.ndarray:
        """Uniforms on the open interval (0, 1) with 53 random bits each."""
        raw = self._bitgen.random_raw(count)
        return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53

    def normals(self, count: int) -> np.ndarray:
        take = min(count, self._spare.size)
        head, self._spare = self._spare[:take], self._spare[take:]
        need = count - take
        if need == 0:
            return head
        pairs = (need + 1) // 2
        u = self.uniforms(2 * pairs).reshape(pairs, 2)
        rad = np.sqrt(-2.0 * np.log(u[:, 0]))
        ang = 2.0 * math.pi * u[:, 1]
        z = np.empty(2 * pairs)
        z[0::2] = rad * np.cos(ang)
        z[1::2] = rad * np.sin(ang)
        self._spare = z[need:]
        return np.concatenate([head, z[:need]])


def sample_field(degree: int, stream: NormalStream) -> VectorField:
    return VectorField.from_coeffs(degree, stream.normals(2 * degree + 2))


def sample_coeffs(degree: int, stream: NormalStream, count: int) -> np.ndarray:
    return stream.normals(count * (2 * degree + 2)).reshape(count, 2 * degree + 2)


# --------------------------------------------------------------------------- config / tallies


@dataclass(frozen=True)
class SamplerConfig:
    degree: int
    samples: int
    seed: int = DEFAULT_SEED
    partitions: int = 1
    oracle_fallback: bool = False
    chunk: int = DEFAULT_CHUNK

    def __post_init__(self):
        if self.degree not in (1, 2, 3):
            raise ValueError(f"degree must be 1, 2 or 3, got {self.degree}")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.partitions < 1:
            raise ValueError("partitions must be >= 1")
        if self.chunk < 1:
            raise ValueError("chunk must be >= 1")

    def partition_sizes(self) -> list[int]:
        base, extra = divmod(self.samples, self.partitions)
        return [base + (1 if k < extra else 0) for k in range(self.partitions)]


@dataclass
class Tally:
    """Integer counts; merging is plain addition, so it is associative and commutative."""

    degree: int
    n: int = 0
    labels: np.ndarray = None
    index: dict = field(default_factory=dict)
    lines: dict = field(default_factory=dict)
    attractor: int = 0
    repeller: int = 0
    attractor_undecided: int = 0
    degenerate: int = 0
    reasons: dict = field(default_factory=dict)
    unrealized: int = 0
    unrealized_pairs: dict = field(default_factory=dict)
    fallbacks: int = 0

    def __post_init__(self):
        if self.labels is None:
            self.labels = np.zeros(len(PortraitLabel.for_degree(self.degree)), dtype=np.int64)

    def __add__(self, other: "Tally") -> "Tally":
        if other.degree != self.degree:
            raise ValueError("cannot merge tallies of different degrees")

        def addd(x, y):
            out = dict(x)
            for k, v in y.items():
                out[k] = out.get(k, 0) + v
            return out

        return Tally(
            self.degree,
            self.n + other.n,
            self.labels + other.labels,
            addd(self.index, other.index),
            addd(self.lines, other.lines),
            self.attractor + other.attractor,
            self.repeller + other.repeller,
            self.attractor_undecided + other.attractor_undecided,
            self.degenerate + other.degenerate,
            addd(self.reasons, other.reasons),
            self.unrealized + other.unrealized,
            addd(self.unrealized_pairs, other.unrealized_pairs),
            self.fallbacks + other.fallbacks,
        )

    @classmethod
    def from_batch(cls, res) -> "Tally":
        t = cls(res.degree, n=int(res.label.size))
        lab = res.label
        t.labels = np.bincount(lab[lab >= 0], minlength=t.labels.size).astype(np.int64)
        valid = res.reasons == 0
        for k, c in zip(*np.unique(res.index[valid], return_counts=True)):
            t.index[int(k)] = int(c)
        for k, c in zip(*np.unique(res.lines[valid], return_counts=True)):
            t.lines[int(k)] = int(c)
        classified = lab >= 0
        t.attractor = int(np.sum(classified & (res.attractor == -1)))
        t.repeller = int(np.sum(classified & (res.attractor == 1)))
        t.attractor_undecided = int(np.sum(classified & (res.attractor == 2)))
        deg = lab == DEGENERATE
        t.degenerate = int(deg.sum())
        for flag in Reason:
            if flag:
                c = int(np.sum(deg & ((res.reasons & int(flag)) != 0)))
                if c:
                    t.reasons[flag.name] = c
        unr = lab == UNREALIZED
        t.unrealized = int(unr.sum())
        for i, l in zip(res.index[unr], res.lines[unr]):
            key = f"{int(i)},{int(l)}"
            t.unrealized_pairs[key] = t.unrealized_pairs.get(key, 0) + 1
        t.fallbacks = int(res.fallback.sum())
        return t


def _run_partition(args) -> Tally:
    config, pid, count = args
    stream = NormalStream(config.seed, pid)
    tally = Tally(config.degree)
    done = 0
    while done < count:
        m = min(config.chunk, count - done)
        rows = sample_coeffs(config.degree, stream, m)
        tally = tally + Tally.from_batch(classify_batch(rows, config.degree, config.oracle_fallback))
        done += m
    return tally


# --------------------------------------------------------------------------- report


@dataclass(frozen=True)
class Relation:
    name: str
    residual: float
    z: Optional[float]


def _se(p: float, n: int) -> float:
    return math.sqrt(max(p * (1 - p), 0.0) / n)


@dataclass
class EstimationReport:
    degree: int
    samples: int
    seed: int
    partitions: int
    oracle_fallback: bool
    label_counts: dict
    index_counts: dict
    line_counts: dict
    attractor_count: int
    repeller_count: int
    attractor_undecided: int
    degenerate_count: int
    degenerate_reasons: dict
    unrealized_count: int
    unrealized_pairs: dict
    oracle_fallback_count: int
    relations: list = field(default_factory=list)
    wall_time: Optional[float] = None

    @classmethod
    def from_tally(cls, config: SamplerConfig, t: Tally, wall_time: Optional[float] = None):
        labels = PortraitLabel.for_degree(config.degree)
        return cls(
            degree=config.degree,
            samples=t.n,
            seed=config.seed,
            partitions=config.partitions,
            oracle_fallback=config.oracle_fallback,
            label_counts={lab.value: int(c) for lab, c in zip(labels, t.labels)},
            index_counts={k: t.index.get(k, 0) for k in range(-config.degree, config.degree + 1)}
            | {k: v for k, v in sorted(t.index.items()) if abs(k) > config.degree},
            line_counts={k: t.lines.get(k, 0) for k in range(config.degree + 2)},
            attractor_count=t.attractor,
            repeller_count=t.repeller,
            attractor_undecided=t.attractor_undecided,
            degenerate_count=t.degenerate,
            degenerate_reasons=dict(sorted(t.reasons.items())),
            unrealized_count=t.unrealized,
            unrealized_pairs=dict(sorted(t.unrealized_pairs.items())),
            oracle_fallback_count=t.fallbacks,
            wall_time=wall_time,
        )

    # frequencies -----------------------------------------------------------

    def p(self, label: str) -> float:
        return self.label_counts[label] / self.samples

    def se(self, label: str) -> float:
        return _se(self.p(label), self.samples)

    @property
    def label_frequencies(self) -> dict:
        return {k: v / self.samples for k, v in self.label_counts.items()}

    @property
    def index_frequencies(self) -> dict:
        return {k: v / self.samples for k, v in self.index_counts.items()}

    @property
    def line_frequencies(self) -> dict:
        return {k: v / self.samples for k, v in self.line_counts.items()}

    @property
    def attractor_frequency(self) -> float:
        return self.attractor_count / self.samples

    @property
    def repeller_frequency(self) -> float:
        return self.repeller_count / self.samples

    @property
    def degenerate_fraction(self) -> float:
        return self.degenerate_count / self.samples

    @property
    def unrealized_fraction(self) -> float:
        return self.unrealized_count / self.samples

    # serialisation ---------------------------------------------------------

    def to_dict(self, include_timing: bool = False) -> dict:
        N = self.samples
        d = {
            "degree": self.degree,
            "samples": N,
            "seed": self.seed,
            "partitions": self.partitions,
            "oracle_fallback": self.oracle_fallback,
            "labels": {
                k: {"count": c, "frequency": c / N, "std_error": _se(c / N, N)}
                for k, c in self.label_counts.items()
            },
            "index": {
                str(k): {"count": c, "frequency": c / N, "std_error": _se(c / N, N)}
                for k, c in self.index_counts.items()
            },
            "lines": {
                str(k): {"count": c, "frequency": c / N, "std_error": _se(c / N, N)}
                for k, c in self.line_counts.items()
            },
            "attractor": None,
            "repeller": None,
            "attractor_undecided": self.attractor_undecided,
            "degenerate": {
                "count": self.degenerate_count,
                "fraction": self.degenerate_fraction,
                "reasons": self.degenerate_reasons,
            },
            "unrealized": {"count": self.unrealized_count, "pairs": self.unrealized_pairs},
            "oracle_fallback_count": self.oracle_fallback_count,
            "relations": [
                {"name": r.name, "residual": r.residual, "z": r.z} for r in self.relations
            ],
        }
        if self.degree % 2 == 1:
            for key, c in (("attractor", self.attractor_count), ("repeller", self.repeller_count)):
                d[key] = {"count": c, "frequency": c / N, "std_error": _se(c / N, N)}
        if include_timing:
            d["wall_time"] = self.wall_time
        return d

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, ensure_ascii=False) + "\n"

    def to_csv(self) -> str:
        rows = ["label,count,frequency,std_error"]
        for k, c in self.label_counts.items():
            p = c / self.samples
            rows.append(f"{k},{c},{p!r},{_se(p, self.samples)!r}")
        return "\n".join(rows) + "\n"

    def to_text(self) -> str:
        N = self.samples
        out = [f"degree {self.degree}, N={N}, seed={self.seed}, partitions={self.partitions}"]
        for k, c in self.label_counts.items():
            out.append(f"  P({k}) = {c / N:.5f} ± {_se(c / N, N):.5f}")
        out.append("  index: " + ", ".join(f"u({k})={c / N:.5f}" for k, c in self.index_counts.items()))
        out.append("  lines: " + ", ".join(f"l({k})={c / N:.5f}" for k, c in self.line_counts.items()))
        if self.degree % 2 == 1:
            out.append(f"  attractor = {self.attractor_frequency:.5f}, repeller = {self.repeller_frequency:.5f}")
        out.append(f"  degenerate = {self.degenerate_count}, unrealized = {self.unrealized_count}")
        for r in self.relations:
            z = "n/a" if r.z is None else f"{r.z:+.2f}"
            out.append(f"  {r.name}: residual {r.residual:+.3e}, z {z}")
        return "\n".join(out) + "\n"


# --------------------------------------------------------------------------- estimation


def estimate(config: SamplerConfig, workers: Optional[int] = None) -> EstimationReport:
    """Classify ``config.samples`` random fields and tally every report field.

    Partitions run in a process pool of ``workers`` processes (default: up to
    the CPU count); tallies are summed in partition order.
    """
    t0 = time.perf_counter()
    tasks = [(config, pid, count) for pid, count in enumerate(config.partition_sizes())]
    if workers is None:
        workers = min(config.partitions, os.cpu_count() or 1)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            tallies = list(pool.map(_run_partition, tasks))
    else:
        tallies = [_run_partition(t) for t in tasks]
    total = Tally(config.degree)
    for t in tallies:
        total = total + t
    report = EstimationReport.from_tally(config, total, time.perf_counter() - t0)
    report.relations = check_relations(report)
    return report


def _combo(freqs: dict, weights: dict, target: float, n: int) -> tuple[float, Optional[float]]:
    """Residual and z-score of ``sum w_k p_k - target`` under the multinomial law."""
    mean = sum(w * freqs[k] for k, w in weights.items())
    second = sum(w * w * freqs[k] for k, w in weights.items())
    var = max(second - mean * mean, 0.0) / n
    resid = mean - target
    if var == 0:
        return resid, (0.0 if resid == 0 else None)
    return resid, resid / math.sqrt(var)


def _sum_relation(name: str, report: EstimationReport) -> Relation:
    """Labels plus unclassified samples account for every draw.

    A missing mass of degenerate or unrealized samples has probability zero under
    Gaussian coefficients, so it gets no sampling z-score; its size is reported separately
    as ``degenerate_fraction`` and ``unrealized_fraction``.
    """
    N = report.samples
    total = sum(report.label_counts.values()) + report.degenerate_count + report.unrealized_count
    resid = total / N - 1.0
    return Relation(name, resid, 0.0 if abs(resid) < 1e-12 else math.copysign(math.inf, resid))


def check_relations(report: EstimationReport) -> list[Relation]:
    """Residuals and z-scores of the probability identities for ``report.degree``."""
    n, N = report.degree, report.samples
    P = report.label_frequencies
    U = report.index_frequencies
    out = []

    def rel(name, freqs, weights, target=0.0):
        out.append(Relation(name, *_combo(freqs, weights, target, N)))

    ar = {"a": report.attractor_frequency, "r": report.repeller_frequency}
    if n == 1:
        half_root2 = math.sqrt(2) / 2
        rel("P(L1)=1/2", P, {"L1": 1}, 0.5)
        rel("P(L2)=sqrt(2)/2-1/2", P, {"L2": 1}, half_root2 - 0.5)
        rel("P(L3)=1-sqrt(2)/2", P, {"L3": 1}, 1 - half_root2)
        rel("a1=1/4", ar, {"a": 1}, 0.25)
        rel("r1=1/4", ar, {"r": 1}, 0.25)
    elif n == 2:
        lam2 = expected_lines(2)
        out.append(_sum_relation("sum P(Qj)+degenerate+unrealized=1", report))
        rel("P(Q1)+P(Q2)+P(Q3)=(Λ2-1)/2", P, {"Q1": 1, "Q2": 1, "Q3": 1}, (lam2 - 1) / 2)
        rel("P(Q1)=P(Q3)+P(Q5)", P, {"Q1": 1, "Q3": -1, "Q5": -1})
        rel("u2(2)=u2(-2)", U, {2: 1, -2: -1})
    elif n == 3:
        lam3 = expected_lines(3)
        out.append(_sum_relation("sum P(Cj)+degenerate+unrealized=1", report))
        w = {f"C{j}": 4 for j in range(1, 6)} | {f"C{j}": 2 for j in range(6, 9)}
        rel("4 sum_1^5 P(Cj)+2 sum_6^8 P(Cj)=Λ3", P, w, lam3)
        rel("P(C1)=P(C5)+P(C8)", P, {"C1": 1, "C5": -1, "C8": -1})
        rel(
            "P(C2)+P(C6)=P(C3)+P(C4)+P(C7)+P(C9)",
            P,
            {"C2": 1, "C6": 1, "C3": -1, "C4": -1, "C7": -1, "C9": -1},
        )
        rel("u3(1)=u3(-1)", U, {1: 1, -1: -1})
        rel("u3(3)=u3(-3)", U, {3: 1, -3: -1})
        rel("a3=r3", ar, {"a": 1, "r": -1})
    else:
        raise WrongDegree(f"no relations for degree {n}")
    return out
