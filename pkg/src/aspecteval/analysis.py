"""Meta-evaluation over score matrices.

Four analyses: per-topic Kendall tau-b between two measures, paired-bootstrap
discriminative power, the zero-aspect@k audit (how often a measure's "best"
runs put worthless documents at the top ranks), and rank-band quality audits.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy import stats

from .errors import ConfigError, DegenerateInput, MatrixMismatch
from .measures import ScoreMatrix
from .schema import AspectSchema, GroundTruth


def kendall_tau(x: Sequence[float], y: Sequence[float]) -> float:
    """Tie-aware Kendall correlation (tau-b) between two score lists.

    Raises DegenerateInput when either list is constant, where tau is
    undefined; callers treat such topics as missing rather than 0.
    """
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise ValueError("need at least two scores per list")
    if len(set(x)) == 1 or len(set(y)) == 1:
        raise DegenerateInput("tau is undefined for a constant score list")
    tau = stats.kendalltau(x, y, variant="b").statistic
    return max(-1.0, min(1.0, float(tau)))


EQUIVALENCE_THRESHOLD = 0.9


@dataclass(frozen=True)
class CorrelationReport:
    measure_a: str
    measure_b: str
    per_topic: dict[str, float]
    excluded: int
    mean_tau: float | None
    equivalent: bool


def measure_correlation(m1: ScoreMatrix, m2: ScoreMatrix) -> CorrelationReport:
    """Per-topic tau between the system rankings two measures induce.

    Topics where either measure scores all runs identically are excluded
    from the mean (tau undefined there).  The ``equivalent`` flag marks a
    mean above 0.9.
    """
    if m1.run_tags != m2.run_tags or m1.topic_ids != m2.topic_ids:
        raise MatrixMismatch(
            f"matrices {m1.measure!r} and {m2.measure!r} cover different runs or topics"
        )
    per_topic: dict[str, float] = {}
    excluded = 0
    for topic in m1.topic_ids:
        try:
            per_topic[topic] = kendall_tau(
                m1.topic_scores(topic), m2.topic_scores(topic)
            )
        except DegenerateInput:
            excluded += 1
    mean_tau = sum(per_topic.values()) / len(per_topic) if per_topic else None
    equivalent = mean_tau is not None and mean_tau > EQUIVALENCE_THRESHOLD
    return CorrelationReport(m1.measure, m2.measure, per_topic, excluded, mean_tau, equivalent)


@dataclass(frozen=True)
class PairTest:
    run_a: str
    run_b: str
    t: float
    asl: float
    significant: bool


@dataclass(frozen=True)
class DPReport:
    measure: str
    b_samples: int
    alpha: float
    seed: int
    pairs: tuple[PairTest, ...]

    @property
    def pairs_total(self) -> int:
        return len(self.pairs)

    @property
    def pairs_significant(self) -> int:
        return sum(1 for p in self.pairs if p.significant)

    @property
    def percentage(self) -> float:
        return 100.0 * self.pairs_significant / self.pairs_total


def _pair_rng(seed: int, run_a: str, run_b: str) -> np.random.Generator:
    """Deterministic per-pair generator, independent of pair iteration order
    and of the process hash seed."""
    def h(name: str) -> int:
        return int.from_bytes(hashlib.sha256(name.encode()).digest()[:8], "big")

    lo, hi = sorted((run_a, run_b))
    return np.random.default_rng(np.random.SeedSequence([seed, h(lo), h(hi)]))


def _bootstrap_asl(d: np.ndarray, b_samples: int, rng: np.random.Generator) -> tuple[float, float]:
    """Observed studentized mean and its achieved significance level.

    Resamples the centered differences with replacement and counts how often
    the resampled statistic is at least as extreme as the observed one.
    """
    n = len(d)
    mean = d.mean()
    sd = d.std(ddof=1)
    sqrt_n = math.sqrt(n)
    t_obs = mean / (sd / sqrt_n)
    w = d - mean
    hits = 0
    chunk = max(1, 2_000_000 // n)
    remaining = b_samples
    while remaining > 0:
        block = min(chunk, remaining)
        idx = rng.integers(0, n, size=(block, n))
        samples = w[idx]
        sample_mean = samples.mean(axis=1)
        sample_sd = samples.std(axis=1, ddof=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            t_star = sample_mean / (sample_sd / sqrt_n)
        # A constant resample has sd 0: its statistic is 0 when the mean is
        # also 0 and unboundedly extreme otherwise.
        t_star = np.where(
            sample_sd == 0.0,
            np.where(sample_mean == 0.0, 0.0, np.inf),
            t_star,
        )
        hits += int(np.count_nonzero(np.abs(t_star) >= abs(t_obs)))
        remaining -= block
    return float(t_obs), hits / b_samples


def discriminative_power(
    m: ScoreMatrix, b_samples: int, alpha: float, seed: int
) -> DPReport:
    """Paired-bootstrap test over every unordered run pair.

    For each pair the per-topic score differences give an observed
    studentized mean; the ASL is the fraction of seeded bootstrap resamples
    (of the centered differences) at least as extreme.  A pair is
    discriminated when ASL < alpha.  Pairs whose differences have zero
    spread skip the bootstrap: they are significant iff the mean difference
    is nonzero.
    """
    if len(m.run_tags) < 2:
        raise ConfigError("discriminative power needs at least two runs")
    if len(m.topic_ids) < 2:
        raise ConfigError("discriminative power needs at least two topics")
    if b_samples < 1:
        raise ConfigError("bootstrap sample count must be at least 1")
    if not 0.0 < alpha < 1.0:
        raise ConfigError("alpha must lie strictly between 0 and 1")
    if seed < 0:
        raise ConfigError("seed must be non-negative")
    pairs = []
    for run_a, run_b in itertools.combinations(m.run_tags, 2):
        d = np.array(
            [m.score(run_a, t) - m.score(run_b, t) for t in m.topic_ids], dtype=float
        )
        if d.std(ddof=1) == 0.0:
            mean = d.mean()
            t_obs = math.copysign(math.inf, mean) if mean != 0.0 else 0.0
            significant = mean != 0.0
            asl = 0.0 if significant else 1.0
        else:
            t_obs, asl = _bootstrap_asl(d, b_samples, _pair_rng(seed, run_a, run_b))
            significant = asl < alpha
        pairs.append(PairTest(run_a, run_b, t_obs, asl, significant))
    return DPReport(m.measure, b_samples, alpha, seed, tuple(pairs))


def select_best_runs(m: ScoreMatrix) -> dict[str, str]:
    """Per topic, the run with the highest score (ties: run_tag ascending)."""
    return {
        topic: min(m.run_tags, key=lambda r: (-m.score(r, topic), r))
        for topic in m.topic_ids
    }


@dataclass(frozen=True)
class ZeroAspectRow:
    rank: str
    count: int
    slots: int
    percent: float


@dataclass(frozen=True)
class ZeroAspectReport:
    k: int
    rows: tuple[ZeroAspectRow, ...]
    total: ZeroAspectRow


def _runs_by_tag(runs) -> Mapping[str, object]:
    if isinstance(runs, Mapping):
        return runs
    return {rf.run_tag: rf for rf in runs}


def zero_aspect_at_k(
    best: Mapping[str, str],
    runs,
    gt: GroundTruth,
    schema: AspectSchema,
    k: int = 5,
) -> ZeroAspectReport:
    """Count worthless documents in the top-k of each topic's best run.

    A document counts when its grade indices sum to 0 over all aspects;
    unjudged documents count as all-worst.  Percentages are relative to the
    number of (topic, rank) slots actually filled, since short rankings
    leave slots empty.
    """
    if k < 1:
        raise ConfigError("k must be at least 1")
    by_tag = _runs_by_tag(runs)
    per_rank_count = [0] * k
    per_rank_slots = [0] * k
    for topic in sorted(best):
        try:
            rf = by_tag[best[topic]]
        except KeyError:
            raise ConfigError(f"best run {best[topic]!r} not among the loaded runs") from None
        docs = rf.ranking(topic).doc_ids[:k]
        for i, doc in enumerate(docs):
            per_rank_slots[i] += 1
            t = gt.get(topic, doc)
            if t is None or sum(t) == 0:
                per_rank_count[i] += 1
    def row(label: str, count: int, slots: int) -> ZeroAspectRow:
        percent = 100.0 * count / slots if slots else 0.0
        return ZeroAspectRow(label, count, slots, percent)

    rows = tuple(
        row(str(r + 1), per_rank_count[r], per_rank_slots[r]) for r in range(k)
    )
    total = row(f"1-{k}", sum(per_rank_count), sum(per_rank_slots))
    return ZeroAspectReport(k, rows, total)


@dataclass(frozen=True)
class QualityBandRow:
    band: tuple[int, int]
    n_docs: int
    mean_sum: float | None


@dataclass(frozen=True)
class QualityBandReport:
    rows: tuple[QualityBandRow, ...]


def quality_bands(
    best: Mapping[str, str],
    runs,
    gt: GroundTruth,
    schema: AspectSchema,
    bands: Sequence[tuple[int, int]],
) -> QualityBandReport:
    """Mean grade-index sum of retrieved documents per rank band.

    Bands are inclusive 1-based rank intervals, disjoint and ascending.
    A band no topic's best run reaches is reported with mean None (absent
    in the TSV), not as 0.
    """
    previous_hi = 0
    for lo, hi in bands:
        if lo < 1 or hi < lo:
            raise ConfigError(f"bad rank band {lo}-{hi}")
        if lo <= previous_hi:
            raise ConfigError("rank bands must be disjoint and ascending")
        previous_hi = hi
    by_tag = _runs_by_tag(runs)
    sums: dict[tuple[int, int], list[int]] = {band: [] for band in bands}
    for topic in sorted(best):
        try:
            rf = by_tag[best[topic]]
        except KeyError:
            raise ConfigError(f"best run {best[topic]!r} not among the loaded runs") from None
        docs = rf.ranking(topic).doc_ids
        for lo, hi in bands:
            for doc in docs[lo - 1 : hi]:
                t = gt.get(topic, doc)
                sums[(lo, hi)].append(sum(t) if t is not None else 0)
    rows = tuple(
        QualityBandRow(
            band,
            len(values),
            (sum(values) / len(values)) if values else None,
        )
        for band, values in ((b, sums[b]) for b in bands)
    )
    return QualityBandReport(rows)
