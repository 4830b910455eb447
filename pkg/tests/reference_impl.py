"""Straight-line reference implementations for the acceptance gate.

Everything here is written for obviousness, not speed: plain loops, no code
shared with the package under test.  The one deliberate overlap is the
bootstrap RNG recipe (per-pair SeedSequence over the seed and the sha256 of
each run tag, one uniform index block of shape (B, n)), which is part of the
tool's output contract and is rebuilt here from that description.
"""

import hashlib
import math
import random

import numpy as np


# ---------------------------------------------------------------------------
# score-table reader (mirrors the TSV layout, not the implementation)


def read_score_table(text):
    """Return (measure, sorted run tags, sorted topic ids, {(run, topic): score})."""
    cells = {}
    measure = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        run, topic, label, score = line.split("\t")
        if topic == "all":
            continue
        measure = label
        cells[(run, topic)] = float(score)
    runs = sorted({r for r, _ in cells})
    topics = sorted({t for _, t in cells})
    return measure, runs, topics, cells


# ---------------------------------------------------------------------------
# rank correlation


def ref_tau_b(x, y):
    """Pair-counting tau-b; None when either list is constant."""
    if len(set(x)) == 1 or len(set(y)) == 1:
        return None
    concordant = discordant = ties_x_only = ties_y_only = 0
    for i in range(len(x)):
        for j in range(i + 1, len(x)):
            dx, dy = x[i] - x[j], y[i] - y[j]
            if dx == 0 and dy == 0:
                continue
            if dx == 0:
                ties_x_only += 1
            elif dy == 0:
                ties_y_only += 1
            elif (dx > 0) == (dy > 0):
                concordant += 1
            else:
                discordant += 1
    denom = math.sqrt(
        (concordant + discordant + ties_x_only)
        * (concordant + discordant + ties_y_only)
    )
    return (concordant - discordant) / denom


def ref_correlation(table_a, table_b):
    """Per-topic tau between two score tables over the same runs/topics."""
    _, runs, topics, cells_a = table_a
    _, _, _, cells_b = table_b
    per_topic = {}
    excluded = 0
    for topic in topics:
        tau = ref_tau_b(
            [cells_a[(r, topic)] for r in runs], [cells_b[(r, topic)] for r in runs]
        )
        if tau is None:
            excluded += 1
        else:
            per_topic[topic] = tau
    mean = sum(per_topic.values()) / len(per_topic) if per_topic else None
    equivalent = mean is not None and mean > 0.9
    return per_topic, excluded, mean, equivalent


# ---------------------------------------------------------------------------
# paired bootstrap


def ref_pair_rng(seed, run_a, run_b):
    def digest(name):
        return int.from_bytes(hashlib.sha256(name.encode()).digest()[:8], "big")

    lo, hi = sorted((run_a, run_b))
    return np.random.default_rng(np.random.SeedSequence([seed, digest(lo), digest(hi)]))


def ref_dp(table, b_samples, alpha, seed):
    """Per-pair (t, asl, significant) rows plus the significant percentage."""
    _, runs, topics, cells = table
    n = len(topics)
    rows = []
    for i in range(len(runs)):
        for j in range(i + 1, len(runs)):
            run_a, run_b = runs[i], runs[j]
            d = [cells[(run_a, t)] - cells[(run_b, t)] for t in topics]
            mean = sum(d) / n
            var = sum((v - mean) ** 2 for v in d) / (n - 1)
            if var == 0.0:
                t_obs = math.copysign(math.inf, mean) if mean else 0.0
                asl = 0.0 if mean else 1.0
                significant = mean != 0.0
            else:
                t_obs = mean / math.sqrt(var / n)
                w = [v - mean for v in d]
                idx = ref_pair_rng(seed, run_a, run_b).integers(
                    0, n, size=(b_samples, n)
                ).tolist()
                hits = 0
                for row in idx:
                    sample = [w[p] for p in row]
                    m = sum(sample) / n
                    s_var = sum((v - m) ** 2 for v in sample) / (n - 1)
                    if s_var == 0.0:
                        t_star = 0.0 if m == 0.0 else math.inf
                    else:
                        t_star = m / math.sqrt(s_var / n)
                    if abs(t_star) >= abs(t_obs):
                        hits += 1
                asl = hits / b_samples
                significant = asl < alpha
            rows.append((run_a, run_b, t_obs, asl, significant))
    percentage = 100.0 * sum(1 for r in rows if r[4]) / len(rows)
    return rows, percentage


# ---------------------------------------------------------------------------
# ranking audits


def ref_best_runs(table):
    _, runs, topics, cells = table
    best = {}
    for topic in topics:
        top = max(cells[(r, topic)] for r in runs)
        best[topic] = sorted(r for r in runs if cells[(r, topic)] == top)[0]
    return best


def ref_zero_aspect(best, run_docs, judged, k):
    """Rows (rank label, count, slots, percent) for ranks 1..k plus a total.

    ``run_docs`` maps run tag -> topic -> ranked doc ids; ``judged`` maps
    (topic, doc) -> grade-index tuple.  Unjudged docs count as all-worst.
    """
    counts = [0] * k
    slots = [0] * k
    for topic in sorted(best):
        docs = run_docs[best[topic]].get(topic, [])[:k]
        for position, doc in enumerate(docs):
            slots[position] += 1
            grades = judged.get((topic, doc))
            if grades is None or sum(grades) == 0:
                counts[position] += 1
    rows = []
    for position in range(k):
        percent = 100.0 * counts[position] / slots[position] if slots[position] else 0.0
        rows.append((str(position + 1), counts[position], slots[position], percent))
    total_count, total_slots = sum(counts), sum(slots)
    total_percent = 100.0 * total_count / total_slots if total_slots else 0.0
    rows.append((f"1-{k}", total_count, total_slots, total_percent))
    return rows


def ref_quality_bands(best, run_docs, judged, bands):
    """Rows (band, n_docs, mean grade-index sum or None) per rank band."""
    rows = []
    for lo, hi in bands:
        values = []
        for topic in sorted(best):
            docs = run_docs[best[topic]].get(topic, [])
            for doc in docs[lo - 1 : hi]:
                grades = judged.get((topic, doc))
                values.append(sum(grades) if grades is not None else 0)
        rows.append(((lo, hi), len(values), sum(values) / len(values) if values else None))
    return rows


# ---------------------------------------------------------------------------
# synthetic benchmark: 10 runs x 50 topics x 3 aspects, planted gradients


SYNTH_SCHEMA = """\
aspect relevance
label nr 0
label mr 1
label fr 2
label hr 3
aspect correctness
label nc 0
label pc 1.5
label c 3
aspect credibility
label nb 0
label b 1
"""

SYNTH_GRADES = (4, 3, 2)


def synth_benchmark(seed=1202):
    """Deterministic benchmark corpus.

    Each topic gets 18 judged documents whose grades follow a latent quality
    value, plus 4 never-judged distractors.  Ten systems rank the pool by
    latent quality blurred with increasing noise, so earlier systems are
    genuinely better.  Returns the schema/qrels/run texts alongside plain
    dict views (judged grades, per-run rankings) for the reference side.
    """
    rng = random.Random(seed)
    topics = [f"t{i:02d}" for i in range(50)]
    run_tags = [f"s{i}" for i in range(10)]
    judged = {}
    quality = {}
    pools = {}
    qrels_lines = ["# aspects: relevance correctness credibility"]
    for topic in topics:
        docs = [f"{topic}-d{j:02d}" for j in range(18)]
        distractors = [f"{topic}-x{j}" for j in range(4)]
        pools[topic] = docs + distractors
        for doc in docs:
            u = rng.random()
            quality[(topic, doc)] = u
            grades = []
            for n_grades in SYNTH_GRADES:
                blurred = min(0.999, max(0.0, u + rng.gauss(0.0, 0.18)))
                grades.append(int(blurred * n_grades))
            judged[(topic, doc)] = tuple(grades)
            qrels_lines.append(f"{topic} 0 {doc} {grades[0]} {grades[1]} {grades[2]}")
        for doc in distractors:
            quality[(topic, doc)] = rng.random() * 0.5
    run_docs = {}
    run_texts = {}
    for position, tag in enumerate(run_tags):
        sigma = 0.05 + 0.12 * position
        per_topic = {}
        lines = []
        for topic in topics:
            keyed = sorted(
                pools[topic],
                key=lambda d: (-(quality[(topic, d)] + rng.gauss(0.0, sigma)), d),
            )
            retrieved = keyed[:15]
            per_topic[topic] = retrieved
            for rank, doc in enumerate(retrieved, start=1):
                lines.append(f"{topic} Q0 {doc} {rank} {float(100 - rank)} {tag}")
        run_docs[tag] = per_topic
        run_texts[tag] = "\n".join(lines) + "\n"
    return {
        "schema_text": SYNTH_SCHEMA,
        "qrels_text": "\n".join(qrels_lines) + "\n",
        "run_texts": run_texts,
        "run_docs": run_docs,
        "judged": judged,
    }
