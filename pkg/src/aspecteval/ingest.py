"""Parsers for run files, multi-aspect qrels, and signal tables, plus the
discretizers that turn continuous signals into graded aspect columns."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import (
    AspectCountMismatch,
    ConfigError,
    DuplicateDoc,
    MixedRunTag,
    ParseError,
    UnknownLabel,
)
from .measures import RankedList
from .schema import AspectSchema, GroundTruth, LabelTuple, apply_rules

MergeMaps = Mapping[str, Mapping[str, str]]


@dataclass(frozen=True)
class RunEntry:
    doc_id: str
    rank: int
    score: float


@dataclass(frozen=True)
class RunFile:
    """One system's retrieved lists: run_tag plus ordered entries per topic."""

    run_tag: str
    topics: dict[str, tuple[RunEntry, ...]]

    def topic_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.topics))

    def ranking(self, topic_id: str, depth: int | None = None) -> RankedList:
        """Ranked doc ids for a topic; empty if the run skipped the topic."""
        entries = self.topics.get(topic_id, ())
        docs = tuple(e.doc_id for e in entries)
        if depth is not None:
            docs = docs[:depth]
        return RankedList(topic_id, docs)


def _iter_lines(text: str) -> Iterable[tuple[int, str]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line


def parse_run(text: str, honor_rank: bool = False) -> RunFile:
    """Parse the standard six-column run format ``topic Q0 docid rank score tag``.

    Entries are ordered by score descending with doc_id breaking ties, so a
    shuffled file parses to the same run.  Pass ``honor_rank=True`` to order
    by the rank column instead.
    """
    rows: dict[str, list[RunEntry]] = {}
    seen: set[tuple[str, str]] = set()
    run_tag: str | None = None
    for lineno, line in _iter_lines(text):
        parts = line.split()
        if len(parts) != 6:
            raise ParseError(f"expected 6 fields, got {len(parts)}", lineno)
        topic, _q0, doc, rank_s, score_s, tag = parts
        try:
            rank = int(rank_s)
        except ValueError:
            raise ParseError(f"non-integer rank {rank_s!r}", lineno) from None
        try:
            score = float(score_s)
        except ValueError:
            raise ParseError(f"non-numeric score {score_s!r}", lineno) from None
        if not math.isfinite(score):
            raise ParseError(f"non-finite score {score_s!r}", lineno)
        if run_tag is None:
            run_tag = tag
        elif tag != run_tag:
            raise MixedRunTag(
                f"run tag changes from {run_tag!r} to {tag!r}", lineno
            )
        if (topic, doc) in seen:
            raise DuplicateDoc(f"doc {doc!r} repeated for topic {topic!r}", lineno)
        seen.add((topic, doc))
        rows.setdefault(topic, []).append(RunEntry(doc, rank, score))
    if run_tag is None:
        raise ParseError("run file contains no entries")
    key = (
        (lambda e: (e.rank, e.doc_id)) if honor_rank else (lambda e: (-e.score, e.doc_id))
    )
    topics = {t: tuple(sorted(es, key=key)) for t, es in sorted(rows.items())}
    return RunFile(run_tag, topics)


def serialize_run(run: RunFile) -> str:
    """Canonical text form: topics ascending, ranks renumbered from 1."""
    lines = []
    for topic in run.topic_ids():
        for position, e in enumerate(run.topics[topic], start=1):
            lines.append(f"{topic} Q0 {e.doc_id} {position} {e.score!r} {run.run_tag}")
    return "\n".join(lines) + "\n"


def _resolve_grade(
    token: str,
    aspect_idx: int,
    schema: AspectSchema,
    merge: MergeMaps | None,
    lineno: int,
) -> int:
    aspect = schema.aspects[aspect_idx]
    if token.lstrip("-").isdigit():
        idx = int(token)
        if not 0 <= idx < aspect.n_grades:
            raise UnknownLabel(
                f"grade index {idx} out of range for aspect {aspect.name!r}", lineno
            )
        name = aspect.labels[idx]
    else:
        name = token
    if merge and name in merge.get(aspect.name, {}):
        name = merge[aspect.name][name]
    if name not in aspect.labels:
        raise UnknownLabel(
            f"label {name!r} is not defined for aspect {aspect.name!r}", lineno
        )
    return aspect.index(name)


def parse_qrels(
    text: str, schema: AspectSchema, merge: MergeMaps | None = None
) -> tuple[GroundTruth, int]:
    """Parse multi-aspect qrels, returning the ground truth and the number of
    coupling-rule corrections applied.

    Format: a ``# aspects: <name> ...`` header naming the columns in schema
    order, then rows ``topic 0 docid grade [grade ...]``.  Grades are label
    names or integer indices; a configured merge map rewrites label names
    first; missing trailing columns are filled with the worst label; tuples
    that still violate a coupling rule are forced to the rule's label.
    """
    header: list[str] | None = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if body.startswith("aspects:"):
                header = body[len("aspects:") :].split()
            break
        break
    if header is None:
        raise ParseError("missing '# aspects:' header", 1)
    if tuple(header) != schema.names:
        raise ParseError(
            f"header aspects {header} do not match schema {list(schema.names)}", 1
        )

    entries: dict[tuple[str, str], LabelTuple] = {}
    corrections = 0
    for lineno, line in _iter_lines(text):
        parts = line.split()
        if len(parts) < 4:
            raise ParseError(f"expected at least 4 fields, got {len(parts)}", lineno)
        topic, _iteration, doc = parts[0], parts[1], parts[2]
        grades = parts[3:]
        if len(grades) > schema.n_aspects:
            raise AspectCountMismatch(
                f"{len(grades)} grade columns for {schema.n_aspects} aspects", lineno
            )
        if (topic, doc) in entries:
            raise DuplicateDoc(f"doc {doc!r} judged twice for topic {topic!r}", lineno)
        indices = [
            _resolve_grade(tok, i, schema, merge, lineno) for i, tok in enumerate(grades)
        ]
        indices.extend(0 for _ in range(schema.n_aspects - len(indices)))
        fixed, n = apply_rules(tuple(indices), schema)
        corrections += n
        entries[(topic, doc)] = fixed
    return GroundTruth(entries), corrections


def join_aspect_qrels(
    per_aspect: Mapping[str, str],
    schema: AspectSchema,
    merge: MergeMaps | None = None,
) -> tuple[GroundTruth, int]:
    """Join single-aspect qrels files (``topic 0 docid grade`` rows) into one
    ground truth.

    The join is outer: a (topic, doc) pair judged in any file appears in the
    result, with unjudged aspects filled with the worst label.  Returns the
    ground truth and the coupling-correction count.
    """
    for name in per_aspect:
        schema.aspect_index(name)
    partial: dict[tuple[str, str], list[int]] = {}
    for name, text in sorted(per_aspect.items()):
        idx = schema.aspect_index(name)
        seen: set[tuple[str, str]] = set()
        for lineno, line in _iter_lines(text):
            parts = line.split()
            if len(parts) != 4:
                raise ParseError(
                    f"expected 4 fields in {name!r} qrels, got {len(parts)}", lineno
                )
            topic, _iteration, doc, token = parts
            if (topic, doc) in seen:
                raise DuplicateDoc(
                    f"doc {doc!r} judged twice for topic {topic!r} in {name!r}", lineno
                )
            seen.add((topic, doc))
            grade = _resolve_grade(token, idx, schema, merge, lineno)
            partial.setdefault((topic, doc), [0] * schema.n_aspects)[idx] = grade
    entries: dict[tuple[str, str], LabelTuple] = {}
    corrections = 0
    for key in sorted(partial):
        fixed, n = apply_rules(tuple(partial[key]), schema)
        corrections += n
        entries[key] = fixed
    return GroundTruth(entries), corrections


def parse_signals(text: str) -> dict[str, float]:
    """Parse a ``docid score`` table into a doc -> raw score map."""
    signals: dict[str, float] = {}
    for lineno, line in _iter_lines(text):
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected 2 fields, got {len(parts)}", lineno)
        doc, score_s = parts
        try:
            score = float(score_s)
        except ValueError:
            raise ParseError(f"non-numeric score {score_s!r}", lineno) from None
        if doc in signals:
            raise DuplicateDoc(f"doc {doc!r} appears twice", lineno)
        signals[doc] = score
    return signals


def discretize_quantile(
    signals: Mapping[str, float], fractions: list[float]
) -> dict[str, int]:
    """Assign grades by rank quantiles, highest grade first.

    ``fractions`` gives the share of docs per grade from the best grade down
    (so ``(0.05, 0.10, 0.85)`` sends the top 5% to grade 2).  Block
    boundaries are cumulative counts rounded to the nearest integer; the top
    block always keeps at least one document, so tiny tables collapse into
    the best grade rather than the worst.  An empty table yields an empty map.
    """
    if not fractions or any(f <= 0 for f in fractions):
        raise ConfigError("quantile fractions must be positive")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ConfigError(f"quantile fractions sum to {sum(fractions)!r}, expected 1")
    if not signals:
        return {}
    n = len(signals)
    docs = sorted(signals, key=lambda d: (-signals[d], d))
    n_grades = len(fractions)
    boundaries = []
    acc = 0.0
    for f in fractions:
        acc += f
        boundaries.append(math.floor(acc * n + 0.5))
    boundaries[0] = max(boundaries[0], 1)
    for i in range(1, n_grades):
        boundaries[i] = max(boundaries[i], boundaries[i - 1])
    boundaries[-1] = n
    grades: dict[str, int] = {}
    start = 0
    for block, bound in enumerate(boundaries):
        for doc in docs[start:bound]:
            grades[doc] = n_grades - 1 - block
        start = bound
    return grades


def discretize_threshold(
    signals: Mapping[str, float], thresholds: list[float]
) -> dict[str, int]:
    """Grade each doc by how many thresholds its raw score reaches."""
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise ConfigError("thresholds must be strictly ascending")
    return {
        doc: sum(1 for cut in thresholds if cut <= score)
        for doc, score in signals.items()
    }
