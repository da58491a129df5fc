"""Token alignment, label projection, and discrepancy classification.

Generated text rarely reproduces the source verbatim, so predicted spans
live on the wrong token sequence. This module aligns generated tokens
back onto source tokens with a global minimum-cost edit script, projects
span labels through it, and classifies every difference into the
discrepancy taxonomy.

Cost model (quarter units internally so the DP stays in integers):
  match      0    normalized equality (casefold + punctuation folding)
  near sub   0.25 raw edit distance <= 1, not normalization-equal
  substitute 1
  insert     1    generated token with no source counterpart
  delete     1    source token missing from the generation
Ties are broken by op preference Match > Substitute > Delete > Insert,
applied left to right, so scripts are deterministic.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from acdkit.corpus.bio import O_TAG, bio_to_spans, spans_to_bio
from acdkit.corpus.model import ComponentSpan

MATCH_COST = 0
NEAR_SUB_COST = 1  # 0.25 in whole units
FULL_COST = 4  # 1.0 in whole units
COST_UNIT = 4.0

# Fold typographic punctuation variants before comparing tokens.
_PUNCT_FOLD = str.maketrans(
    {
        "’": "'",
        "‘": "'",
        "‚": "'",
        "‛": "'",
        "“": '"',
        "”": '"',
        "„": '"',
        "‟": '"',
        "–": "-",
        "—": "-",
        "‑": "-",
        "−": "-",
        "…": "...",
        " ": " ",
    }
)


def normalize_token(text: str) -> str:
    return text.translate(_PUNCT_FOLD).casefold()


def _edit_distance_at_most_one(a: str, b: str) -> bool:
    if abs(len(a) - len(b)) > 1:
        return False
    if a == b:
        return True
    if len(a) == len(b):
        return sum(x != y for x, y in zip(a, b)) <= 1
    short, long_ = (a, b) if len(a) < len(b) else (b, a)
    i = 0
    while i < len(short) and short[i] == long_[i]:
        i += 1
    return short[i:] == long_[i + 1 :]


def token_pair_cost(source: str, generated: str) -> int:
    """Pairing cost in quarter units; 0 means the pair is a Match."""
    if normalize_token(source) == normalize_token(generated):
        return MATCH_COST
    if _edit_distance_at_most_one(source, generated):
        return NEAR_SUB_COST
    return FULL_COST


class EditKind(enum.Enum):
    MATCH = "M"
    SUBSTITUTE = "S"
    INSERT = "I"
    DELETE = "D"


@dataclass(frozen=True, slots=True)
class EditOp:
    """One step of the edit script; absent index means no counterpart."""

    kind: EditKind
    source_index: int | None
    generated_index: int | None


def align_tokens(
    source: Sequence[str], generated: Sequence[str]
) -> list[EditOp]:
    """Minimum-cost global alignment with deterministic tie-breaking."""
    m, n = len(source), len(generated)
    pair = [[token_pair_cost(source[i], generated[j]) for j in range(n)] for i in range(m)]

    # Suffix costs: best[i][j] = optimal cost aligning source[i:] vs generated[j:].
    best = [[0] * (n + 1) for _ in range(m + 1)]
    for j in range(n - 1, -1, -1):
        best[m][j] = (n - j) * FULL_COST
    for i in range(m - 1, -1, -1):
        best[i][n] = (m - i) * FULL_COST
        row, below = best[i], best[i + 1]
        pair_row = pair[i]
        for j in range(n - 1, -1, -1):
            row[j] = min(
                pair_row[j] + below[j + 1],
                FULL_COST + below[j],
                FULL_COST + row[j + 1],
            )

    ops: list[EditOp] = []
    i = j = 0
    while i < m or j < n:
        target = best[i][j]
        if i < m and j < n and pair[i][j] + best[i + 1][j + 1] == target:
            kind = EditKind.MATCH if pair[i][j] == MATCH_COST else EditKind.SUBSTITUTE
            ops.append(EditOp(kind, i, j))
            i += 1
            j += 1
        elif i < m and FULL_COST + best[i + 1][j] == target:
            ops.append(EditOp(EditKind.DELETE, i, None))
            i += 1
        else:
            ops.append(EditOp(EditKind.INSERT, None, j))
            j += 1
    return ops


def alignment_cost(
    source: Sequence[str], generated: Sequence[str], ops: Sequence[EditOp]
) -> float:
    """Cost of an edit script in whole units."""
    total = 0
    for op in ops:
        if op.kind is EditKind.MATCH:
            continue
        elif op.kind is EditKind.SUBSTITUTE:
            total += token_pair_cost(source[op.source_index], generated[op.generated_index])
        else:
            total += FULL_COST
    return total / COST_UNIT


def ops_compact(ops: Sequence[EditOp]) -> str:
    """One letter per op, e.g. 'MMMSID'."""
    return "".join(op.kind.value for op in ops)


def project_labels(
    ops: Sequence[EditOp],
    generated_spans: Sequence[ComponentSpan],
    n_source_tokens: int,
    n_generated_tokens: int,
) -> list[str]:
    """Transport generated span labels onto source tokens as valid BIO.

    A source token aligned (Match/Substitute) to a generated token inside
    a span takes that span's kind. A deleted source token takes a kind
    only when both its nearest labeled neighbors agree (dropping a word
    inside a span must not split the span). B/I structure is recomputed
    from the resulting kind runs, so output is always scheme-valid.
    """
    gen_kind = [None] * n_generated_tokens
    for span in generated_spans:
        for k in range(span.start_token, span.end_token + 1):
            gen_kind[k] = span.kind

    src_kind = [None] * n_source_tokens
    deleted: list[int] = []
    for op in ops:
        if op.kind in (EditKind.MATCH, EditKind.SUBSTITUTE):
            src_kind[op.source_index] = gen_kind[op.generated_index]
        elif op.kind is EditKind.DELETE:
            deleted.append(op.source_index)

    # Flanked-both-sides rule over maximal runs of deleted tokens.
    run_start = None
    for idx in deleted + [None]:
        if run_start is None:
            if idx is None:
                break
            run_start, run_end = idx, idx
            continue
        if idx is not None and idx == run_end + 1:
            run_end = idx
            continue
        left = src_kind[run_start - 1] if run_start > 0 else None
        right = src_kind[run_end + 1] if run_end + 1 < n_source_tokens else None
        if left is not None and left is right:
            for k in range(run_start, run_end + 1):
                src_kind[k] = left
        if idx is None:
            break
        run_start, run_end = idx, idx

    tags = [O_TAG] * n_source_tokens
    i = 0
    while i < n_source_tokens:
        kind = src_kind[i]
        if kind is None:
            i += 1
            continue
        j = i
        while j + 1 < n_source_tokens and src_kind[j + 1] is kind:
            j += 1
        run = spans_to_bio(j - i + 1, [ComponentSpan(0, j - i, kind)])
        tags[i : j + 1] = run
        i = j + 1
    return tags


class DiscrepancyKind(str, enum.Enum):
    LABEL_REFINEMENT = "LabelRefinement"
    LEXICAL_ADJUSTMENT = "LexicalAdjustment"
    HALLUCINATION = "Hallucination"
    DISCOVERY = "Discovery"
    MISS = "Miss"
    BOUNDARY_SHIFT = "BoundaryShift"


@dataclass(frozen=True, slots=True)
class DiscrepancyRecord:
    """One classified difference between gold and projected structure.

    Span-level records reference gold_span and/or projected_span (source
    token indices); token-level records reference source_index and/or
    generated_index.
    """

    kind: DiscrepancyKind
    note: str
    gold_span: ComponentSpan | None = None
    projected_span: ComponentSpan | None = None
    source_index: int | None = None
    generated_index: int | None = None


DEFAULT_JACCARD_THRESHOLD = 0.8


def _token_jaccard(a: ComponentSpan, b: ComponentSpan) -> float:
    inter = min(a.end_token, b.end_token) - max(a.start_token, b.start_token) + 1
    if inter <= 0:
        return 0.0
    union = a.token_count + b.token_count - inter
    return inter / union


def _overlap(a: ComponentSpan, b: ComponentSpan) -> int:
    return max(0, min(a.end_token, b.end_token) - max(a.start_token, b.start_token) + 1)


def match_spans(
    gold_spans: Sequence[ComponentSpan], projected_spans: Sequence[ComponentSpan]
) -> list[tuple[int, int]]:
    """Greedy one-to-one matching by descending token overlap.

    Ties prefer the earlier gold span, then the earlier projected span,
    so matching is deterministic. Every span ends up matched at most once.
    """
    candidates = []
    for gi, gold in enumerate(gold_spans):
        for pi, proj in enumerate(projected_spans):
            ov = _overlap(gold, proj)
            if ov > 0:
                candidates.append((-ov, gi, pi))
    candidates.sort()
    used_gold: set[int] = set()
    used_proj: set[int] = set()
    matches: list[tuple[int, int]] = []
    for _, gi, pi in candidates:
        if gi in used_gold or pi in used_proj:
            continue
        used_gold.add(gi)
        used_proj.add(pi)
        matches.append((gi, pi))
    return sorted(matches)


def classify_discrepancies(
    gold_spans: Sequence[ComponentSpan],
    projected_bio: Sequence[str],
    ops: Sequence[EditOp],
    source_tokens: Sequence[str],
    generated_tokens: Sequence[str],
    jaccard_threshold: float = DEFAULT_JACCARD_THRESHOLD,
) -> list[DiscrepancyRecord]:
    """Classify span-level and token-level differences.

    Span level, over one-to-one overlap matching: same extent (Jaccard at
    or above the threshold) with a different kind is LabelRefinement; a
    matched pair that is not an exact same-kind reproduction is otherwise
    BoundaryShift; an unmatched projected span is Discovery; an unmatched
    gold span is Miss.

    Token level: every Insert is a Hallucination; every op whose two raw
    token texts differ (substitutes, deletions, and case/punctuation-only
    matches) is a LexicalAdjustment whose note names the relation.
    """
    projected_spans, _ = bio_to_spans(list(projected_bio))
    records: list[DiscrepancyRecord] = []

    matches = match_spans(gold_spans, projected_spans)
    matched_gold = {gi for gi, _ in matches}
    matched_proj = {pi for _, pi in matches}

    for gi, pi in matches:
        gold, proj = gold_spans[gi], projected_spans[pi]
        jaccard = _token_jaccard(gold, proj)
        same_extent = (gold.start_token, gold.end_token) == (
            proj.start_token,
            proj.end_token,
        )
        if gold.kind is proj.kind and same_extent:
            continue  # exact reproduction, no discrepancy
        if jaccard >= jaccard_threshold and gold.kind is not proj.kind:
            records.append(
                DiscrepancyRecord(
                    DiscrepancyKind.LABEL_REFINEMENT,
                    f"gold {gold.kind.value} predicted as {proj.kind.value} "
                    f"(jaccard {jaccard:.2f})",
                    gold_span=gold,
                    projected_span=proj,
                )
            )
        else:
            records.append(
                DiscrepancyRecord(
                    DiscrepancyKind.BOUNDARY_SHIFT,
                    f"gold [{gold.start_token}, {gold.end_token}] vs projected "
                    f"[{proj.start_token}, {proj.end_token}] "
                    f"(jaccard {jaccard:.2f}"
                    + ("" if gold.kind is proj.kind else f", kind {gold.kind.value}->{proj.kind.value}")
                    + ")",
                    gold_span=gold,
                    projected_span=proj,
                )
            )

    for gi, gold in enumerate(gold_spans):
        if gi not in matched_gold:
            records.append(
                DiscrepancyRecord(
                    DiscrepancyKind.MISS,
                    f"gold {gold.kind.value} over tokens "
                    f"[{gold.start_token}, {gold.end_token}] has no projected overlap",
                    gold_span=gold,
                )
            )
    for pi, proj in enumerate(projected_spans):
        if pi not in matched_proj:
            records.append(
                DiscrepancyRecord(
                    DiscrepancyKind.DISCOVERY,
                    f"projected {proj.kind.value} over tokens "
                    f"[{proj.start_token}, {proj.end_token}] matches no gold span",
                    projected_span=proj,
                )
            )

    for op in ops:
        if op.kind is EditKind.INSERT:
            records.append(
                DiscrepancyRecord(
                    DiscrepancyKind.HALLUCINATION,
                    f"inserted {generated_tokens[op.generated_index]!r}",
                    generated_index=op.generated_index,
                )
            )
        elif op.kind is EditKind.DELETE:
            records.append(
                DiscrepancyRecord(
                    DiscrepancyKind.LEXICAL_ADJUSTMENT,
                    f"omitted {source_tokens[op.source_index]!r}",
                    source_index=op.source_index,
                )
            )
        else:
            src = source_tokens[op.source_index]
            gen = generated_tokens[op.generated_index]
            if src == gen:
                continue
            if op.kind is EditKind.MATCH:
                relation = "case/punctuation normalization"
            elif _edit_distance_at_most_one(src, gen):
                relation = "near match (edit distance <= 1)"
            else:
                relation = "rewording"
            records.append(
                DiscrepancyRecord(
                    DiscrepancyKind.LEXICAL_ADJUSTMENT,
                    f"{src!r} -> {gen!r} ({relation})",
                    source_index=op.source_index,
                    generated_index=op.generated_index,
                )
            )
    return records


@dataclass(frozen=True)
class AlignmentReport:
    """Everything evaluation needs for one (source chunk, generation) pair."""

    ops: tuple[EditOp, ...]
    projected_bio: tuple[str, ...]
    cost: float
    discrepancies: tuple[DiscrepancyRecord, ...]


def analyze(
    source_tokens: Sequence[str],
    gold_spans: Sequence[ComponentSpan],
    generated_tokens: Sequence[str],
    generated_spans: Sequence[ComponentSpan],
    jaccard_threshold: float = DEFAULT_JACCARD_THRESHOLD,
) -> AlignmentReport:
    """Align, project, and classify one generation against its source."""
    ops = align_tokens(source_tokens, generated_tokens)
    projected = project_labels(
        ops, generated_spans, len(source_tokens), len(generated_tokens)
    )
    discrepancies = classify_discrepancies(
        gold_spans,
        projected,
        ops,
        source_tokens,
        generated_tokens,
        jaccard_threshold,
    )
    return AlignmentReport(
        ops=tuple(ops),
        projected_bio=tuple(projected),
        cost=alignment_cost(source_tokens, generated_tokens, ops),
        discrepancies=tuple(discrepancies),
    )

