"""Token-level BIO metrics: per-class P/R/F1, macro F1, accuracy, confusion.

Macro F1 averages over all five classes including O by default (the
published per-class tables behave this way); excluding O is a switch that
is recorded in the report. Accuracy is token accuracy: the confusion
trace over its total. A supplementary span-level exact-match F1 is also
reported, clearly labeled as such.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from acdkit.corpus.bio import CLASS_ORDER, bio_to_spans
from acdkit.errors import DataError

N_CLASSES = len(CLASS_ORDER)
_CLASS_INDEX = {tag: i for i, tag in enumerate(CLASS_ORDER)}


@dataclass(frozen=True, slots=True)
class ClassScores:
    precision: float
    recall: float
    f1: float
    support: int


def f1_score(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def macro_f1_from_class_f1s(class_f1s: Sequence[float]) -> float:
    """Unweighted mean; the macro definition used everywhere in the toolkit."""
    if not class_f1s:
        return 0.0
    return sum(class_f1s) / len(class_f1s)


@dataclass(frozen=True)
class EvalReport:
    class_scores: dict[str, ClassScores]
    macro_f1: float
    accuracy: float
    confusion: tuple[tuple[int, ...], ...]  # confusion[gold][predicted]
    discrepancy_tally: dict[str, int] = field(default_factory=dict)
    span_counts: tuple[int, int, int] = (0, 0, 0)  # span-level tp, fp, fn
    span_exact_f1: float = 0.0  # supplementary, span-level exact match
    macro_includes_o: bool = True
    flags: tuple[str, ...] = ()
    metadata: dict[str, object] = field(default_factory=dict)

    @property
    def total_tokens(self) -> int:
        return sum(sum(row) for row in self.confusion)


def _scores_from_confusion(
    confusion: Sequence[Sequence[int]],
    *,
    macro_includes_o: bool,
    span_counts: tuple[int, int, int] = (0, 0, 0),
    discrepancy_tally: Mapping[str, int] | None = None,
    metadata: Mapping[str, object] | None = None,
) -> EvalReport:
    class_scores: dict[str, ClassScores] = {}
    flags: list[str] = []
    total = sum(sum(row) for row in confusion)
    correct = sum(confusion[i][i] for i in range(N_CLASSES))
    for i, tag in enumerate(CLASS_ORDER):
        support = sum(confusion[i])
        predicted = sum(confusion[g][i] for g in range(N_CLASSES))
        tp = confusion[i][i]
        precision = tp / predicted if predicted else 0.0
        recall = tp / support if support else 0.0
        class_scores[tag] = ClassScores(precision, recall, f1_score(precision, recall), support)
        if support == 0:
            flags.append(f"class {tag} has zero support; f1 = 0 by convention")
    macro_classes = [
        tag for tag in CLASS_ORDER if macro_includes_o or tag != "O"
    ]
    macro = macro_f1_from_class_f1s([class_scores[t].f1 for t in macro_classes])
    accuracy = correct / total if total else 0.0
    component_gold = sum(
        class_scores[t].support for t in CLASS_ORDER if t != "O"
    )
    component_pred = sum(
        confusion[g][i]
        for g in range(N_CLASSES)
        for i in range(N_CLASSES)
        if CLASS_ORDER[i] != "O"
    )
    if total == 0:
        flags.append("no data")
    elif component_gold == 0 and component_pred == 0:
        flags.append("degenerate all-O evaluation: component classes have zero support")

    tp, fp, fn = span_counts
    span_p = tp / (tp + fp) if tp + fp else 0.0
    span_r = tp / (tp + fn) if tp + fn else 0.0
    return EvalReport(
        class_scores=class_scores,
        macro_f1=macro,
        accuracy=accuracy,
        confusion=tuple(tuple(row) for row in confusion),
        discrepancy_tally=dict(discrepancy_tally or {}),
        span_counts=span_counts,
        span_exact_f1=f1_score(span_p, span_r),
        macro_includes_o=macro_includes_o,
        flags=tuple(flags),
        metadata=dict(metadata or {}),
    )


def _span_exact_counts(
    gold: Sequence[str], predicted: Sequence[str]
) -> tuple[int, int, int]:
    gold_spans = {
        (s.start_token, s.end_token, s.kind) for s in bio_to_spans(list(gold))[0]
    }
    pred_spans = {
        (s.start_token, s.end_token, s.kind) for s in bio_to_spans(list(predicted))[0]
    }
    tp = len(gold_spans & pred_spans)
    return tp, len(pred_spans - gold_spans), len(gold_spans - pred_spans)


def evaluate(
    gold: Sequence[Sequence[str]],
    predicted: Sequence[Sequence[str]],
    doc_ids: Sequence[str] | None = None,
    *,
    macro_includes_o: bool = True,
    discrepancy_tally: Mapping[str, int] | None = None,
    metadata: Mapping[str, object] | None = None,
) -> EvalReport:
    """Score predicted BIO sequences against gold, both over source tokens."""
    if len(gold) != len(predicted):
        raise DataError(
            f"{len(gold)} gold sequences vs {len(predicted)} predicted"
        )
    confusion = [[0] * N_CLASSES for _ in range(N_CLASSES)]
    span_tp = span_fp = span_fn = 0
    for k, (g_seq, p_seq) in enumerate(zip(gold, predicted)):
        if len(g_seq) != len(p_seq):
            name = doc_ids[k] if doc_ids else f"sequence {k}"
            raise DataError(
                f"{name}: gold has {len(g_seq)} tokens, predicted {len(p_seq)}"
            )
        for g_tag, p_tag in zip(g_seq, p_seq):
            try:
                confusion[_CLASS_INDEX[g_tag]][_CLASS_INDEX[p_tag]] += 1
            except KeyError as exc:
                raise DataError(f"unknown tag {exc} in evaluation input") from None
        tp, fp, fn = _span_exact_counts(g_seq, p_seq)
        span_tp += tp
        span_fp += fp
        span_fn += fn
    return _scores_from_confusion(
        confusion,
        macro_includes_o=macro_includes_o,
        span_counts=(span_tp, span_fp, span_fn),
        discrepancy_tally=discrepancy_tally,
        metadata=metadata,
    )


def aggregate(reports: Sequence[EvalReport]) -> EvalReport:
    """Sum confusion matrices (micro), then recompute all scores."""
    if not reports:
        return _scores_from_confusion(
            [[0] * N_CLASSES for _ in range(N_CLASSES)], macro_includes_o=True
        )
    macro_includes_o = reports[0].macro_includes_o
    if any(r.macro_includes_o != macro_includes_o for r in reports):
        raise DataError("cannot aggregate reports with different macro settings")
    confusion = [[0] * N_CLASSES for _ in range(N_CLASSES)]
    tally: dict[str, int] = {}
    span_tp = span_fp = span_fn = 0
    for report in reports:
        for i in range(N_CLASSES):
            for j in range(N_CLASSES):
                confusion[i][j] += report.confusion[i][j]
        for kind, count in report.discrepancy_tally.items():
            tally[kind] = tally.get(kind, 0) + count
        tp, fp, fn = report.span_counts
        span_tp += tp
        span_fp += fp
        span_fn += fn
    return _scores_from_confusion(
        confusion,
        macro_includes_o=macro_includes_o,
        span_counts=(span_tp, span_fp, span_fn),
        discrepancy_tally=tally,
        metadata=dict(reports[0].metadata),
    )


def report_to_dict(report: EvalReport) -> dict:
    return {
        "class_scores": {
            tag: {
                "precision": s.precision,
                "recall": s.recall,
                "f1": s.f1,
                "support": s.support,
            }
            for tag, s in report.class_scores.items()
        },
        "macro_f1": report.macro_f1,
        "macro_includes_o": report.macro_includes_o,
        "accuracy": report.accuracy,
        "accuracy_definition": "token accuracy (confusion trace / total tokens)",
        "confusion": [list(row) for row in report.confusion],
        "confusion_classes": list(CLASS_ORDER),
        "discrepancy_tally": dict(sorted(report.discrepancy_tally.items())),
        "span_counts": list(report.span_counts),
        "span_exact_f1_supplementary": report.span_exact_f1,
        "flags": list(report.flags),
        "metadata": report.metadata,
    }


def render_machine_report(report: EvalReport) -> str:
    """Stable JSON rendering; byte-identical for identical inputs."""
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True, ensure_ascii=False)


def render_human_report(
    report: EvalReport,
    discrepancy_examples: Mapping[str, str] | None = None,
) -> str:
    """Markdown report: class table in the standard column order, then
    discrepancies with one example per kind."""
    lines: list[str] = ["# Component detection evaluation", ""]
    meta = report.metadata
    if meta:
        lines.append(
            "Run: "
            + ", ".join(f"{k}={v}" for k, v in sorted(meta.items()))
        )
        lines.append("")
    lines.append(
        "Accuracy is token accuracy; macro F1 averages "
        + ("all five classes including O." if report.macro_includes_o else "the four component classes (O excluded).")
    )
    lines.append("")
    if report.total_tokens == 0:
        lines.append("**no data** — zero tokens evaluated.")
        return "\n".join(lines) + "\n"

    header = "| Metric | " + " | ".join(CLASS_ORDER) + " | Macro |"
    rule = "|" + "---|" * (N_CLASSES + 2)
    lines.append(header)
    lines.append(rule)
    for metric in ("precision", "recall", "f1"):
        cells = [f"{getattr(report.class_scores[t], metric):.2f}" for t in CLASS_ORDER]
        macro_cell = f"{report.macro_f1:.2f}" if metric == "f1" else ""
        lines.append(f"| {metric.capitalize()} | " + " | ".join(cells) + f" | {macro_cell} |")
    supports = [str(report.class_scores[t].support) for t in CLASS_ORDER]
    lines.append("| Support | " + " | ".join(supports) + " | |")
    lines.append("")
    lines.append(f"Token accuracy: {report.accuracy:.4f}")
    lines.append(f"Macro F1: {report.macro_f1:.4f}")
    lines.append(
        f"Span exact-match F1 (supplementary, not a published metric): "
        f"{report.span_exact_f1:.4f}"
    )
    if report.flags:
        lines.append("")
        lines.append("Flags:")
        lines.extend(f"- {flag}" for flag in report.flags)
    if report.discrepancy_tally:
        lines.append("")
        lines.append("## Discrepancies")
        lines.append("")
        lines.append("| Kind | Count |")
        lines.append("|---|---|")
        for kind, count in sorted(report.discrepancy_tally.items()):
            lines.append(f"| {kind} | {count} |")
        if discrepancy_examples:
            lines.append("")
            lines.append("Examples:")
            for kind, example in sorted(discrepancy_examples.items()):
                lines.append(f"- {kind}: {example}")
    return "\n".join(lines) + "\n"
