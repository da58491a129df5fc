"""Published reference statistics for the three source corpora.

Two published tables describe the same data and do not fully agree:

  - the summary table gives claim/premise span counts per corpus (some
    values rounded, e.g. "29k"), plus a merged-corpora row;
  - the detailed table gives exact per-tag BIO token counts.

Since a span count for type x must equal the count of B-x tokens, the two
tables can be cross-checked. They agree for USElecDeb60To16 but the
claim/premise columns of PersuasiveEssays and WebDiscourse appear swapped
between the tables. The cross-check below reports both readings and flags
the inconsistency instead of silently choosing one.
"""

from __future__ import annotations

from dataclasses import dataclass

from acdkit.corpus.ops import CorpusStats

# Summary span counts as published (value, is_rounded).
SUMMARY_SPAN_COUNTS: dict[str, dict[str, tuple[int, bool]]] = {
    "USElecDeb60To16": {"Claim": (29_000, True), "Premise": (26_000, True)},
    "PersuasiveEssays": {"Claim": (2_257, False), "Premise": (3_832, False)},
    "WebDiscourse": {"Claim": (195, False), "Premise": (538, False)},
    "Merge": {"Claim": (31_500, True), "Premise": (30_300, True)},
}

# Detailed per-tag BIO token counts as published.
DETAILED_TAG_COUNTS: dict[str, dict[str, int]] = {
    "USElecDeb60To16": {
        "O": 566_492,
        "B-Premise": 26_055,
        "I-Premise": 350_079,
        "B-Claim": 29_624,
        "I-Claim": 338_941,
    },
    "PersuasiveEssays": {
        "O": 35_946,
        "B-Premise": 2_257,
        "I-Premise": 29_828,
        "B-Claim": 3_832,
        "I-Claim": 59_652,
    },
    "WebDiscourse": {
        "O": 61_414,
        "B-Premise": 195,
        "I-Premise": 3_491,
        "B-Claim": 538,
        "I-Claim": 20_566,
    },
}

# A rounded published value matches when the exact count rounds to it.
_ROUNDING_TOLERANCE = 0.05


@dataclass(frozen=True, slots=True)
class Finding:
    """One cross-check observation. severity: 'ok', 'flag' or 'mismatch'."""

    corpus: str
    severity: str
    message: str


def _matches(published: int, rounded: bool, actual: int) -> bool:
    if not rounded:
        return published == actual
    return abs(actual - published) <= published * _ROUNDING_TOLERANCE


def reference_consistency_findings() -> list[Finding]:
    """Compare the two published tables with each other."""
    findings: list[Finding] = []
    for corpus, detailed in DETAILED_TAG_COUNTS.items():
        summary = SUMMARY_SPAN_COUNTS[corpus]
        direct = all(
            _matches(*summary[kind], detailed[f"B-{kind}"])
            for kind in ("Claim", "Premise")
        )
        swapped = all(
            _matches(*summary[kind], detailed[f"B-{other}"])
            for kind, other in (("Claim", "Premise"), ("Premise", "Claim"))
        )
        if direct:
            findings.append(
                Finding(corpus, "ok", "summary and detailed tables agree")
            )
        elif swapped:
            findings.append(
                Finding(
                    corpus,
                    "flag",
                    "summary and detailed tables disagree; claim/premise "
                    "columns appear swapped between them "
                    f"(summary claim={summary['Claim'][0]} vs detailed "
                    f"B-Claim={detailed['B-Claim']})",
                )
            )
        else:
            findings.append(
                Finding(corpus, "mismatch", "tables disagree beyond a column swap")
            )

    # The merge row only adds up under the summary table's own readings.
    merge = SUMMARY_SPAN_COUNTS["Merge"]
    for kind in ("Claim", "Premise"):
        total = sum(
            SUMMARY_SPAN_COUNTS[c][kind][0] for c in DETAILED_TAG_COUNTS
        )
        if _matches(*merge[kind], total):
            findings.append(
                Finding(
                    "Merge",
                    "ok",
                    f"summary {kind.lower()} counts sum to the published "
                    f"merge row ({total} vs {merge[kind][0]})",
                )
            )
        else:
            findings.append(
                Finding(
                    "Merge",
                    "flag",
                    f"summary {kind.lower()} counts sum to {total}, merge row "
                    f"says {merge[kind][0]}",
                )
            )
    return findings


def cross_check_stats(stats_by_corpus: dict[str, CorpusStats]) -> list[Finding]:
    """Compare computed statistics against both published readings."""
    findings: list[Finding] = []
    for corpus, stats in stats_by_corpus.items():
        detailed = DETAILED_TAG_COUNTS.get(corpus)
        if detailed is None:
            continue
        diffs = {
            tag: (stats.tag_counts[tag], expected)
            for tag, expected in detailed.items()
            if stats.tag_counts[tag] != expected
        }
        if not diffs:
            findings.append(
                Finding(corpus, "ok", "computed BIO counts match the detailed table")
            )
        else:
            rendered = ", ".join(
                f"{tag}: computed {got} vs published {want}"
                for tag, (got, want) in sorted(diffs.items())
            )
            findings.append(Finding(corpus, "mismatch", rendered))
    return findings
