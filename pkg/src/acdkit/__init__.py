"""acdkit: generative argumentative component detection toolkit.

Pipeline: ingest BIO/standoff corpora into a canonical document model,
render documents as inline-tagged text, export instruction-tuning pairs,
obtain generations from a pluggable completion backend, align noisy
generations back onto source tokens, and score with class-wise and macro
BIO metrics.
"""

__version__ = "0.1.0"
