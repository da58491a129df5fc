"""Fine-tuning adapter for the acdkit pipeline.

Consumes the pipeline's exported files (training pairs, canonical corpus,
token tables), trains small from-scratch models, and writes transcripts
and prediction files the pipeline evaluates unchanged. Metrics are never
computed here: checkpoint selection reads macro F1 from the evaluator's
machine report.
"""

__version__ = "0.1.0"
