"""Corpus ingestion, canonical document model, statistics and splits."""

from acdkit.corpus.bio import (
    BIO_TAGS,
    CLASS_ORDER,
    O_TAG,
    BioRepair,
    begin_tag,
    bio_to_spans,
    inside_tag,
    is_valid_bio,
    spans_to_bio,
)
from acdkit.corpus.interchange import (
    document_to_record,
    dumps_document,
    iter_corpus,
    read_corpus,
    record_to_document,
    write_corpus,
)
from acdkit.corpus.model import (
    CharSpan,
    ComponentSpan,
    ComponentType,
    LabeledDocument,
    SourceCorpus,
    Token,
    snap_char_range_to_tokens,
)
from acdkit.corpus.ops import (
    CorpusStats,
    corpus_stats,
    merge_corpora,
    split,
    split_sizes,
    stats_by_source,
)
from acdkit.corpus.standoff import parse_standoff
from acdkit.corpus.tokenizer import detokenize, tokenize
from acdkit.corpus.tokentable import (
    format_token_table,
    parse_token_table,
    parse_token_table_file,
)

__all__ = [
    "BIO_TAGS",
    "CLASS_ORDER",
    "O_TAG",
    "BioRepair",
    "CharSpan",
    "ComponentSpan",
    "ComponentType",
    "CorpusStats",
    "LabeledDocument",
    "SourceCorpus",
    "Token",
    "begin_tag",
    "bio_to_spans",
    "corpus_stats",
    "detokenize",
    "document_to_record",
    "dumps_document",
    "format_token_table",
    "inside_tag",
    "is_valid_bio",
    "iter_corpus",
    "merge_corpora",
    "parse_standoff",
    "parse_token_table",
    "parse_token_table_file",
    "read_corpus",
    "record_to_document",
    "snap_char_range_to_tokens",
    "spans_to_bio",
    "split",
    "split_sizes",
    "stats_by_source",
    "tokenize",
    "write_corpus",
]
