"""subtok: subword tokenizer toolkit.

Trains BPE and unigram-LM vocabularies, tokenizes text with either
method, serializes models deterministically, and produces comparison
reports: vocabulary profiles, cross-tokenizer frequency differences, and
morphological boundary scores.
"""

__version__ = "0.1.0"

from .bpe import BpeModel, tokenize_bpe, train_bpe
from .corpus import (
    DEFAULT_MARKER,
    CharInventory,
    WordCounts,
    char_inventory,
    counts_digest,
    ingest,
    ingest_path,
)
from .errors import (
    EmptyCorpusError,
    InfeasibleVocabError,
    InvalidUtf8Error,
    MarkerCollisionError,
    ModelFormatError,
    ReferenceFormatError,
    SubtokError,
)
from .model_io import TrainingMetadata, canonical_token_ids, load_model, save_model
from .morpho import BoundaryReport, ReferenceSegmentation, boundaries, boundary_prf, read_reference_file
from .profile import FrequencyDiffReport, VocabProfile, frequency_diff, profile_vocab
from .unigram import (
    LossTable,
    Segmentation,
    UnigramModel,
    corpus_loglik,
    em_fit,
    marginal_loglik,
    prune,
    seed_vocab,
    token_losses,
    train_unigram,
    viterbi_tokenize,
)

__all__ = [
    "BoundaryReport",
    "BpeModel",
    "CharInventory",
    "DEFAULT_MARKER",
    "EmptyCorpusError",
    "FrequencyDiffReport",
    "InfeasibleVocabError",
    "InvalidUtf8Error",
    "LossTable",
    "MarkerCollisionError",
    "ModelFormatError",
    "ReferenceFormatError",
    "ReferenceSegmentation",
    "Segmentation",
    "SubtokError",
    "TrainingMetadata",
    "UnigramModel",
    "VocabProfile",
    "WordCounts",
    "boundaries",
    "boundary_prf",
    "canonical_token_ids",
    "char_inventory",
    "corpus_loglik",
    "counts_digest",
    "em_fit",
    "frequency_diff",
    "ingest",
    "ingest_path",
    "load_model",
    "marginal_loglik",
    "profile_vocab",
    "prune",
    "read_reference_file",
    "save_model",
    "seed_vocab",
    "token_losses",
    "tokenize_bpe",
    "train_bpe",
    "train_unigram",
    "viterbi_tokenize",
]
