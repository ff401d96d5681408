"""Command-line surface: train, tokenize, profile, diff, eval-morph.

All file I/O is UTF-8; ``-`` means standard input. Report commands write
tab-separated tables and can additionally render figures with
``--figures DIR``. Exit codes: 0 success, 2 usage, 3 unreadable or
malformed input, 4 infeasible vocabulary size or empty corpus, 5 marker
collision, 6 corrupt model file.
"""

import argparse
import json
import logging
import os
import sys
import unicodedata

from . import __version__
from .bpe import train_bpe
from .corpus import DEFAULT_MARKER, counts_digest, ingest_path
from .errors import (
    EmptyCorpusError,
    InfeasibleVocabError,
    InvalidUtf8Error,
    MarkerCollisionError,
    ModelFormatError,
    ReferenceFormatError,
)
from .model_io import TrainingMetadata, canonical_token_ids, load_model, save_model
from .morpho import boundary_prf, read_reference_file
from .profile import frequency_diff, profile_vocab
from .unigram import (
    DEFAULT_ALPHA,
    DEFAULT_EM_ITERS,
    DEFAULT_MAX_TOKEN_LEN,
    train_unigram,
)

logger = logging.getLogger(__name__)

DEFAULT_VOCAB_SIZE = 20000

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_INFEASIBLE = 4
EXIT_MARKER_COLLISION = 5
EXIT_MODEL_FORMAT = 6

# Worker state for the parallel tokenize pipeline.
_worker_ctx: dict = {}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subtok",
        description="Train, apply, and compare subword tokenizers.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a tokenizer model from a corpus")
    p_train.add_argument("corpus", help="corpus file, .gz file, or - for stdin")
    p_train.add_argument("output", help="model file to write")
    p_train.add_argument("--method", choices=["bpe", "unigram"], required=True)
    p_train.add_argument("--vocab-size", type=int, default=DEFAULT_VOCAB_SIZE, metavar="K")
    p_train.add_argument("--alpha", type=float, default=DEFAULT_ALPHA,
                         help="fraction of the vocabulary pruned per round (unigram)")
    p_train.add_argument("--marker", default=DEFAULT_MARKER, help="word-boundary marker code point")
    p_train.add_argument("--mode", choices=["whitespace", "line"], default="whitespace")
    p_train.add_argument("--em-iters", type=int, default=DEFAULT_EM_ITERS,
                         help="EM iterations per pruning round (unigram)")
    p_train.add_argument("--max-seed", type=int, default=None,
                         help="seed vocabulary cap (unigram; default 100x vocab size)")
    p_train.add_argument("--max-token-len", type=int, default=DEFAULT_MAX_TOKEN_LEN,
                         help="longest seed substring (unigram)")
    p_train.set_defaults(func=cmd_train)

    p_tok = sub.add_parser("tokenize", help="tokenize text with a trained model")
    p_tok.add_argument("model", help="model file")
    p_tok.add_argument("input", nargs="?", default="-", help="text file or - for stdin")
    p_tok.add_argument("--output", choices=["tokens", "ids"], default="tokens",
                       help="emit token strings or canonical token ids")
    p_tok.add_argument("--mode", choices=["whitespace", "line"], default=None,
                       help="word splitting; defaults to the model's training mode")
    p_tok.set_defaults(func=cmd_tokenize)

    p_prof = sub.add_parser("profile", help="vocabulary and corpus statistics for one model")
    p_prof.add_argument("model")
    p_prof.add_argument("corpus")
    p_prof.add_argument("--mode", choices=["whitespace", "line"], default=None)
    p_prof.add_argument("--out-dir", default=None,
                        help="write all report tables here instead of stdout")
    p_prof.add_argument("--figures", default=None, metavar="DIR",
                        help="also render figures into DIR")
    p_prof.set_defaults(func=cmd_profile)

    p_diff = sub.add_parser("diff", help="largest tokenization frequency differences between two models")
    p_diff.add_argument("model_a")
    p_diff.add_argument("model_b")
    p_diff.add_argument("corpus")
    p_diff.add_argument("--mode", choices=["whitespace", "line"], default=None)
    p_diff.add_argument("--top", type=int, default=20, help="rows to report")
    p_diff.add_argument("--direction", choices=["both", "a", "b"], default="both",
                        help="keep only tokens more frequent under one model")
    p_diff.add_argument("--out", default=None, help="write the table here instead of stdout")
    p_diff.add_argument("--figures", default=None, metavar="DIR")
    p_diff.set_defaults(func=cmd_diff)

    p_morph = sub.add_parser("eval-morph", help="boundary precision/recall/F1 against reference segmentations")
    p_morph.add_argument("model")
    p_morph.add_argument("references", help="TSV: word<TAB>weight<TAB>morph|morph|...")
    p_morph.add_argument("--out", default=None, help="write the table here instead of stdout")
    p_morph.add_argument("--figures", default=None, metavar="DIR")
    p_morph.set_defaults(func=cmd_eval_morph)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except MarkerCollisionError as exc:
        return _fail(exc, EXIT_MARKER_COLLISION)
    except (InfeasibleVocabError, EmptyCorpusError) as exc:
        return _fail(exc, EXIT_INFEASIBLE)
    except ModelFormatError as exc:
        return _fail(exc, EXIT_MODEL_FORMAT)
    except (InvalidUtf8Error, ReferenceFormatError, OSError) as exc:
        return _fail(exc, EXIT_IO)
    except ValueError as exc:
        return _fail(exc, EXIT_USAGE)


def _fail(exc: Exception, code: int) -> int:
    print(f"subtok: error: {exc}", file=sys.stderr)
    return code


def cmd_train(args) -> int:
    counts = ingest_path(args.corpus, marker=args.marker, mode=args.mode)
    logger.info("ingested %d words (%d types)", counts.total_words, counts.total_word_types)
    if args.method == "bpe":
        model = train_bpe(counts, args.vocab_size)
        alpha = None
    else:
        model = train_unigram(
            counts,
            args.vocab_size,
            alpha=args.alpha,
            em_iters_per_round=args.em_iters,
            max_seed=args.max_seed,
            max_token_len=args.max_token_len,
        )
        alpha = args.alpha
    metadata = TrainingMetadata(
        k=args.vocab_size,
        alpha=alpha,
        corpus_digest=counts_digest(counts),
        mode=args.mode,
    )
    save_model(model, args.output, metadata)
    logger.info("wrote %s", args.output)
    return EXIT_OK


def _tokenize_line(line: str, model, mode: str, marker: str, ids) -> str:
    line = unicodedata.normalize("NFC", line)
    if marker in line:
        raise MarkerCollisionError(
            f"marker {marker!r} (U+{ord(marker):04X}) occurs in the input text"
        )
    if mode == "whitespace":
        units = line.split()
    else:
        stripped = "".join(ch for ch in line if not ch.isspace())
        units = [stripped] if stripped else []
    tokens: list[str] = []
    for unit in units:
        tokens.extend(model.tokenize(marker + unit))
    if ids is None:
        return " ".join(tokens)
    return " ".join(str(ids[t]) for t in tokens)


def _init_worker(model_path: str, mode: str, want_ids: bool) -> None:
    model, _ = load_model(model_path)
    _worker_ctx["model"] = model
    _worker_ctx["mode"] = mode
    _worker_ctx["ids"] = canonical_token_ids(model) if want_ids else None


def _worker_tokenize(line: str) -> str:
    return _tokenize_line(
        line, _worker_ctx["model"], _worker_ctx["mode"], _worker_ctx["model"].marker,
        _worker_ctx["ids"],
    )


def _thread_count() -> int:
    raw = os.environ.get("SUBTOK_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def cmd_tokenize(args) -> int:
    model, metadata = load_model(args.model)
    mode = args.mode or metadata.get("mode", "whitespace")
    if mode not in ("whitespace", "line"):
        mode = "whitespace"
    ids = canonical_token_ids(model) if args.output == "ids" else None

    if args.input == "-":
        lines = (line.rstrip("\n") for line in sys.stdin)
        _emit_tokenized(lines, args, model, mode, ids)
    else:
        with open(args.input, "r", encoding="utf-8") as fh:
            lines = (line.rstrip("\n") for line in fh)
            _emit_tokenized(lines, args, model, mode, ids)
    return EXIT_OK


def _emit_tokenized(lines, args, model, mode: str, ids) -> None:
    threads = _thread_count()
    out = sys.stdout
    if threads > 1:
        # Parallel pipeline; imap preserves input line order.
        from multiprocessing import Pool

        with Pool(threads, initializer=_init_worker,
                  initargs=(args.model, mode, ids is not None)) as pool:
            for result in pool.imap(_worker_tokenize, lines, chunksize=256):
                out.write(result + "\n")
    else:
        for line in lines:
            out.write(_tokenize_line(line, model, mode, model.marker, ids) + "\n")


def _resolve_counts(args, model, metadata):
    mode = args.mode or metadata.get("mode", "whitespace")
    if mode not in ("whitespace", "line"):
        mode = "whitespace"
    return ingest_path(args.corpus, marker=model.marker, mode=mode)


def _write_table(path_or_none: str | None, header: list[str], rows) -> None:
    lines = ["\t".join(header)]
    lines.extend("\t".join(str(cell) for cell in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if path_or_none is None:
        sys.stdout.write(text)
    else:
        with open(path_or_none, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_profile(args) -> int:
    model, metadata = load_model(args.model)
    counts = _resolve_counts(args, model, metadata)
    profile = profile_vocab(model, counts)

    summary_rows = [
        ("vocab_size", profile.vocab_size),
        ("mean_token_length", f"{profile.mean_token_length:.6f}"),
        ("tokens_per_word", f"{profile.tokens_per_word:.6f}"),
        ("tokens_per_word_type", f"{profile.tokens_per_word_type:.6f}"),
        ("dead_zone_count", profile.dead_zone_count),
        ("dead_zone_threshold", f"{profile.dead_zone_threshold:.6f}"),
        ("total_words", counts.total_words),
        ("total_word_types", counts.total_word_types),
    ]
    if args.out_dir is None:
        _write_table(None, ["metric", "value"], summary_rows)
    else:
        os.makedirs(args.out_dir, exist_ok=True)
        _write_table(os.path.join(args.out_dir, "profile_summary.tsv"),
                     ["metric", "value"], summary_rows)
        _write_table(os.path.join(args.out_dir, "length_histogram.tsv"),
                     ["length", "count"],
                     sorted(profile.length_histogram.items()))
        _write_table(os.path.join(args.out_dir, "rank_frequency.tsv"),
                     ["rank", "token", "frequency"],
                     ((i + 1, tok, freq) for i, (tok, freq) in enumerate(profile.rank_frequency)))
        summary = {key: value for key, value in summary_rows}
        with open(os.path.join(args.out_dir, "summary.json"), "w", encoding="utf-8") as fh:
            json.dump(summary, fh, ensure_ascii=False, sort_keys=True, indent=2)
            fh.write("\n")
    if args.figures:
        from . import figures

        os.makedirs(args.figures, exist_ok=True)
        figures.plot_length_histogram(profile, os.path.join(args.figures, "length_histogram.png"))
        figures.plot_rank_frequency(profile, os.path.join(args.figures, "rank_frequency.png"))
    return EXIT_OK


def cmd_diff(args) -> int:
    model_a, metadata_a = load_model(args.model_a)
    model_b, _ = load_model(args.model_b)
    if model_a.marker != model_b.marker:
        raise ValueError(
            f"models use different markers ({model_a.marker!r} vs {model_b.marker!r})"
        )
    counts = _resolve_counts(args, model_a, metadata_a)
    report = frequency_diff(model_a, model_b, counts)
    rows = report.rows
    if args.direction == "a":
        rows = [r for r in rows if r[3] > 0]
    elif args.direction == "b":
        rows = [r for r in rows if r[3] < 0]
    rows = rows[: args.top]
    _write_table(args.out, ["rank", "token", "freq_a", "freq_b", "diff"],
                 ((i + 1, t, fa, fb, d) for i, (t, fa, fb, d) in enumerate(rows)))
    if args.figures:
        from . import figures

        os.makedirs(args.figures, exist_ok=True)
        figures.plot_frequency_diff(report, os.path.join(args.figures, "frequency_diff.png"),
                                    top_n=args.top)
    return EXIT_OK


def cmd_eval_morph(args) -> int:
    model, _ = load_model(args.model)
    references = read_reference_file(args.references)
    report = boundary_prf(model, references)
    rows = [
        ("precision", f"{report.precision:.6f}"),
        ("recall", f"{report.recall:.6f}"),
        ("f1", f"{report.f1:.6f}"),
        ("weighted_candidate_boundaries", f"{report.weighted_candidate_boundaries:.6f}"),
        ("weighted_reference_boundaries", f"{report.weighted_reference_boundaries:.6f}"),
        ("weighted_matches", f"{report.weighted_matches:.6f}"),
        ("references_used", report.references_used),
        ("skipped_unk", report.skipped_unk),
    ]
    _write_table(args.out, ["metric", "value"], rows)
    if args.figures:
        from . import figures

        os.makedirs(args.figures, exist_ok=True)
        figures.plot_boundary_scores(report, os.path.join(args.figures, "boundary_prf.png"))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
