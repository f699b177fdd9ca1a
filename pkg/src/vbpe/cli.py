"""Single entry point: corpus generation, training, encode/decode, evaluation.

Structured small outputs are JSON; bulk artifacts (grids, embeddings) are
binary. Every subcommand is deterministic given its seed and inputs. Module
errors exit 1 with a diagnostic on stderr; usage errors exit 2.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import fileio
from .embed import EmbeddingSpec, expand_embeddings
from .errors import LayoutMismatch, VbpeError
from .grid import TokenGrid, Vocabulary
from .layout import DEFAULT_BASE_K, DEFAULT_EXT_SIZE, DEFAULT_N_TEXT, IdLayout
from .markov import coupled_source, generate
from .ngram import ngram_nll
from .plan import default_plan, plan_to_doc
from .stats import pair_table, scan_adjacencies
from .tokenize import assemble, decode_corpus, encode, encode_corpus
from .train import TrainerConfig, train

log = logging.getLogger("vbpe")


@dataclass
class GlobalConfig:
    """Resolved run-wide settings shared by the subcommand handlers."""

    layout: IdLayout | None
    seed: int
    threads: int
    verbose: bool


def _add_layout_flags(p: argparse.ArgumentParser, required: bool = False) -> None:
    p.add_argument("--n-text", type=int, default=None if not required else DEFAULT_N_TEXT)
    p.add_argument("--base-k", type=int, default=None if not required else DEFAULT_BASE_K)
    p.add_argument("--ext-size", type=int, default=None if not required else DEFAULT_EXT_SIZE)


def _flag_layout(args) -> IdLayout | None:
    vals = (args.n_text, args.base_k, args.ext_size)
    if all(v is None for v in vals):
        return None
    return IdLayout(
        n_text=args.n_text if args.n_text is not None else DEFAULT_N_TEXT,
        base_k=args.base_k if args.base_k is not None else DEFAULT_BASE_K,
        ext_size=args.ext_size if args.ext_size is not None else DEFAULT_EXT_SIZE,
    )


def _check_layout(args, vocab: Vocabulary) -> None:
    """Abort when explicit layout flags disagree with a loaded vocabulary."""
    for name, attr in (("n-text", "n_text"), ("base-k", "base_k"), ("ext-size", "ext_size")):
        flag = getattr(args, attr)
        have = getattr(vocab.layout, attr)
        if flag is not None and flag != have:
            raise LayoutMismatch(
                f"--{name}={flag} does not match vocabulary file ({have})"
            )


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="vbpe",
        description="2D byte-pair vocabulary training and tokenization over VQ grids",
    )
    ap.add_argument("--verbose", "-v", action="store_true", help="log progress to stderr")
    ap.add_argument(
        "--threads",
        type=int,
        default=os.cpu_count() or 1,
        help="worker threads for per-image sections (default: all cores)",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-markov", help="write a synthetic .vbpg corpus")
    p.add_argument("--symbols", type=int, default=2)
    p.add_argument("--stay", type=float, default=0.9, help="P(neighbor symbol repeats)")
    p.add_argument("--height", type=int, default=16)
    p.add_argument("--width", type=int, default=16)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("train-vocab", help="train a merge vocabulary on a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--base-k", type=int, required=True)
    p.add_argument("--ext-size", type=int, required=True)
    p.add_argument("--n-text", type=int, default=DEFAULT_N_TEXT)
    p.add_argument("--alpha", type=float, default=0.3)
    p.add_argument("--sigma", type=float, default=2.0)
    p.add_argument("--top-k", type=int, default=32)
    p.add_argument("--tau", type=float, default=0.9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("encode", help="tokenize a .vbpg corpus to tokens.jsonl")
    p.add_argument("--vocab", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    _add_layout_flags(p)

    p = sub.add_parser("decode", help="reconstruct a .vbpg corpus from tokens.jsonl")
    p.add_argument("--vocab", required=True)
    p.add_argument("--tokens", required=True)
    p.add_argument("--out", required=True)
    _add_layout_flags(p)

    p = sub.add_parser("assemble", help="wrap image tokens with text ids and markers")
    p.add_argument("--tokens", required=True)
    p.add_argument("--text", required=True, help="file of whitespace-separated text ids")
    p.add_argument("--vocab", default=None, help="vocabulary file supplying the layout")
    p.add_argument("--out", required=True)
    _add_layout_flags(p)

    p = sub.add_parser("stats", help="dump top adjacency pairs as TSV")
    p.add_argument("--corpus", required=True)
    p.add_argument("--vocab", default=None, help="encode through this vocabulary first")
    p.add_argument("--top", type=int, default=20)
    p.add_argument("--alpha", type=float, default=0.3)
    p.add_argument("--sigma", type=float, default=2.0)
    p.add_argument("--base-k", type=int, default=None)
    p.add_argument("--n-text", type=int, default=None)
    p.add_argument("--ext-size", type=int, default=None)

    p = sub.add_parser("eval-nll", help="per-cell n-gram NLL of raw vs encoded corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--order", type=int, choices=(1, 2), default=1)
    p.add_argument("--lambda", dest="lam", type=float, default=0.1)
    p.add_argument("--split", type=float, default=0.8, help="training fraction")
    p.add_argument("--seed", type=int, default=0)
    _add_layout_flags(p)

    p = sub.add_parser("plan", help="emit the staged training plan as JSON")
    p.add_argument("--stages", choices=("default",), default="default")
    p.add_argument("--n-layers", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("expand-embeddings", help="write an expanded embedding table")
    p.add_argument("--n-text", type=int, default=DEFAULT_N_TEXT)
    p.add_argument("--base-k", type=int, default=DEFAULT_BASE_K)
    p.add_argument("--ext-size", type=int, default=DEFAULT_EXT_SIZE)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    return ap


def _cmd_gen_markov(args, cfg: GlobalConfig) -> int:
    source = coupled_source(args.symbols, args.stay, args.seed)
    grids = generate(source, args.height, args.width, args.count)
    n = fileio.write_corpus(args.out, grids)
    log.info("wrote %d grids to %s", n, args.out)
    return 0


def _cmd_train_vocab(args, cfg: GlobalConfig) -> int:
    corpus = fileio.read_corpus(args.corpus, base_k=args.base_k)
    layout = IdLayout(n_text=args.n_text, base_k=args.base_k, ext_size=args.ext_size)
    tc = TrainerConfig(
        target_ext_size=args.ext_size,
        alpha=args.alpha,
        sigma=args.sigma,
        top_k=args.top_k,
        tau=args.tau,
        seed=args.seed,
    )

    def report(info):
        print(
            f"{info.index}\t{info.left}\t{info.right}\t{info.orientation}"
            f"\t{info.priority:.6f}\t{info.region_total}"
        )

    result = train(
        corpus, args.base_k, tc, layout=layout, threads=cfg.threads, progress=report
    )
    fileio.write_vocab(args.out, result.vocab)
    if result.exhausted:
        print(
            f"warning: pairs exhausted after {result.vocab.n_merges} of "
            f"{args.ext_size} merges",
            file=sys.stderr,
        )
    log.info("wrote vocabulary with %d merges to %s", result.vocab.n_merges, args.out)
    return 0


def _cmd_encode(args, cfg: GlobalConfig) -> int:
    vocab = fileio.read_vocab(args.vocab)
    _check_layout(args, vocab)
    corpus = fileio.read_corpus(args.corpus, base_k=vocab.base_size)
    records = encode_corpus(corpus, vocab, threads=cfg.threads)
    fileio.write_tokens(args.out, records)
    log.info("encoded %d grids to %s", len(records), args.out)
    return 0


def _cmd_decode(args, cfg: GlobalConfig) -> int:
    vocab = fileio.read_vocab(args.vocab)
    _check_layout(args, vocab)
    records = fileio.read_tokens(args.tokens)
    grids = decode_corpus(records, vocab, threads=cfg.threads)
    fileio.write_corpus(args.out, grids)
    log.info("decoded %d grids to %s", len(grids), args.out)
    return 0


def _cmd_assemble(args, cfg: GlobalConfig) -> int:
    if args.vocab is not None:
        vocab = fileio.read_vocab(args.vocab)
        _check_layout(args, vocab)
        layout = vocab.layout
    else:
        layout = _flag_layout(args) or IdLayout()
    records = fileio.read_tokens(args.tokens)
    with open(args.text, "r", encoding="utf-8") as fh:
        lines = [ln.split() for ln in fh if ln.strip()]
    if not lines:
        lines = [[]]  # empty text file: every sequence gets no text prefix
    if len(lines) not in (1, len(records)):
        raise VbpeError(
            f"text file has {len(lines)} lines for {len(records)} token records"
        )
    sequences = []
    for i, (_, _, ids) in enumerate(records):
        text_ids = [int(x) for x in (lines[0] if len(lines) == 1 else lines[i])]
        sequences.append(list(assemble(text_ids, ids, layout).ids))
    fileio.write_sequences(args.out, sequences)
    return 0


def _cmd_stats(args, cfg: GlobalConfig) -> int:
    if args.vocab is not None:
        vocab = fileio.read_vocab(args.vocab)
        _check_layout(args, vocab)
        layout = vocab.layout
        corpus = fileio.read_corpus(args.corpus, base_k=vocab.base_size)
        grids = [encode(cells, vocab)[0] for cells in corpus]
    else:
        corpus = fileio.read_corpus(args.corpus)
        base_k = args.base_k or int(max(int(g.max()) for g in corpus)) + 1
        layout = IdLayout(
            n_text=args.n_text if args.n_text is not None else DEFAULT_N_TEXT,
            base_k=base_k,
            ext_size=args.ext_size if args.ext_size is not None else DEFAULT_EXT_SIZE,
        )
        grids = [TokenGrid.from_base(g, layout) for g in corpus]
    counts = scan_adjacencies(grids, layout.total_ids, threads=cfg.threads)
    table = pair_table(counts, args.alpha, args.sigma)
    print("# vbpe-stats v1")
    print("left\tright\th_count\tv_count\tF\tS\tP")
    for row in table[: args.top]:
        print(
            f"{row.left}\t{row.right}\t{row.h_count}\t{row.v_count}"
            f"\t{row.frequency:.9f}\t{row.spatial:.9f}\t{row.priority:.9f}"
        )
    return 0


def _cmd_eval_nll(args, cfg: GlobalConfig) -> int:
    vocab = fileio.read_vocab(args.vocab)
    _check_layout(args, vocab)
    if not 0.0 < args.split < 1.0:
        raise VbpeError(f"--split must be in (0, 1), got {args.split}")
    corpus = fileio.read_corpus(args.corpus, base_k=vocab.base_size)
    rng = np.random.default_rng(args.seed)
    order_idx = rng.permutation(len(corpus))
    n_train = max(1, int(len(corpus) * args.split))
    if n_train >= len(corpus):
        raise VbpeError("split leaves no evaluation grids")
    train_grids = [corpus[i] for i in order_idx[:n_train]]
    eval_grids = [corpus[i] for i in order_idx[n_train:]]

    def raw_records(grids):
        return [(g.shape[0], g.shape[1], g.ravel().tolist()) for g in grids]

    def bpe_records(grids):
        offset = vocab.layout.n_text
        return [
            (h, w, [t - offset for t in ids])
            for h, w, ids in encode_corpus(grids, vocab, threads=cfg.threads)
        ]

    raw_nll = ngram_nll(
        raw_records(train_grids), raw_records(eval_grids), args.order, args.lam,
        vocab.base_size,
    )
    bpe_train = bpe_records(train_grids)
    bpe_eval = bpe_records(eval_grids)
    bpe_nll = ngram_nll(
        bpe_train, bpe_eval, args.order, args.lam, vocab.base_size + vocab.n_merges
    )
    cells = sum(h * w for h, w, _ in bpe_eval)
    toks = sum(len(ids) for _, _, ids in bpe_eval)
    print("# vbpe-eval-nll v1")
    print("config\torder\tlambda\tnll_per_cell\ttokens_per_cell")
    print(f"raw\t{args.order}\t{args.lam}\t{raw_nll:.6f}\t1.000000")
    print(f"bpe\t{args.order}\t{args.lam}\t{bpe_nll:.6f}\t{toks / cells:.6f}")
    return 0


def _cmd_plan(args, cfg: GlobalConfig) -> int:
    doc = plan_to_doc(default_plan(), args.n_layers)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def _cmd_expand_embeddings(args, cfg: GlobalConfig) -> int:
    spec = EmbeddingSpec(
        n_text=args.n_text,
        base_k=args.base_k,
        ext_size=args.ext_size,
        dim=args.dim,
        seed=args.seed,
    )
    fileio.write_embeddings(args.out, expand_embeddings(spec))
    return 0


_HANDLERS = {
    "gen-markov": _cmd_gen_markov,
    "train-vocab": _cmd_train_vocab,
    "encode": _cmd_encode,
    "decode": _cmd_decode,
    "assemble": _cmd_assemble,
    "stats": _cmd_stats,
    "eval-nll": _cmd_eval_nll,
    "plan": _cmd_plan,
    "expand-embeddings": _cmd_expand_embeddings,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    cfg = GlobalConfig(
        layout=None,
        seed=getattr(args, "seed", 0),
        threads=max(1, args.threads),
        verbose=args.verbose,
    )
    try:
        return _HANDLERS[args.command](args, cfg)
    except VbpeError as exc:
        print(f"vbpe: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"vbpe: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
