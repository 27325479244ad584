"""``codemix`` command-line interface."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import pipeline
from .analysis import assign_word_language, format_pair_report, pair_analysis
from .classifier import ClassifierModel, TrainParams, predict_corpus
from .cooccurrence import Vocabulary
from .corpus import (
    CorpusFormatError,
    Tag,
    Utterance,
    format_corpus,
    load_corpus,
    parse_ratio,
    preprocess_lines,
    save_corpus,
    tag_distribution,
)
from .metrics import corpus_cmi, evaluate
from .ppmi import PpmiMatrix
from .svd import EmbeddingMatrix
from .synth import SynthSpec, generate_synthetic

log = logging.getLogger("codemix")


def _dump(obj) -> None:
    print(json.dumps(obj, indent=2))


def cmd_preprocess(args):
    default = Tag.parse(args.default_tag) if args.default_tag else None
    with open(args.input, encoding="utf-8") as fh:
        corpus = preprocess_lines(fh, default, args.lowercase, path=args.input)
    save_corpus(corpus, args.out)
    log.info("wrote %d utterances (%d duplicates dropped)", len(corpus), corpus.dropped)


def cmd_split(args):
    info = pipeline.stage_split(
        args.input, args.train_out, args.test_out, parse_ratio(args.ratio), args.seed, args.lowercase
    )
    _dump(info)


def cmd_cooccur(args):
    _dump(pipeline.stage_cooccur(args.input, args.vocab_out, args.out, args.window, args.min_count))


def cmd_ppmi(args):
    _dump(pipeline.stage_ppmi(args.counts, args.out))


def cmd_svd(args):
    info = pipeline.stage_svd(
        args.ppmi, args.vocab, args.out, args.dim, args.seed, args.oversample, args.power_iters
    )
    _dump(info)


def cmd_train(args):
    emb = EmbeddingMatrix.load(args.embeddings)
    if args.dim is not None and args.dim != emb.dim:
        raise SystemExit(f"--dim {args.dim} does not match embedding dimension {emb.dim}")
    params = TrainParams(args.epochs, args.lr, args.l2, args.seed, args.class_weights)
    info = pipeline.stage_train(args.input, args.embeddings, args.out, args.kind, params, args.window)
    _dump(info)


def cmd_tag(args):
    model = ClassifierModel.load(args.model)
    emb = EmbeddingMatrix.load(args.embeddings)
    corpus = load_corpus(args.input)
    predicted = predict_corpus(model, corpus, emb)
    utts = [Utterance(u.tokens, p, u.id) for u, p in zip(corpus, predicted)]
    if args.out:
        save_corpus(utts, args.out)
    else:
        sys.stdout.write(format_corpus(utts))


def cmd_eval(args):
    gold = load_corpus(args.gold)
    pred = load_corpus(args.pred)
    if len(gold) != len(pred):
        raise SystemExit(f"gold has {len(gold)} utterances, predictions have {len(pred)}")
    for k, (g, p) in enumerate(zip(gold, pred)):
        if g.tokens != p.tokens:
            raise SystemExit(f"utterance {k}: gold and predicted tokens differ")
    report = evaluate(gold, [p.tags for p in pred])
    print(report.format_table())
    if args.json:
        Path(args.json).write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")


def cmd_cmi(args):
    res = corpus_cmi(load_corpus(args.input))
    c = res.corpus
    _dump({
        "cmi": c.value,
        "n_hi": c.n_hi,
        "n_en": c.n_en,
        "n_other": c.n_other,
        "utterance_mean_cmi": res.utterance_mean,
        "utterances": res.n_utterances,
    })


def cmd_stats(args):
    corpus = load_corpus(args.input)
    dist = tag_distribution(corpus)
    _dump({
        "utterances": len(corpus),
        "tokens": corpus.n_tokens,
        "dropped_duplicates": corpus.dropped,
        "tags": {t.value: n for t, n in dist.items()},
    })


def cmd_analyze(args):
    vocab = Vocabulary.load(args.vocab)
    ppmi = PpmiMatrix.load(args.ppmi)
    lang = assign_word_language(load_corpus(args.corpus), vocab)
    whole = pair_analysis(ppmi, lang)
    if args.target:
        if args.target not in vocab:
            raise SystemExit(f"target word {args.target!r} not in vocabulary")
        report = pair_analysis(ppmi, lang, args.target, vocab)
        print(format_pair_report(report, vocab.words, whole=whole, top=args.top))
    else:
        print(format_pair_report(whole, vocab.words, top=args.top))
    if lang.ties:
        print(f"majority-tag ties resolved by tag order: {lang.ties}")


def cmd_run(args):
    config = pipeline.PipelineConfig.load(args.config)
    manifest = pipeline.run_pipeline(config)
    final = manifest["stages"][-1]["info"]
    print(json.dumps({"status": manifest["status"], **final}, indent=2))


def cmd_synth(args):
    spec = SynthSpec.load(args.spec) if args.spec else SynthSpec()
    corpus = generate_synthetic(spec)
    save_corpus(corpus, args.out)
    log.info("wrote %d synthetic utterances to %s", len(corpus), args.out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="codemix", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("preprocess", help="raw utterance lines -> token-per-line TSV")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--default-tag", help="tag for untagged language tokens (e.g. En)")
    s.add_argument("--lowercase", action="store_true")
    s.set_defaults(func=cmd_preprocess)

    s = sub.add_parser("split", help="utterance-level train/test split")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--ratio", default="10:1")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--train-out", required=True)
    s.add_argument("--test-out", required=True)
    s.add_argument("--lowercase", action="store_true")
    s.set_defaults(func=cmd_split)

    s = sub.add_parser("cooccur", help="vocabulary and windowed co-occurrence counts")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--window", type=int, default=2)
    s.add_argument("--min-count", type=int, default=1)
    s.add_argument("--out", required=True)
    s.add_argument("--vocab-out", required=True)
    s.set_defaults(func=cmd_cooccur)

    s = sub.add_parser("ppmi", help="PPMI matrix from counts")
    s.add_argument("--counts", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_ppmi)

    s = sub.add_parser("svd", help="truncated SVD embeddings")
    s.add_argument("--ppmi", required=True)
    s.add_argument("--vocab", required=True)
    s.add_argument("--dim", type=int, default=100)
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--oversample", type=int, default=10)
    s.add_argument("--power-iters", type=int, default=2)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_svd)

    s = sub.add_parser("train", help="train a tag classifier")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--embeddings", required=True)
    s.add_argument("--kind", choices=("softmax", "svm"), default="softmax")
    s.add_argument("--dim", type=int, help="expected embedding dimension")
    s.add_argument("--window", type=int, default=1)
    s.add_argument("--epochs", type=int, default=30)
    s.add_argument("--lr", type=float, default=0.1)
    s.add_argument("--l2", type=float, default=1e-4)
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--class-weights", action="store_true", help="inverse-frequency class weights")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("tag", help="predict tags for a corpus")
    s.add_argument("--model", required=True)
    s.add_argument("--embeddings", required=True)
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_tag)

    s = sub.add_parser("eval", help="per-class P/R/F1 of predictions")
    s.add_argument("--gold", required=True)
    s.add_argument("--pred", required=True)
    s.add_argument("--json")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("cmi", help="code-mixing index of a corpus")
    s.add_argument("--in", dest="input", required=True)
    s.set_defaults(func=cmd_cmi)

    s = sub.add_parser("stats", help="tag distribution of a corpus")
    s.add_argument("--in", dest="input", required=True)
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("analyze-pmi", help="bilingual vs monolingual PPMI averages")
    s.add_argument("--ppmi", required=True)
    s.add_argument("--vocab", required=True)
    s.add_argument("--corpus", required=True)
    s.add_argument("--target")
    s.add_argument("--top", type=int, default=10)
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("run", help="full pipeline from a JSON config")
    s.add_argument("--config", required=True)
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("synth", help="generate a synthetic tagged corpus")
    s.add_argument("--spec", help="JSON synth spec (defaults used when omitted)")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        args.func(args)
    except pipeline.PipelineError as exc:
        print(f"codemix: {exc}", file=sys.stderr)
        return 2
    except (CorpusFormatError, ValueError, KeyError, FileNotFoundError) as exc:
        print(f"codemix {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
