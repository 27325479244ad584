"""PPMI embeddings and token-level language identification for code-mixed text."""

from .analysis import assign_word_language, pair_analysis
from .classifier import ClassifierModel, FeatureConfig, TrainParams, featurize, predict, train
from .cooccurrence import SparseCooccurrence, Vocabulary, build_vocabulary, count_cooccurrences
from .corpus import (
    Tag,
    TaggedCorpus,
    Utterance,
    load_corpus,
    preprocess_raw,
    save_corpus,
    split_corpus,
    tag_distribution,
)
from .metrics import cmi, corpus_cmi, evaluate
from .pipeline import PipelineConfig, run_pipeline
from .ppmi import PpmiMatrix, compute_ppmi, mle_estimates, ppmi_lookup
from .svd import EmbeddingMatrix, TruncatedSvd, extract_embeddings, lookup, truncated_svd
from .synth import SynthSpec, generate_synthetic

__version__ = "0.1.0"
