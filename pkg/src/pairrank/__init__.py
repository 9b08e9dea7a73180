"""Pairwise neural ranking of machine-translation hypotheses."""

from .embeddings import EmbeddingTable, SentenceVector, compose_sentence_vector, load_embedding_table
from .features import (
    BleuComponents,
    NGramStats,
    PairwiseFeatures,
    assemble_pairwise,
    bleu_components,
    bleu_score,
    ngram_stats,
)
from .model import (
    Model,
    ModelConfig,
    ModelInput,
    PredictionDelta,
    decide,
    forward,
    init_model,
    load_model,
    predict_delta,
    save_model,
)
from .evaluation import EvalReport, PairCounts, evaluate, kendall_tau
from .training import (
    CostConfig,
    TrainConfig,
    TrainReport,
    backward,
    grad_check,
    kendall_cost,
    logistic_cost,
    train,
)
from .data_ingest import Dataset, EvaluationTuple, load_dataset, vectorize

__version__ = "0.1.0"
