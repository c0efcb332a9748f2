"""senseforge: word sense induction by clustering topic distributions.

Each occurrence of an ambiguous word is treated as a tiny document; a topic
model trained on those documents turns every occurrence into a distribution
over topics, and cosine k-means over those distributions yields induced
senses, which can be scored against gold annotations.
"""

from .clustering import ClusterConfig, Clustering, cosine_similarity, kmeans_cosine
from .corpus import (
    CorpusError,
    EncodedDocument,
    GoldStandard,
    Instance,
    IntegrityError,
    ParseError,
    Target,
    Vocabulary,
    build_vocabulary,
    decode,
    encode,
    encode_tokens,
    group_by_target,
    load_instances,
    load_key_file,
    tokenize,
    write_key_file,
)
from .lda import (
    GibbsSampler,
    LdaConfig,
    TopicModel,
    full_conditional,
    infer_theta,
    load_model,
    phi,
    save_model,
    train,
)
from .metrics import (
    ContingencyTable,
    ScoreReport,
    completeness,
    contingency,
    homogeneity,
    paired_f_score,
    pooled_table,
    score_report,
    v_measure,
)
from .pipeline import (
    PipelineError,
    RunConfig,
    RunReport,
    SweepResult,
    TargetResult,
    aggregate_scores,
    emit_contingency_report,
    format_contingency,
    run_all,
    run_target_word,
    score_key_files,
    sweep_k,
)
from .seeding import derive_seed

__version__ = "0.1.0"

__all__ = [
    "ClusterConfig",
    "Clustering",
    "ContingencyTable",
    "CorpusError",
    "EncodedDocument",
    "GibbsSampler",
    "GoldStandard",
    "Instance",
    "IntegrityError",
    "LdaConfig",
    "ParseError",
    "PipelineError",
    "RunConfig",
    "RunReport",
    "ScoreReport",
    "SweepResult",
    "Target",
    "TargetResult",
    "TopicModel",
    "Vocabulary",
    "aggregate_scores",
    "build_vocabulary",
    "completeness",
    "contingency",
    "cosine_similarity",
    "decode",
    "derive_seed",
    "emit_contingency_report",
    "encode",
    "encode_tokens",
    "format_contingency",
    "full_conditional",
    "group_by_target",
    "homogeneity",
    "infer_theta",
    "kmeans_cosine",
    "load_instances",
    "load_key_file",
    "load_model",
    "paired_f_score",
    "phi",
    "pooled_table",
    "run_all",
    "run_target_word",
    "save_model",
    "score_key_files",
    "score_report",
    "sweep_k",
    "tokenize",
    "train",
    "v_measure",
    "write_key_file",
]
