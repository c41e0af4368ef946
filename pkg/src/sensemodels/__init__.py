"""Decomposable probabilistic models over discrete contextual features,
applied to word-sense disambiguation."""

from .classify import (
    EvaluationReport,
    Prediction,
    classify,
    evaluate,
    evaluate_predictions,
    majority_sense,
    posterior,
)
from .corpus import (
    Dataset,
    TaggedSentence,
    Xoshiro256StarStar,
    collect_instances,
    parse_corpus,
    serialize_corpus,
    split,
    synthesize,
)
from .decomposable import (
    UNCOVERED,
    DecomposableModel,
    FittedModel,
    InteractionGraph,
    Uncovered,
    check_decomposable,
    enumerate_models,
    estimate_cell,
    export_bayes_dot,
    export_markov_dot,
    fit_mle,
    graph_from_text,
    junction_tree,
    model_from_text,
    model_to_text,
)
from .errors import (
    CapabilityError,
    ConfigError,
    CorpusParseError,
    DecomposabilityError,
    SchemaMismatchError,
)
from .features import (
    BOUNDARY,
    FeatureSpec,
    InstanceRecord,
    candidate_collocations,
    extract_ending,
    extract_pos,
    score_collocations,
    select_collocations,
    vectorize,
)
from .goodness import (
    FitReport,
    SearchResult,
    assess,
    chi_square_sf,
    feature_informativeness,
    g_squared,
    model_df,
    model_dimension,
    search_models,
    sparsity_flag,
)
from .tables import (
    ContingencyTable,
    VariableSchema,
    build_table,
    marginalize,
    schema_from_text,
    schema_to_text,
    table_from_text,
    table_to_text,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
