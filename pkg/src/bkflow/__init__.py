"""Balance of knowledge flows: citation-based accounting of knowledge exchange between countries."""

from bkflow.model import (
    AnalysisConfig,
    Affiliation,
    CitationLink,
    Corpus,
    CorpusError,
    JournalCategoryMap,
    PublicationRecord,
    ValidationReport,
    build_corpus,
)
from bkflow.attribution import MadeInResult, attribute_corpus, made_in
from bkflow.flows import (
    FlowMatrix,
    GainRecord,
    benefits_of,
    compute_flow_matrix,
    domestic_split,
    gains_of,
    tally_gains,
)
from bkflow.specialization import (
    UNDEFINED,
    balassa_ratio,
    kisi_table,
    kosi_table,
    specialization_index,
    top_specializations,
)

__all__ = [
    "AnalysisConfig",
    "Affiliation",
    "CitationLink",
    "Corpus",
    "CorpusError",
    "FlowMatrix",
    "GainRecord",
    "JournalCategoryMap",
    "MadeInResult",
    "PublicationRecord",
    "UNDEFINED",
    "ValidationReport",
    "attribute_corpus",
    "balassa_ratio",
    "benefits_of",
    "build_corpus",
    "compute_flow_matrix",
    "domestic_split",
    "gains_of",
    "kisi_table",
    "kosi_table",
    "made_in",
    "specialization_index",
    "tally_gains",
    "top_specializations",
]

__version__ = "0.1.0"
