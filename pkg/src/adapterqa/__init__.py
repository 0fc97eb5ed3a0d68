"""Parameter-efficient abstractive QA toolkit.

Uniform table/text linearization into prompted sequences, a frozen toy
encoder-decoder with trainable bottleneck adapters, exact trainable
parameter accounting, adapter-ablation planning, and ROUGE/BLEU metrics.
"""

from .adapters import (
    AdapterParams,
    AdapterSet,
    ModelDims,
    REFERENCE_DIMS,
    adapter_forward,
    count_adapter_params,
)
from .assembly import InputSequence, assemble, truncate
from .linearize import (
    FlatHeader,
    FlattenedTableText,
    expand_body,
    flatten_headers,
    linearize,
    serialize_row_major,
)
from .metrics import (
    MetricReport,
    PRF,
    evaluate_pairs,
    evaluate_predictions,
    metric_tokenize,
    rouge_l,
    rouge_n,
    sacrebleu_corpus,
)
from .tables import Cell, HierarchicalTable, RegularTable, ValidatedTable, validate_table
from .toymodel import (
    ToyConfig,
    ToyModel,
    TrainConfig,
    build_toy_model,
    freeze_report,
    grad_check,
    make_copy_task,
    train_adapters,
)

__version__ = "0.1.0"

__all__ = [
    "AdapterParams",
    "AdapterSet",
    "Cell",
    "FlatHeader",
    "FlattenedTableText",
    "HierarchicalTable",
    "InputSequence",
    "MetricReport",
    "ModelDims",
    "PRF",
    "REFERENCE_DIMS",
    "RegularTable",
    "ToyConfig",
    "ToyModel",
    "TrainConfig",
    "ValidatedTable",
    "adapter_forward",
    "assemble",
    "build_toy_model",
    "count_adapter_params",
    "evaluate_pairs",
    "evaluate_predictions",
    "expand_body",
    "flatten_headers",
    "freeze_report",
    "grad_check",
    "linearize",
    "make_copy_task",
    "metric_tokenize",
    "rouge_l",
    "rouge_n",
    "sacrebleu_corpus",
    "serialize_row_major",
    "train_adapters",
    "truncate",
    "validate_table",
]
