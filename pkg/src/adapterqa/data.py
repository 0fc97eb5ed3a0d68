"""QA record ingest (JSONL), dataset statistics, and example preparation.

A record pairs a question with either a text passage or a hierarchical
table plus one or more reference answers. Preparation linearizes tables,
assembles the prompted input sequence, and applies optional token budgets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .assembly import InputSequence, assemble, truncate
from .errors import SchemaError
from .linearize import linearize
from .tables import HierarchicalTable, validate_table

MODALITIES = ("table", "text")


@dataclass
class QaRecord:
    id: str
    question: str
    title: str
    answers: list[str]
    passage: str | None = None
    table: HierarchicalTable | None = None

    def __post_init__(self):
        if (self.passage is None) == (self.table is None):
            raise SchemaError("record must carry exactly one of passage or table")
        if not self.answers:
            raise SchemaError("record must carry at least one answer")

    @property
    def modality(self) -> str:
        return "text" if self.passage is not None else "table"

    def context_text(self) -> str:
        """Passage verbatim, or the table flattened to key:value text."""
        if self.passage is not None:
            return self.passage
        return linearize(self.table).text


def _record_from_json(obj: object, line: int) -> QaRecord:
    if not isinstance(obj, dict):
        raise SchemaError(f"record must be an object, got {type(obj).__name__}", line)
    for key in ("id", "question", "answers"):
        if key not in obj:
            raise SchemaError(f"record is missing '{key}'", line)
    if not isinstance(obj["answers"], list) or not all(isinstance(a, str) for a in obj["answers"]):
        raise SchemaError("'answers' must be a list of strings", line)
    context = obj.get("context")
    if not isinstance(context, dict) or len(set(context) & {"passage", "table"}) != 1:
        raise SchemaError("'context' must be an object with exactly one of 'passage' or 'table'", line)
    passage = context.get("passage")
    table = None
    if "table" in context:
        try:
            table = HierarchicalTable.from_json_dict(context["table"])
        except SchemaError as exc:
            raise SchemaError(f"bad table: {exc}", line) from exc
    elif not isinstance(passage, str):
        raise SchemaError("'passage' must be a string", line)
    try:
        return QaRecord(
            id=str(obj["id"]),
            question=obj["question"],
            title=obj.get("title", ""),
            answers=list(obj["answers"]),
            passage=passage,
            table=table,
        )
    except SchemaError as exc:
        raise SchemaError(str(exc), line) from exc


def read_records(path: str | Path, modality: str) -> list[QaRecord]:
    """Parse a JSONL file of records, all of the given modality.

    Table contexts are validated (spans must resolve); schema problems are
    reported with their line number.
    """
    if modality not in MODALITIES:
        raise SchemaError(f"modality must be one of {MODALITIES}, got {modality!r}")
    records = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON: {exc}", line_no) from exc
            record = _record_from_json(obj, line_no)
            if record.modality != modality:
                raise SchemaError(
                    f"expected {modality} context, found {record.modality}", line_no
                )
            if record.table is not None:
                validate_table(record.table)
            records.append(record)
    return records


@dataclass(frozen=True)
class DatasetStats:
    n_samples: int
    max_question_tokens: int
    max_target_tokens: int
    max_context_tokens: int | None  # text modality
    max_table_rows: int | None      # table modality, resolved grid height
    max_table_cols: int | None      # table modality, resolved grid width

    def to_json_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "max_question_tokens": self.max_question_tokens,
            "max_target_tokens": self.max_target_tokens,
            "max_context_tokens": self.max_context_tokens,
            "max_table_rows": self.max_table_rows,
            "max_table_cols": self.max_table_cols,
        }


def compute_stats(records: list[QaRecord]) -> DatasetStats:
    """Whitespace-token maxima per field; table shapes from resolved grids.

    Permutation-invariant: every aggregate is a max over records.
    """
    max_question = 0
    max_target = 0
    max_context: int | None = None
    max_rows: int | None = None
    max_cols: int | None = None
    for record in records:
        max_question = max(max_question, len(record.question.split()))
        max_target = max(max_target, max(len(a.split()) for a in record.answers))
        if record.passage is not None:
            tokens = len(record.passage.split())
            max_context = tokens if max_context is None else max(max_context, tokens)
        else:
            resolved = validate_table(record.table)
            rows = resolved.n_header_rows + resolved.n_body_rows
            max_rows = rows if max_rows is None else max(max_rows, rows)
            max_cols = resolved.width if max_cols is None else max(max_cols, resolved.width)
    return DatasetStats(
        n_samples=len(records),
        max_question_tokens=max_question,
        max_target_tokens=max_target,
        max_context_tokens=max_context,
        max_table_rows=max_rows,
        max_table_cols=max_cols,
    )


@dataclass(frozen=True)
class PrepareLimits:
    """Both budgets are exposed as configuration; None disables a budget."""

    max_input_tokens: int | None = None
    max_target_tokens: int | None = None
    answer_index: int = 0


def prepare_examples(records: list[QaRecord],
                     limits: PrepareLimits = PrepareLimits()) -> list[tuple[InputSequence, str]]:
    """Build (prompted input, target) pairs, one per record, in order.

    Tables are linearized, passages pass through; the answer at
    ``limits.answer_index`` (default: the first) becomes the target. Any
    failure raises; records are never silently dropped.
    """
    examples = []
    for record in records:
        if not (-len(record.answers) <= limits.answer_index < len(record.answers)):
            raise SchemaError(
                f"record {record.id}: answer index {limits.answer_index} out of range "
                f"for {len(record.answers)} answers"
            )
        seq = assemble(record.question, record.title, record.context_text())
        if limits.max_input_tokens is not None:
            seq = truncate(seq, limits.max_input_tokens)
        target = record.answers[limits.answer_index]
        if limits.max_target_tokens is not None:
            target = " ".join(target.split()[: limits.max_target_tokens])
        examples.append((seq, target))
    return examples
