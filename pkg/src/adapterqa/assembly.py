"""Prompted model inputs: ``<question> ... <title> ... <context> ...``.

Fields are whitespace-tokenized and joined with single spaces, so the
rendered string always carries the three markers exactly once, in order,
even when a field is empty. Budget trimming drops context tokens only.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError

QUESTION_MARKER = "<question>"
TITLE_MARKER = "<title>"
CONTEXT_MARKER = "<context>"
MARKERS = (QUESTION_MARKER, TITLE_MARKER, CONTEXT_MARKER)


class EmptyQuestion(InputError):
    """The question contributes no tokens."""


class BudgetTooSmall(InputError):
    """The token budget cannot hold the question, title, and markers."""


@dataclass(frozen=True)
class InputSequence:
    question_tokens: tuple[str, ...]
    title_tokens: tuple[str, ...]
    context_tokens: tuple[str, ...]

    @property
    def rendered(self) -> str:
        return " ".join(
            [
                QUESTION_MARKER,
                *self.question_tokens,
                TITLE_MARKER,
                *self.title_tokens,
                CONTEXT_MARKER,
                *self.context_tokens,
            ]
        )

    @property
    def n_tokens(self) -> int:
        """Total whitespace tokens in the rendered string, markers included."""
        return 3 + len(self.question_tokens) + len(self.title_tokens) + len(self.context_tokens)


def assemble(question: str, title: str, context: str) -> InputSequence:
    """Wrap the three fields with their prompt markers.

    Raises EmptyQuestion when the question has no tokens; title and context
    may be empty (their markers are still emitted).
    """
    question_tokens = tuple(question.split())
    if not question_tokens:
        raise EmptyQuestion("question must contain at least one token")
    return InputSequence(
        question_tokens=question_tokens,
        title_tokens=tuple(title.split()),
        context_tokens=tuple(context.split()),
    )


def truncate(seq: InputSequence, max_tokens: int) -> InputSequence:
    """Trim context tokens from the end so the total fits ``max_tokens``.

    Question, title, and the three markers are never dropped; if they alone
    exceed the budget, raises BudgetTooSmall. Idempotent at a fixed budget.
    """
    reserved = 3 + len(seq.question_tokens) + len(seq.title_tokens)
    if max_tokens < reserved:
        raise BudgetTooSmall(
            f"budget {max_tokens} cannot hold question, title, and markers ({reserved} tokens)"
        )
    keep = max_tokens - reserved
    if len(seq.context_tokens) <= keep:
        return seq
    return InputSequence(
        question_tokens=seq.question_tokens,
        title_tokens=seq.title_tokens,
        context_tokens=seq.context_tokens[:keep],
    )
