"""Typed tables with row/column spans and occupancy-grid validation.

A hierarchical table is a title plus header rows and body rows of span
carrying cells. Validation resolves every cell onto a rectangular grid
(each grid position owned by exactly one cell) so that downstream
flattening can reason about columns instead of raw cell lists.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import InputError, SchemaError

_CONTROL_CHARS = re.compile(r"[\x00-\x1f\x7f-\x9f]")
_WHITESPACE_RUN = re.compile(r"\s+")


def normalize_text(text: str) -> str:
    """Trim surrounding whitespace and collapse internal runs (including
    control characters) to single spaces."""
    text = _CONTROL_CHARS.sub(" ", text)
    return _WHITESPACE_RUN.sub(" ", text).strip()


class TableValidationError(InputError):
    """A table's span layout cannot be resolved onto a rectangular grid."""


class OverlappingSpans(TableValidationError):
    """Two cells claim the same grid position."""


class RaggedGrid(TableValidationError):
    """Rows resolve to different widths or leave uncovered positions."""


class SpanOutOfBounds(TableValidationError):
    """A rowspan or colspan extends past the edge of the grid."""


class EmptyGrid(TableValidationError):
    """The table resolves to a grid with no rows or no columns."""


@dataclass
class Cell:
    """One table cell covering ``rowspan`` x ``colspan`` grid positions.

    Text is normalized on construction; spans must be >= 1.
    """

    text: str = ""
    colspan: int = 1
    rowspan: int = 1

    def __post_init__(self):
        if not isinstance(self.text, str):
            raise InputError(f"cell text must be a string, got {type(self.text).__name__}")
        if not isinstance(self.colspan, int) or isinstance(self.colspan, bool) or self.colspan < 1:
            raise InputError(f"colspan must be a positive integer, got {self.colspan!r}")
        if not isinstance(self.rowspan, int) or isinstance(self.rowspan, bool) or self.rowspan < 1:
            raise InputError(f"rowspan must be a positive integer, got {self.rowspan!r}")
        self.text = normalize_text(self.text)

    @classmethod
    def from_json_dict(cls, obj: object) -> "Cell":
        if not isinstance(obj, dict):
            raise SchemaError(f"cell must be an object, got {type(obj).__name__}")
        unknown = set(obj) - {"text", "colspan", "rowspan"}
        if unknown:
            raise SchemaError(f"unknown cell keys: {sorted(unknown)}")
        try:
            return cls(
                text=obj.get("text", ""),
                colspan=obj.get("colspan", 1),
                rowspan=obj.get("rowspan", 1),
            )
        except InputError as exc:
            raise SchemaError(str(exc)) from exc

    def to_json_dict(self) -> dict:
        out: dict = {"text": self.text}
        if self.colspan != 1:
            out["colspan"] = self.colspan
        if self.rowspan != 1:
            out["rowspan"] = self.rowspan
        return out


@dataclass
class HierarchicalTable:
    """A titled table whose header/body cells may span rows and columns."""

    title: str
    header_rows: list[list[Cell]]
    body_rows: list[list[Cell]] = field(default_factory=list)

    @classmethod
    def from_json_dict(cls, obj: object) -> "HierarchicalTable":
        if not isinstance(obj, dict):
            raise SchemaError(f"table must be an object, got {type(obj).__name__}")
        title = obj.get("title", "")
        if not isinstance(title, str):
            raise SchemaError("table title must be a string")
        if "header_rows" not in obj:
            raise SchemaError("table is missing 'header_rows'")

        def rows_from(key: str) -> list[list[Cell]]:
            raw = obj.get(key, [])
            if not isinstance(raw, list) or any(not isinstance(r, list) for r in raw):
                raise SchemaError(f"'{key}' must be a list of rows (lists of cells)")
            return [[Cell.from_json_dict(c) for c in row] for row in raw]

        return cls(
            title=normalize_text(title),
            header_rows=rows_from("header_rows"),
            body_rows=rows_from("body_rows"),
        )

    def to_json_dict(self) -> dict:
        return {
            "title": self.title,
            "header_rows": [[c.to_json_dict() for c in row] for row in self.header_rows],
            "body_rows": [[c.to_json_dict() for c in row] for row in self.body_rows],
        }


@dataclass
class RegularTable:
    """A table with a single header row and all cells logically 1x1."""

    title: str
    header: list[str]
    rows: list[list[str]]

    def __post_init__(self):
        width = len(self.header)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise RaggedGrid(
                    f"row {i} has {len(row)} entries, expected {width} to match the header"
                )

    @property
    def width(self) -> int:
        return len(self.header)

    def as_hierarchical(self) -> HierarchicalTable:
        """Re-wrap with 1x1 cells, e.g. to feed back through the linearizer."""
        return HierarchicalTable(
            title=self.title,
            header_rows=[[Cell(text=h) for h in self.header]],
            body_rows=[[Cell(text=v) for v in row] for row in self.rows],
        )


@dataclass
class ValidatedTable:
    """A hierarchical table with its resolved occupancy grids.

    ``header_grid[r][c]`` / ``body_grid[r][c]`` hold the owning ``Cell``
    (the same instance across its whole span) for every grid position.
    """

    title: str
    width: int
    header_grid: list[list[Cell]]
    body_grid: list[list[Cell]]

    @property
    def n_header_rows(self) -> int:
        return len(self.header_grid)

    @property
    def n_body_rows(self) -> int:
        return len(self.body_grid)

    def logical_cells(self) -> list[Cell]:
        """Unique cells in first-occurrence (row-major) order."""
        seen: dict[int, Cell] = {}
        for grid in (self.header_grid, self.body_grid):
            for row in grid:
                for cell in row:
                    seen.setdefault(id(cell), cell)
        return list(seen.values())


def _resolve_section(rows: list[list[Cell]], what: str, width: int | None) -> list[list[Cell]]:
    """Place each cell at the leftmost free column of its starting row.

    With ``width=None`` the grid grows as needed and the width is inferred;
    otherwise cells must fit within ``width`` columns. Returns the occupancy
    grid (one owning Cell per position); raises on overlaps, out-of-bounds
    spans, or uncovered positions.
    """
    n_rows = len(rows)
    grid: list[list[Cell | None]] = [[] for _ in range(n_rows)]

    def col_free(r: int, c: int) -> bool:
        return c >= len(grid[r]) or grid[r][c] is None

    def occupy(r: int, c: int, cell: Cell):
        while len(grid[r]) <= c:
            grid[r].append(None)
        grid[r][c] = cell

    for r, row in enumerate(rows):
        cursor = 0
        for cell in row:
            while not col_free(r, cursor):
                cursor += 1
            if width is not None and cursor >= width:
                raise RaggedGrid(
                    f"{what} row {r} resolves wider than the grid width {width}"
                )
            if width is not None and cursor + cell.colspan > width:
                raise SpanOutOfBounds(
                    f"{what} row {r}: colspan {cell.colspan} at column {cursor} "
                    f"exceeds the grid width {width}"
                )
            if r + cell.rowspan > n_rows:
                raise SpanOutOfBounds(
                    f"{what} row {r}: rowspan {cell.rowspan} extends past the last {what} row"
                )
            for dr in range(cell.rowspan):
                for dc in range(cell.colspan):
                    if not col_free(r + dr, cursor + dc):
                        raise OverlappingSpans(
                            f"{what} rows: two cells claim position ({r + dr}, {cursor + dc})"
                        )
                    occupy(r + dr, cursor + dc, cell)
            cursor += cell.colspan

    resolved_width = width if width is not None else max((len(g) for g in grid), default=0)
    for r, grid_row in enumerate(grid):
        if len(grid_row) != resolved_width or any(c is None for c in grid_row):
            raise RaggedGrid(
                f"{what} row {r} covers {sum(c is not None for c in grid_row)} of "
                f"{resolved_width} columns"
            )
    return grid  # type: ignore[return-value]


def validate_table(raw: HierarchicalTable) -> ValidatedTable:
    """Resolve spans onto occupancy grids, checking full rectangular cover.

    The header section fixes the grid width; body rows must resolve to the
    same width. Pure function: ``raw`` is not modified.
    """
    if not raw.header_rows:
        raise EmptyGrid("table has no header rows")
    header_grid = _resolve_section(raw.header_rows, "header", width=None)
    width = len(header_grid[0]) if header_grid else 0
    if width < 1:
        raise EmptyGrid("table resolves to zero columns")
    body_grid = _resolve_section(raw.body_rows, "body", width=width)
    return ValidatedTable(
        title=raw.title,
        width=width,
        header_grid=header_grid,
        body_grid=body_grid,
    )
