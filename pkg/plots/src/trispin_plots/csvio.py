"""Loading and re-emitting the simulator's CSV files.

The files carry one '#' comment line with the resolved parameters, a header
row of channel names, and rows of 12-significant-digit floats; empty cells
mark undefined (conditioned-probability) points and load as NaN.  Loading
never alters data: dumping a loaded table reproduces the values exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SchemaError(ValueError):
    """The CSV does not match the expected column layout."""


@dataclass(frozen=True)
class Table:
    comment: str
    names: tuple[str, ...]
    columns: tuple[np.ndarray, ...]

    def column(self, name: str) -> np.ndarray:
        try:
            return self.columns[self.names.index(name)]
        except ValueError:
            raise SchemaError(
                f"missing column {name!r}; file has {', '.join(self.names)}"
            ) from None

    def require(self, *names: str) -> None:
        missing = [n for n in names if n not in self.names]
        if missing:
            raise SchemaError(
                f"missing column(s) {', '.join(missing)}; "
                f"file has {', '.join(self.names)}")

    @property
    def rows(self) -> int:
        return len(self.columns[0]) if self.columns else 0


def load_table(path: str) -> Table:
    comment = ""
    names: list[str] = []
    data: list[list[float]] = []
    with open(path) as f:
        for line in f:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                comment = line
                continue
            cells = line.split(",")
            if not names:
                names = cells
                data = [[] for _ in cells]
                continue
            if len(cells) != len(names):
                raise SchemaError(f"row with {len(cells)} cells under "
                                  f"{len(names)} headers in {path}")
            for col, cell in zip(data, cells):
                col.append(float(cell) if cell else np.nan)
    if not names:
        raise SchemaError(f"{path} has no header row")
    return Table(comment=comment, names=tuple(names),
                 columns=tuple(np.array(c) for c in data))


def dump_table(table: Table, path: str) -> None:
    with open(path, "w", newline="\n") as f:
        if table.comment:
            f.write(table.comment + "\n")
        f.write(",".join(table.names) + "\n")
        for r in range(table.rows):
            cells = []
            for col in table.columns:
                v = col[r]
                cells.append("" if np.isnan(v) else f"{v:.12g}")
            f.write(",".join(cells) + "\n")
