"""Reading simulation trace CSVs.

The contract is the one documented by the simulator package: UTF-8 CSV with
a header row, a ``time_s`` column, float cells, and an optional
``violation_flag`` column of 0/1 markers. Nothing here imports the
simulator; any file matching that shape plots fine.
"""

import csv
from typing import Dict, Sequence

import numpy as np


class MissingColumnError(KeyError):
    """A referenced column is absent from the trace."""

    def __init__(self, missing: Sequence[str], available: Sequence[str]):
        self.missing = list(missing)
        self.available = list(available)
        msg = (f"trace is missing column(s) {', '.join(self.missing)}; "
               f"available: {', '.join(self.available)}")
        super().__init__(msg)

    def __str__(self):
        # KeyError would repr() the message and mangle the quoting
        return self.args[0]


def read_columns(path) -> Dict[str, np.ndarray]:
    """Load a trace CSV as a column-name -> float array mapping."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty trace file") from None
        rows = [[float(cell) for cell in row] for row in reader]
    if not rows:
        raise ValueError(f"{path}: trace has a header but no rows")
    data = np.asarray(rows, dtype=float)
    if data.shape[1] != len(header):
        raise ValueError(f"{path}: row width does not match the header")
    return {name: data[:, j] for j, name in enumerate(header)}


def require_columns(trace: Dict[str, np.ndarray], names: Sequence[str]):
    """Raise MissingColumnError naming whatever is absent."""
    missing = [n for n in names if n not in trace]
    if missing:
        raise MissingColumnError(missing, sorted(trace))
