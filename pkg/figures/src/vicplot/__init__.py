"""Figure rendering for simulation trace CSVs.

Consumes the trace file contract only: a header row with ``time_s``, data
columns, and an optional ``violation_flag``. Stacked panels share the time
axis; flagged steps are shaded.
"""

from .panels import FORMATS, PanelSpec, render_panels, save_figure
from .presets import PRESETS, preset_panels
from .trace import MissingColumnError, read_columns, require_columns

__version__ = "0.1.0"

__all__ = [
    "FORMATS",
    "MissingColumnError",
    "PRESETS",
    "PanelSpec",
    "preset_panels",
    "read_columns",
    "render_panels",
    "require_columns",
    "save_figure",
]
