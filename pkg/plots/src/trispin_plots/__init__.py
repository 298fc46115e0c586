"""Figure rendering for trispin CSV outputs."""

from .csvio import Table, SchemaError, load_table, dump_table
from .render import build_figure, render_figure_file

__version__ = "0.1.0"
