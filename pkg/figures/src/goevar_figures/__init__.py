"""Figure scripts for goevar experiment logs.

These scripts aggregate and draw; the physics lives entirely in the
simulation package and reaches us only through its CSV/JSON files.
"""

from .records import EXPECTED_HEADER, Record, SchemaError, load_records, load_summary
from .spec import FigureConfigError, FigureSpec, render

__version__ = "0.1.0"
