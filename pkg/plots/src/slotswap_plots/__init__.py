"""Static figure rendering for slotswap simulation bundles."""

from .figures import FIGURE_KINDS, FigureSpec, render
from .reader import Bundle, MissingCellError, load_bundle

__version__ = "0.1.0"
