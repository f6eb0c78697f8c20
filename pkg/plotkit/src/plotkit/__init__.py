"""Figures for fdrelay Monte-Carlo results (reads the experiment CSV schema)."""

from .figspec import FigureSpec, FigureSpecError, load_figure_spec
from .render import Curve, aggregate, render

__version__ = "0.1.0"

__all__ = [
    "Curve",
    "FigureSpec",
    "FigureSpecError",
    "aggregate",
    "load_figure_spec",
    "render",
]
