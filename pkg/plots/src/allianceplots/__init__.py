"""Static figure rendering for alliancesim CSV artifacts."""

from .csvdata import SchemaError
from .render import KINDS, PlotJob, RenderInfo, render

__version__ = "0.1.0"
