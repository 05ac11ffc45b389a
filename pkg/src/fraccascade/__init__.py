"""Discrepancy-sensitive dynamic fractional cascading and its planar application."""

from .catalog import Catalog, DeadHandleError, Element, FingerSearchError
from .cascade import (
    CatalogGraph,
    CostTrace,
    DegreeError,
    GraphError,
    ReducedGraph,
    degree_reduce,
    graph_build,
    load_graph,
    parse_graph,
)
from .geometry import MaximaSet, Metric, Point, Quadrant, QueryStats, XTree
from .keys import MINUS_INF, PLUS_INF, check_key

__version__ = "0.1.0"
