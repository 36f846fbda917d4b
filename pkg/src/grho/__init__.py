"""Exact arithmetic for the groups G_rho of piecewise linear homeomorphisms of the
line labelled by a quasi-periodic word, with witness construction for triples
and replay of the sigma-token certificate."""

from .config import Config, __version__
from .dyadic import Dyadic
from .element import GElement, equals, evaluate, generator, invert, product, then_compose, word_to_element
from .labelling import Labelling, default_labelling
from .plmap import Interval, PLHomeo

__all__ = [
    "Config",
    "Dyadic",
    "GElement",
    "Interval",
    "Labelling",
    "PLHomeo",
    "__version__",
    "default_labelling",
    "equals",
    "evaluate",
    "generator",
    "invert",
    "product",
    "then_compose",
    "word_to_element",
]
