"""Gamma-dynamics on real characters of the one-holed torus.

Modules: ``charspace`` (characters, kappa, components), ``modular`` (the group
Gamma), ``traces`` (trace polynomials), ``reduction`` (normal forms),
``hyperbolic`` (upper half-plane checks), ``dynamics`` (orbits and invariant
measure), ``render`` (SVG/PPM figures) and ``cli``.
"""

from .charspace import Character, kappa
from .modular import Gen, GammaElement, apply, compose
from .reduction import reduce
from .traces import trace_polynomial

__all__ = ["Character", "kappa", "Gen", "GammaElement", "apply", "compose", "reduce", "trace_polynomial"]
__version__ = "0.1.0"
