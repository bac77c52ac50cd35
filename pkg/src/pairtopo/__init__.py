"""Definable sets in pairs of algebraically closed fields.

The differential field ``Q(t0, t1, ...)`` with ``D(t_i) = t_{i+1}`` serves as
the big field; its constants are the rationals.
"""
from .difffield import OmegaElement, derive, k_dependence, t, wronskian_eval
from .formulas import parse, to_blocks, to_text

__all__ = ["OmegaElement", "derive", "k_dependence", "parse", "t", "to_blocks",
           "to_text", "wronskian_eval"]
