"""Generalized A_r statistics.

Thin bindings over the C++ library. Points on the Bargmann domain are
sequences of complex numbers; occupations are lists of ints; operators come
back as dense numpy arrays over the enumerated Fock basis.
"""

from ._core import *  # noqa: F401,F403
from ._core import ArstatError, DomainError, InvalidSpec, StatisticsSpec  # noqa: F401

__version__ = "0.1.0"
