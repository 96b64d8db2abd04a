"""Exact freeness analysis for rank-4 Hopf-Galois module structures.

Decides, for quartic fields with abelian Galois group, whether the ring of
integers is free over its associated order inside each non-classical
Hopf-Galois structure, producing exact indexes, Pell-type witnesses, and
verified generators throughout.
"""

from __future__ import annotations

from . import errors, fields, freeness, hopf, linalg, pell  # noqa: F401
from .errors import HopfqError, InternalInconsistencyError, ValidationError  # noqa: F401

__version__ = "0.1.0"
