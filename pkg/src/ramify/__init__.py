"""Explicit totally ramified Galois towers over F_q((t)) and their ramification breaks."""

from .errors import RamifyError
from .finite_field import FqElem, FqField
from .galois import Automorphism, enumerate_automorphisms, group_table
from .laurent import LaurentSeries
from .pgroups import FiniteGroupTable
from .ramification import BreakData, analyze, hasse_arf_check, quotient_breaks, theorem_check
from .tower import TowerModel, TowerSpec, build

__all__ = [
    "Automorphism",
    "BreakData",
    "FiniteGroupTable",
    "FqElem",
    "FqField",
    "LaurentSeries",
    "RamifyError",
    "TowerModel",
    "TowerSpec",
    "analyze",
    "build",
    "enumerate_automorphisms",
    "group_table",
    "hasse_arf_check",
    "quotient_breaks",
    "theorem_check",
]
