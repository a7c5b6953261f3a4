"""Polyhedral abstract interpretation of a toy ISA, with loop-bound estimation."""

from .poly import LinExpr, LinearConstraint, Polyhedron, UNBOUNDED, var
from .state import AbstractState, VarGen, dump
from .program import CFG, Edge, IrreducibleError, LoopInfo, ParseError, load, parse
from .fixpoint import AnalysisResult, analyze
from .loopbound import UNKNOWN, BoundReport, LoopBound, LoopCounters, bounds_for, report
from .concrete import check_soundness, run

__all__ = [
    "LinExpr", "LinearConstraint", "Polyhedron", "UNBOUNDED", "var",
    "AbstractState", "VarGen", "dump",
    "CFG", "Edge", "IrreducibleError", "LoopInfo", "ParseError", "load", "parse",
    "AnalysisResult", "analyze",
    "UNKNOWN", "BoundReport", "LoopBound", "LoopCounters", "bounds_for", "report",
    "check_soundness", "run",
]
