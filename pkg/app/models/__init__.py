"""
Modelos del dominio: términos de vértice, grafos finitos y descriptores de grupo
"""
from .graph import FiniteGraph, PartialIso, Violation, induced_subgraph, validate_partial_iso
from .groups import (
    AmalgamGroup,
    CyclicGroup,
    Embedding,
    FiniteTableGroup,
    FreeGroup,
    GroupDescriptor,
    GroupElem,
    HNNGroup,
    trivial_group,
)
from .terms import Base, SetTerm, Tower, format_vertex, parse_limit_term, parse_nat

__all__ = [
    "AmalgamGroup",
    "Base",
    "CyclicGroup",
    "Embedding",
    "FiniteGraph",
    "FiniteTableGroup",
    "FreeGroup",
    "GroupDescriptor",
    "GroupElem",
    "HNNGroup",
    "PartialIso",
    "SetTerm",
    "Tower",
    "Violation",
    "format_vertex",
    "induced_subgraph",
    "parse_limit_term",
    "parse_nat",
    "trivial_group",
    "validate_partial_iso",
]
