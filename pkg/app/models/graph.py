"""
Grafos finitos, morfismos de grafos y el grupoide de isomorfismos parciales.
"""
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Hashable, Iterable, Iterator, List, Mapping, Optional, Tuple

import networkx as nx

from ..exceptions import InvalidVertex
from .terms import term_key


@dataclass(frozen=True)
class FiniteGraph:
    """
    Grafo simple finito: lista ordenada de vértices y aristas no orientadas.
    """

    vertices: Tuple[Hashable, ...] = ()
    edges: FrozenSet[FrozenSet] = frozenset()
    _adjacency: Dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        vertex_set = set(self.vertices)
        if len(vertex_set) != len(self.vertices):
            raise InvalidVertex("Vértices repetidos en el grafo")
        adjacency = {v: set() for v in self.vertices}
        for edge in self.edges:
            if len(edge) != 2:
                raise InvalidVertex(f"Arista inválida (lazo o tamaño incorrecto): {set(edge)}")
            u, v = tuple(edge)
            if u not in vertex_set or v not in vertex_set:
                raise InvalidVertex(f"Extremo de arista fuera del grafo: {u}, {v}")
            adjacency[u].add(v)
            adjacency[v].add(u)
        object.__setattr__(self, "_adjacency", {v: frozenset(n) for v, n in adjacency.items()})

    @classmethod
    def from_pairs(cls, vertices: Iterable[Hashable], pairs: Iterable[Tuple]) -> "FiniteGraph":
        return cls(tuple(vertices), frozenset(frozenset(p) for p in pairs))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteGraph):
            return NotImplemented
        return set(self.vertices) == set(other.vertices) and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((frozenset(self.vertices), self.edges))

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, vertex) -> bool:
        return vertex in self._adjacency

    def adjacent(self, u, v) -> bool:
        return v in self._adjacency.get(u, ())

    def neighbors(self, v) -> FrozenSet:
        return self._adjacency[v]

    def sorted_edges(self) -> List[Tuple]:
        ordered = []
        for edge in self.edges:
            u, v = sorted(edge, key=term_key)
            ordered.append((u, v))
        ordered.sort(key=lambda e: (term_key(e[0]), term_key(e[1])))
        return ordered

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from(tuple(e) for e in self.edges)
        return graph


@dataclass(frozen=True)
class Violation:
    """Primera violación encontrada al validar un isomorfismo parcial."""

    kind: str
    pair: Tuple
    image: Tuple

    def to_dict(self) -> dict:
        from .terms import format_vertex

        return {
            "kind": self.kind,
            "pair": [format_vertex(v) for v in self.pair],
            "image": [format_vertex(v) for v in self.image],
        }


class PartialIso:
    """
    Biyección finita d(φ) → r(φ). Inmutable; la validación contra un
    backend se hace con validate_partial_iso.
    """

    __slots__ = ("_forward", "_backward", "_hash")

    def __init__(self, pairs: Optional[Mapping] = None):
        forward = dict(pairs or {})
        backward = {}
        for x, y in forward.items():
            if y in backward:
                raise InvalidVertex(f"Mapa no inyectivo: {backward[y]} y {x} van a {y}")
            backward[y] = x
        self._forward = forward
        self._backward = backward
        self._hash = None

    @property
    def domain(self) -> FrozenSet:
        return frozenset(self._forward)

    @property
    def range(self) -> FrozenSet:
        return frozenset(self._backward)

    def items(self):
        return self._forward.items()

    def as_dict(self) -> Dict:
        return dict(self._forward)

    def __call__(self, x):
        return self._forward[x]

    def get(self, x, default=None):
        return self._forward.get(x, default)

    def inverse_of(self, y):
        return self._backward[y]

    def __contains__(self, x) -> bool:
        return x in self._forward

    def __len__(self) -> int:
        return len(self._forward)

    def __iter__(self) -> Iterator:
        return iter(self._forward)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PartialIso):
            return NotImplemented
        return self._forward == other._forward

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._forward.items()))
        return self._hash

    def __repr__(self) -> str:
        from .terms import format_vertex

        body = ", ".join(f"{format_vertex(x)}↦{format_vertex(y)}" for x, y in self._forward.items())
        return "PartialIso({" + body + "})"

    def restrict(self, subset: Iterable) -> "PartialIso":
        keep = set(subset)
        return PartialIso({x: y for x, y in self._forward.items() if x in keep})

    def extends(self, other: "PartialIso") -> bool:
        return all(x in self._forward and self._forward[x] == y for x, y in other.items())


def validate_partial_iso(pairs, backend) -> Tuple[bool, Optional[Violation]]:
    """
    Verifica que los pares formen un isomorfismo parcial del backend.

    Args:
        pairs: Mapping o PartialIso candidato
        backend: Backend con adjacent()

    Returns:
        (True, None) o (False, primera violación). No lanza excepciones.
    """
    items = list(pairs.items())
    seen = {}
    for x, y in items:
        if y in seen:
            return False, Violation("injectivity", (seen[y], x), (y, y))
        seen[y] = x
    for (x1, y1), (x2, y2) in combinations(items, 2):
        if x1 == x2:
            continue
        if backend.adjacent(x1, x2) != backend.adjacent(y1, y2):
            return False, Violation("adjacency", (x1, x2), (y1, y2))
    return True, None


def groupoid_compose(phi: PartialIso, psi: PartialIso) -> PartialIso:
    """φ∘ψ con dominio ψ⁻¹(r(ψ) ∩ d(φ))."""
    return PartialIso({x: phi(y) for x, y in psi.items() if y in phi})


def groupoid_invert(phi: PartialIso) -> PartialIso:
    return PartialIso({y: x for x, y in phi.items()})


def groupoid_orbit(family: Iterable[PartialIso], start: Iterable) -> FrozenSet:
    """Cierre de un conjunto finito bajo una familia de isomorfismos parciales y sus inversos."""
    maps = []
    for phi in family:
        maps.append(phi.as_dict())
        maps.append(groupoid_invert(phi).as_dict())
    orbit = set(start)
    frontier = list(orbit)
    while frontier:
        x = frontier.pop()
        for mapping in maps:
            y = mapping.get(x)
            if y is not None and y not in orbit:
                orbit.add(y)
                frontier.append(y)
    return frozenset(orbit)


def is_open_morphism(source: FiniteGraph, target: FiniteGraph, mapping: Mapping) -> bool:
    """
    True si el mapa preserva y refleja la adyacencia (u∼v ⇔ π(u)∼π(v)).

    Raises:
        InvalidVertex si el mapa no es total o alguna imagen no está en el destino
    """
    for v in source.vertices:
        if v not in mapping:
            raise InvalidVertex(f"El mapa no está definido en {v}")
        if mapping[v] not in target:
            raise InvalidVertex(f"La imagen {mapping[v]} no es un vértice del grafo destino")
    for u, v in combinations(source.vertices, 2):
        pu, pv = mapping[u], mapping[v]
        image_adjacent = pu != pv and target.adjacent(pu, pv)
        if source.adjacent(u, v) != image_adjacent:
            return False
    return True


def induced_subgraph(window: Iterable, backend) -> FiniteGraph:
    """
    Subgrafo inducido por una ventana de vértices del backend.

    Raises:
        InvalidVertex si algún término no es vértice del backend o hay repetidos
    """
    vertices = list(window)
    for v in vertices:
        backend.validate(v)
    if len(set(vertices)) != len(vertices):
        raise InvalidVertex("Vértices repetidos en la ventana")
    edges = [(u, v) for u, v in combinations(vertices, 2) if backend.adjacent(u, v)]
    return FiniteGraph.from_pairs(vertices, edges)
