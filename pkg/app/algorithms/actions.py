"""
Acciones de grupo sobre backends y grafos finitos.

Las acciones sobre el límite inductivo son estructurales: la regla de la
semilla actúa sobre los vértices Base y un SetTerm se mueve miembro a
miembro (g·U := gU).
"""
import threading
from abc import ABC, abstractmethod
from typing import Callable, Dict, Iterable, Iterator, List

from sympy.combinatorics import Permutation

from ..exceptions import InvalidVertex, InvalidLetter
from ..models.graph import FiniteGraph
from ..models.groups import FiniteTableGroup, GroupDescriptor, GroupElem
from ..models.terms import Base, SetTerm

_CACHE_LIMIT = 200000


class GroupAction(ABC):
    """Acción Γ ↷ G: act(g, x) es un automorfismo del grafo para cada g."""

    def __init__(self, group: GroupDescriptor):
        self.group = group
        self._cache: Dict = {}
        self._lock = threading.Lock()

    @abstractmethod
    def _act_base(self, g: GroupElem, x: Base) -> Base:
        ...

    @abstractmethod
    def validate(self, x) -> None:
        ...

    def act(self, g: GroupElem, x):
        """
        Imagen de x por g.

        Raises:
            InvalidVertex si x no es vértice del dominio de la acción
            InvalidLetter si g no pertenece al grupo
        """
        if not isinstance(g, GroupElem) or g.group is not self.group:
            raise InvalidLetter(f"{g!r} no pertenece a {self.group.name}")
        self.validate(x)
        if g.is_identity:
            return x
        return self._act_term(g, x)

    def _act_term(self, g: GroupElem, x):
        key = (g, x)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        memo: Dict = {}
        stack = [(x, False)]
        while stack:
            node, expanded = stack.pop()
            if node in memo:
                continue
            if isinstance(node, Base):
                memo[node] = self._act_base(g, node)
                continue
            hit = self._cache.get((g, node))
            if hit is not None:
                memo[node] = hit
                continue
            if expanded:
                memo[node] = SetTerm(node.stage, [memo[m] for m in node.members])
                continue
            stack.append((node, True))
            stack.extend((m, False) for m in node.members if m not in memo)
        with self._lock:
            if len(self._cache) > _CACHE_LIMIT:
                self._cache.clear()
            self._cache[key] = memo[x]
        return memo[x]

    def adjacent(self, u, v) -> bool:
        """Adyacencia en el grafo de la acción; falso si u = v."""
        return u != v and self.backend.adjacent(u, v)

    def candidates(self) -> Iterator:
        """Vértices del grafo de la acción en orden canónico."""
        return self.backend.iter_vertices()

    def act_set(self, g: GroupElem, xs: Iterable) -> set:
        return {self.act(g, x) for x in xs}

    def orbit_of(self, elements: Iterable[GroupElem], x) -> List:
        """Imágenes de x por una lista finita de elementos (sin repetidos, en orden)."""
        seen = []
        for g in elements:
            y = self.act(g, x)
            if y not in seen:
                seen.append(y)
        return seen


class LeftMultiplicationAction(GroupAction):
    """Γ ↷ límite sobre Γ (semilla sin aristas) por multiplicación a izquierda."""

    def __init__(self, group: GroupDescriptor, backend):
        super().__init__(group)
        if getattr(backend, "group", None) is not group:
            raise InvalidVertex(f"El backend {backend.spec} no tiene como semilla a {group.name}")
        self.backend = backend

    def validate(self, x) -> None:
        self.backend.validate(x)

    def _act_base(self, g, x):
        return Base(g * x.key)


class PermutationAction(GroupAction):
    """
    Acción de un grupo finito sobre una semilla finita vía permutaciones de
    índices de vértices (sympy), extendida estructuralmente.
    """

    def __init__(self, group: GroupDescriptor, backend, permutation_of: Callable[[GroupElem], Permutation]):
        super().__init__(group)
        self.backend = backend
        self.permutation_of = permutation_of
        seed_size = len(backend.seed)
        for g in group.elements():
            perm = permutation_of(g)
            if perm.size > seed_size:
                raise InvalidVertex(f"La permutación de {g} mueve vértices fuera de la semilla")
            mapping = {Base(i): Base(perm(i) if i < perm.size else i) for i in range(seed_size)}
            if not _preserves_edges(backend.seed, mapping):
                raise InvalidVertex(f"La permutación de {g} no es un automorfismo de la semilla")

    @classmethod
    def from_table(cls, group: FiniteTableGroup, backend) -> "PermutationAction":
        return cls(group, backend, group.permutation)

    def validate(self, x) -> None:
        self.backend.validate(x)

    def _act_base(self, g, x):
        perm = self.permutation_of(g)
        i = x.key
        return Base(perm(i) if i < perm.size else i)


class FiniteAction(GroupAction):
    """
    Acción sobre un grafo finito de términos. `rule` da la imagen de los
    vértices de la semilla; los SetTerm del grafo se mueven miembro a miembro.
    """

    def __init__(self, group: GroupDescriptor, graph: FiniteGraph, rule: Callable[[GroupElem, Base], Base]):
        super().__init__(group)
        self.graph = graph
        self.rule = rule

    def validate(self, x) -> None:
        if x not in self.graph:
            raise InvalidVertex(f"{x} no es vértice del grafo de la acción")

    def _act_base(self, g, x):
        return self.rule(g, x)

    def adjacent(self, u, v) -> bool:
        return u != v and self.graph.adjacent(u, v)

    def candidates(self) -> Iterator:
        return iter(self.graph.vertices)

    def permutation(self, g: GroupElem) -> Dict:
        """La biyección inducida por g sobre los vértices del grafo."""
        return {v: self.act(g, v) for v in self.graph.vertices}

    def is_automorphism(self, g: GroupElem) -> bool:
        mapping = self.permutation(g)
        if set(mapping.values()) != set(self.graph.vertices):
            return False
        return _preserves_edges(self.graph, mapping)


def _preserves_edges(graph: FiniteGraph, mapping: Dict) -> bool:
    images = {frozenset(mapping[v] for v in edge) for edge in graph.edges}
    return images == set(graph.edges)


def act(action: GroupAction, g: GroupElem, x):
    return action.act(g, x)
