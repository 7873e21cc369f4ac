"""
Backends del Grafo Aleatorio.

- BitBackend: modelo explícito sobre los naturales (x < y adyacentes si el
  bit x de y vale 1).
- LimitBackend: límite inductivo de extensiones aleatorias (con parámetro l)
  sobre una semilla finita o sobre un grupo visto como grafo sin aristas.
- RestrictionBackend / SliceBackend: grafos derivados R∖A y R_{U,V}.
"""
import logging
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass
from itertools import combinations, count, islice
from math import gcd
from typing import FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Union

from ..config import settings
from ..exceptions import DisjointnessViolated, ExhaustedBackend, InvalidVertex, LoopQuery
from ..models.graph import FiniteGraph
from ..models.groups import GroupDescriptor, GroupElem
from ..models.terms import (
    Base,
    SetTerm,
    Tower,
    format_vertex,
    has_bit,
    int_bits,
    is_nat,
    nat_bits,
    nat_from_exponents,
    parse_limit_term,
    parse_nat,
    term_key,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Delete:
    """Operación R ↦ R∖A."""

    vertices: FrozenSet


@dataclass(frozen=True)
class Slice:
    """Operación R ↦ R_{U,V}."""

    U: FrozenSet
    V: FrozenSet


class Backend(ABC):
    """Oráculo de adyacencia con enumeración canónica y testigos de la propiedad (R)."""

    kind = "abstract"

    @abstractmethod
    def is_vertex(self, x) -> bool:
        ...

    @abstractmethod
    def _adjacent(self, x, y) -> bool:
        ...

    @abstractmethod
    def iter_vertices(self) -> Iterator:
        ...

    @abstractmethod
    def property_r_witness(self, U: Iterable, V: Iterable, exclude: Iterable = ()):
        """
        Vértice z ∉ U∪V∪exclude adyacente a todo U y a nada de V.

        Raises:
            DisjointnessViolated si U ∩ V ≠ ∅
        """

    @abstractmethod
    def parse_vertex(self, text: str):
        ...

    @property
    @abstractmethod
    def spec(self) -> str:
        ...

    def validate(self, x) -> None:
        if not self.is_vertex(x):
            raise InvalidVertex(f"{x!r} no es un vértice del backend {self.spec}", vertex=x)

    def adjacent(self, x, y) -> bool:
        self.validate(x)
        self.validate(y)
        if x == y:
            raise LoopQuery(f"Consulta de lazo en {format_vertex(x)}")
        return self._adjacent(x, y)

    def enumerate(self, n: int) -> List:
        if n < 0:
            raise ValueError("n debe ser no negativo")
        return list(islice(self.iter_vertices(), n))

    def format_vertex(self, x) -> str:
        return format_vertex(x)

    def sort_key(self, x):
        return term_key(x)

    def _check_sets(self, U: Iterable, V: Iterable):
        U, V = frozenset(U), frozenset(V)
        for x in U | V:
            self.validate(x)
        if U & V:
            raise DisjointnessViolated(
                "U y V deben ser disjuntos",
                shared=",".join(sorted(format_vertex(x) for x in U & V)),
            )
        return U, V

    def derive(self, op: Union[Delete, Slice]) -> "Backend":
        if isinstance(op, Delete):
            return RestrictionBackend(self, op.vertices)
        return SliceBackend(self, op.U, op.V)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "spec": self.spec}


# ---------------------------------------------------------------------------
# BIT
# ---------------------------------------------------------------------------

class BitBackend(Backend):
    """Modelo de Rado por expansión binaria."""

    kind = "bit"

    @property
    def spec(self) -> str:
        return "bit"

    def is_vertex(self, x) -> bool:
        return is_nat(x)

    def _adjacent(self, x, y) -> bool:
        low, high = (x, y) if x < y else (y, x)
        return has_bit(high, low)

    def iter_vertices(self) -> Iterator:
        return count(0)

    def parse_vertex(self, text: str):
        return parse_nat(text)

    def property_r_witness(self, U, V, exclude=()):
        U, V = self._check_sets(U, V)
        exclude = frozenset(exclude)
        forbidden = U | V | exclude

        int_or = 0
        small_mask = 0
        tower_bits: Set = set()
        for v in V:
            if isinstance(v, Tower):
                tower_bits |= v.exponent_set
            else:
                int_or |= v
                if v < settings.RADO_BIT_INT_LIMIT:
                    small_mask |= 1 << v

        def touches_v(z) -> bool:
            # z es bit de algún v ∈ V, o algún v ∈ V es bit de z
            if z in tower_bits:
                return True
            if isinstance(z, Tower):
                return bool(z.exponent_set & V)
            if z < int_or.bit_length() and (int_or >> z) & 1:
                return True
            return bool(z & small_mask)

        ordered_u = sorted(U)

        def adjacent_to_all_u(z) -> bool:
            return all(has_bit(z, u) if u < z else has_bit(u, z) for u in ordered_u)

        # Candidatos por debajo de max(U): z ∈ ∩ bits(u) para los u > z
        lower = -1
        for j in range(len(ordered_u)):
            for z in _common_bits(ordered_u[j:]):
                if z <= lower:
                    continue
                if z in forbidden or touches_v(z):
                    continue
                if adjacent_to_all_u(z):
                    return z
            lower = ordered_u[j]

        # Candidatos por encima de max(U): z = Σ_{u∈U} 2^u + pdep(t, posiciones libres)
        blocked_positions = {x for x in U | V if isinstance(x, int)}
        positions: List[int] = []
        position_source = (p for p in count(0) if p not in blocked_positions)
        for t in count(0):
            while t.bit_length() > len(positions):
                positions.append(next(position_source))
            extra = [positions[i] for i in int_bits(t)]
            z = nat_from_exponents(list(U) + extra)
            if z in forbidden or touches_v(z):
                continue
            return z


def _common_bits(values: Sequence) -> List:
    """Intersección de los conjuntos de bits, en orden creciente."""
    if all(isinstance(v, int) for v in values):
        mask = values[0]
        for v in values[1:]:
            mask &= v
        return list(int_bits(mask))
    common = None
    for v in values:
        bits = set(nat_bits(v))
        common = bits if common is None else common & bits
    return sorted(common)


def lex_subsets(n: int) -> Iterator[tuple]:
    """
    Subconjuntos no vacíos de range(n) como tuplas crecientes, en orden lexicográfico.

    Recorrido en profundidad con pila explícita: un prefijo va antes que sus
    extensiones, así que (0,) < (0, 1) < (0, 1, 2) < (0, 2) < (1,) ...
    """
    if n <= 0:
        return
    stack = [0]
    while stack:
        yield tuple(stack)
        if stack[-1] + 1 < n:
            stack.append(stack[-1] + 1)
            continue
        stack.pop()
        if stack:
            stack[-1] += 1


# ---------------------------------------------------------------------------
# Límite inductivo
# ---------------------------------------------------------------------------

class LimitBackend(Backend):
    """
    Grafo G_∞ = lim G̃_n con parámetro l (solo conjuntos U con gcd(l,|U|)=1).

    La semilla es un FiniteGraph con vértices Base(0..n-1) o un grupo
    infinito (grafo sin aristas sobre sus elementos). Las etapas son
    virtuales: los términos se materializan al enumerarlos.

    Con semilla finita el orden es por etapa y, dentro de cada etapa,
    lexicográfico según term_key. Con semilla de grupo la etapa 0 es
    infinita y el orden es por rondas.
    """

    kind = "limit"

    def __init__(self, seed: Union[FiniteGraph, GroupDescriptor], l: int = 1, seed_path: Optional[str] = None):
        if l < 1:
            raise ValueError("El parámetro l debe ser ≥ 1")
        self.seed = seed
        self.l = l
        self.seed_path = seed_path
        self.group = seed if isinstance(seed, GroupDescriptor) else None
        if self.group is None:
            for v in seed.vertices:
                if not isinstance(v, Base):
                    raise InvalidVertex(f"La semilla solo admite vértices Base, no {v!r}")
        self._lock = threading.RLock()
        self._cache: List = []
        self._round_of = {}
        self._generator = self._generate()
        self._valid: Set = set()

    @property
    def spec(self) -> str:
        if self.group is not None:
            return f"limit:group={self.group.name}:{self.l}"
        return f"limit:{self.seed_path or 'seed'}:{self.l}"

    def admissible(self, size: int) -> bool:
        return size >= 1 and gcd(self.l, size) == 1

    # --- vértices ---
    def is_vertex(self, x) -> bool:
        if x in self._valid:
            return True
        if isinstance(x, Base):
            if self.group is not None:
                ok = isinstance(x.key, GroupElem) and x.key.group is self.group
            else:
                ok = x in self.seed
        elif isinstance(x, SetTerm):
            ok = self.admissible(len(x.members)) and all(self.is_vertex(m) for m in x.members)
        else:
            ok = False
        if ok:
            with self._lock:
                self._valid.add(x)
        return ok

    def _adjacent(self, x, y) -> bool:
        if isinstance(x, Base) and isinstance(y, Base):
            return self.group is None and self.seed.adjacent(x, y)
        if isinstance(y, SetTerm) and x in y.members:
            return True
        return isinstance(x, SetTerm) and y in x.members

    def parse_vertex(self, text: str):
        term = parse_limit_term(text, self.group)
        self.validate(term)
        return term

    def base_vertices(self) -> Iterator[Base]:
        if self.group is not None:
            return (Base(g) for g in self.group.enumerate())
        return iter(self.seed.vertices)

    # --- enumeración ---
    def iter_vertices(self) -> Iterator:
        index = 0
        while True:
            with self._lock:
                while index >= len(self._cache):
                    self._cache.append(next(self._generator))
                vertex = self._cache[index]
            yield vertex
            index += 1

    def _generate(self) -> Iterator:
        if self.group is None:
            return self._generate_finite()
        return self._generate_rounds()

    def _generate_finite(self) -> Iterator:
        # Etapa 0 y luego, etapa a etapa, subconjuntos admisibles en orden lexicográfico
        previous = sorted(self.seed.vertices, key=term_key)
        yield from previous
        for stage in count(1):
            fresh = []
            for indices in lex_subsets(len(previous)):
                if not self.admissible(len(indices)):
                    continue
                term = SetTerm(stage, [previous[i] for i in indices])
                fresh.append(term)
                yield term
            previous = previous + fresh

    def _generate_rounds(self) -> Iterator:
        # Ronda N: Base(g_{N-1}) y SetTerm(s, U) con s ≤ N, |U| ≤ N, U en rondas < N
        seen: List = []
        bases = self.group.enumerate()
        for n in count(1):
            fresh = []
            base = Base(next(bases))
            self._round_of[base] = n
            fresh.append(base)
            for stage in range(1, n + 1):
                pool = [v for v in seen if v.stage < stage]
                for size in range(1, min(n, len(pool)) + 1):
                    if not self.admissible(size):
                        continue
                    for combo in combinations(pool, size):
                        if stage != n and size != n and all(self._round_of[m] < n - 1 for m in combo):
                            continue
                        term = SetTerm(stage, combo)
                        self._round_of[term] = n
                        fresh.append(term)
            for term in fresh:
                yield term
            seen.extend(fresh)

    # --- testigos ---
    def _fillers(self, avoid: FrozenSet) -> Iterator:
        """Vértices fuera de `avoid`: primero los de la semilla, luego la enumeración."""
        for b in self.base_vertices():
            if b not in avoid:
                yield b
        if self.group is None:
            for v in self.iter_vertices():
                if not isinstance(v, Base) and v not in avoid:
                    yield v

    def property_r_witness(self, U, V, exclude=()):
        U, V = self._check_sets(U, V)
        exclude = frozenset(exclude)
        for x in exclude:
            self.validate(x)
        avoid = U | V | exclude
        stage = max((x.stage for x in avoid), default=0)
        members = set(U)
        if not members:
            members.add(next(self._fillers(avoid)))
        else:
            fillers = self._fillers(avoid)
            while not self.admissible(len(members)):
                members.add(next(fillers))
        stage = max([stage] + [m.stage for m in members]) + 1
        witness = SetTerm(stage, members)
        with self._lock:
            self._valid.add(witness)
        return witness

    def to_dict(self) -> dict:
        data = {"kind": self.kind, "spec": self.spec, "l": self.l}
        if self.group is not None:
            data["group"] = self.group.name
        else:
            data["seed_vertices"] = len(self.seed)
        return data


# ---------------------------------------------------------------------------
# Backends derivados
# ---------------------------------------------------------------------------

class _DerivedBackend(Backend):
    def __init__(self, parent: Backend):
        self.parent = parent

    def _adjacent(self, x, y) -> bool:
        return self.parent._adjacent(x, y)

    def parse_vertex(self, text: str):
        vertex = self.parent.parse_vertex(text)
        self.validate(vertex)
        return vertex

    def iter_vertices(self) -> Iterator:
        scanned = 0
        for v in self.parent.iter_vertices():
            scanned += 1
            if scanned > settings.RADO_SCAN_LIMIT:
                logger.warning("⚠️ Se agotó el límite de escaneo en %s", self.spec)
                raise ExhaustedBackend(
                    f"{self.spec}: no hay más vértices dentro de {settings.RADO_SCAN_LIMIT} candidatos"
                )
            if self.is_vertex(v):
                yield v


class RestrictionBackend(_DerivedBackend):
    """R∖A para A finito."""

    kind = "restriction"

    def __init__(self, parent: Backend, deleted: Iterable):
        super().__init__(parent)
        self.deleted = frozenset(deleted)
        for x in self.deleted:
            parent.validate(x)

    @property
    def spec(self) -> str:
        return f"{self.parent.spec}-delete[{len(self.deleted)}]"

    def is_vertex(self, x) -> bool:
        return self.parent.is_vertex(x) and x not in self.deleted

    def property_r_witness(self, U, V, exclude=()):
        U, V = self._check_sets(U, V)
        return self.parent.property_r_witness(U, V, frozenset(exclude) | self.deleted)


class SliceBackend(_DerivedBackend):
    """R_{U,V}: vértices fuera de U∪V adyacentes a todo U y a nada de V."""

    kind = "slice"

    def __init__(self, parent: Backend, U: Iterable, V: Iterable):
        super().__init__(parent)
        self.U, self.V = parent._check_sets(U, V)

    @property
    def spec(self) -> str:
        return f"{self.parent.spec}-slice[{len(self.U)},{len(self.V)}]"

    def is_vertex(self, x) -> bool:
        if not self.parent.is_vertex(x) or x in self.U or x in self.V:
            return False
        return all(self.parent._adjacent(x, u) for u in self.U) and not any(
            self.parent._adjacent(x, v) for v in self.V
        )

    def property_r_witness(self, U, V, exclude=()):
        U, V = self._check_sets(U, V)
        return self.parent.property_r_witness(U | self.U, V | self.V, exclude)


# ---------------------------------------------------------------------------
# Funciones de módulo
# ---------------------------------------------------------------------------

def adjacent(backend: Backend, x, y) -> bool:
    return backend.adjacent(x, y)


def enumerate_vertices(backend: Backend, n: int) -> List:
    return backend.enumerate(n)


def property_r_witness(backend: Backend, U: Iterable, V: Iterable):
    return backend.property_r_witness(U, V)


def derive_backend(backend: Backend, op: Union[Delete, Slice]) -> Backend:
    return backend.derive(op)


def verify_witness(backend: Backend, z, U: Iterable, V: Iterable) -> bool:
    """Re-verifica un testigo de la propiedad (R) con el oráculo de adyacencia."""
    U, V = set(U), set(V)
    if z in U or z in V or not backend.is_vertex(z):
        return False
    return all(backend.adjacent(z, u) for u in U) and not any(backend.adjacent(z, v) for v in V)
