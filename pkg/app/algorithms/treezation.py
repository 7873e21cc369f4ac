"""
Extensiones elementales, treezation de tuplas de automorfismos y análisis
del grafo de Schreier asociado.

Cada par nuevo que se compromete tiene al menos un extremo fresco, así que
fuera de la parte inicial (contenida en F̃) el grafo de Schreier es un bosque.
"""
import logging
import threading
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations, islice
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from ..config import settings
from ..exceptions import BudgetExhausted, InvalidInput
from ..models.graph import PartialIso, groupoid_orbit, validate_partial_iso
from ..models.groups import FreeGroup, GroupElem
from ..models.terms import format_vertex, term_key

logger = logging.getLogger(__name__)


def _sorted(vertices: Iterable) -> List:
    return sorted(vertices, key=term_key)


# ---------------------------------------------------------------------------
# Extensión elemental
# ---------------------------------------------------------------------------

def elementary_extension(gamma: PartialIso, family: Sequence[PartialIso], F: Iterable, backend) -> PartialIso:
    """
    Extiende γ a una biyección K ⊔ {u_j} → {y_i} ⊔ K, con K = F ∪ ⋃(d∪r) de la familia.

    Los u_j (preimágenes de K∖r(γ)) y luego los y_i (imágenes de K∖d(γ)) se
    eligen con el testigo de la propiedad (R) del backend: adyacentes solo a
    lo que prescribe γ y a los anteriores de su misma lista.

    Args:
        gamma: isomorfismo parcial a extender
        family: familia finita que contiene a γ
        F: vértices que deben quedar en dominio y rango
        backend: backend con adjacent/property_r_witness

    Returns:
        La extensión γ̃

    Raises:
        InvalidInput si γ no pertenece a la familia
    """
    if not any(member == gamma for member in family):
        raise InvalidInput("γ debe pertenecer a la familia Φ")
    K = set(F)
    for member in family:
        K |= member.domain | member.range
    for v in K:
        backend.validate(v)
    missing_images = _sorted(K - gamma.domain)
    missing_preimages = _sorted(K - gamma.range)

    us: List = []
    for j, v in enumerate(missing_preimages):
        U = {u for u in gamma.domain if backend.adjacent(v, gamma(u))}
        U |= {us[jj] for jj in range(j) if backend.adjacent(missing_preimages[jj], v)}
        V = (K | set(us)) - U
        us.append(backend.property_r_witness(U, V))

    ys: List = []
    for i, x in enumerate(missing_images):
        U = {y for y in gamma.range if backend.adjacent(x, gamma.inverse_of(y))}
        U |= {ys[ii] for ii in range(i) if backend.adjacent(missing_images[ii], x)}
        V = (K | set(us) | set(ys)) - U
        ys.append(backend.property_r_witness(U, V))

    extended = gamma.as_dict()
    extended.update(zip(missing_images, ys))
    extended.update(zip(us, missing_preimages))
    result = PartialIso(extended)
    logger.info("✓ Extensión elemental: %d imágenes y %d preimágenes nuevas", len(ys), len(us))
    return result


def extension_edge_failures(
    family: Sequence[PartialIso], gamma: PartialIso, extended: PartialIso, start: Iterable, backend
) -> List[Tuple]:
    """
    Aristas nuevas de la órbita del grupoide que no son imagen por γ̃^{±1} de
    una arista de la órbita original. Lista vacía si la propiedad se cumple.
    """
    start = list(start)
    old_orbit = groupoid_orbit(family, start)
    new_family = [extended if member == gamma else member for member in family]
    new_orbit = groupoid_orbit(new_family, start)
    old_edges = {frozenset(p) for p in combinations(old_orbit, 2) if backend.adjacent(*p)}
    inverse = {y: x for x, y in extended.items()}
    failures = []
    for a, b in combinations(_sorted(new_orbit), 2):
        edge = frozenset((a, b))
        if edge in old_edges or not backend.adjacent(a, b):
            continue
        pulled = []
        if a in inverse and b in inverse:
            pulled.append(frozenset((inverse[a], inverse[b])))
        if a in extended and b in extended:
            pulled.append(frozenset((extended(a), extended(b))))
        if not any(p in old_edges for p in pulled):
            failures.append((a, b))
    return failures


# ---------------------------------------------------------------------------
# Treezation
# ---------------------------------------------------------------------------

class TreeAutomorphism:
    """Vista de la j-ésima componente de una treezation con la interfaz de LazyAutomorphism."""

    def __init__(self, owner: "Treezation", index: int):
        self.owner = owner
        self.index = index
        self.backend = owner.backend

    def query(self, x):
        return self.owner.query(self.index, x)

    def query_inv(self, y):
        return self.owner.query_inv(self.index, y)

    def __call__(self, x):
        return self.query(x)

    def peek(self, x):
        return self.owner._forward[self.index].get(x)

    def peek_inv(self, y):
        return self.owner._backward[self.index].get(y)

    @property
    def committed(self) -> PartialIso:
        with self.owner._lock:
            return PartialIso(self.owner._forward[self.index])

    @property
    def domain(self) -> frozenset:
        return frozenset(self.owner._forward[self.index])

    @property
    def range(self) -> frozenset:
        return frozenset(self.owner._backward[self.index])

    def __len__(self) -> int:
        return len(self.owner._forward[self.index])


class Treezation:
    """
    Treezation de (α₁,…,α_k) relativa a F.

    β₀ⱼ = αⱼ restringido a αⱼ⁻¹(F) ∪ F; la ronda l extiende elementalmente
    β_{l mod k} respecto de la familia actual y {z_l}, con z₀, z₁, … la
    enumeración del backend. Pasadas las rondas materializadas, las consultas
    nuevas se resuelven con un paso fresco: la imagen es un vértice sin tocar,
    adyacente solo a las imágenes de los vecinos ya comprometidos.

    Args:
        backend: backend común de los αⱼ
        alphas: automorfismos con query/query_inv
        F: conjunto finito en el que βⱼ^{±1} = αⱼ^{±1}
        rounds: rondas materializadas (por defecto RADO_TREEZATION_ROUNDS)
    """

    def __init__(self, backend, alphas: Sequence, F: Iterable = (), rounds: Optional[int] = None):
        if not alphas:
            raise InvalidInput("La treezation necesita al menos un automorfismo")
        rounds = settings.RADO_TREEZATION_ROUNDS if rounds is None else rounds
        if rounds < 0:
            raise InvalidInput(f"Número de rondas inválido: {rounds}")
        self.backend = backend
        self.k = len(alphas)
        self._lock = threading.RLock()
        self._forward: List[Dict] = [dict() for _ in range(self.k)]
        self._backward: List[Dict] = [dict() for _ in range(self.k)]
        self.touched: Set = set()
        self.F = frozenset(F)
        for x in _sorted(self.F):
            backend.validate(x)
            for j, alpha in enumerate(alphas):
                self._set(j, x, alpha.query(x))
                self._set(j, alpha.query_inv(x), x)
        self.guarded = frozenset(self.touched)
        self._z = backend.iter_vertices()
        self.z_values: List = []
        self.log: List[dict] = []
        self.fresh_steps = 0
        for l in range(rounds):
            self._round(l)
        self.maps = [TreeAutomorphism(self, j) for j in range(self.k)]
        logger.info(
            "✓ Treezation de %d automorfismos: |F̃|=%d, %d rondas, %d vértices tocados",
            self.k, len(self.guarded), rounds, len(self.touched),
        )

    @classmethod
    def generic(cls, backend, k: int, rounds: Optional[int] = None) -> "Treezation":
        """Treezation de k mapas vacíos: automorfismos con todas las órbitas infinitas."""
        return cls(backend, [None] * k, (), rounds)

    def _set(self, j: int, x, y) -> None:
        self._forward[j][x] = y
        self._backward[j][y] = x
        self.touched.add(x)
        self.touched.add(y)

    def _round(self, l: int) -> None:
        j = l % self.k
        z = next(self._z)
        self.z_values.append(z)
        family = [PartialIso(f) for f in self._forward]
        extended = elementary_extension(family[j], family, {z}, self.backend)
        fresh = [(x, y) for x, y in extended.items() if x not in self._forward[j]]
        for x, y in fresh:
            self._set(j, x, y)
        self.log.append({"round": l, "map": j + 1, "z": format_vertex(z), "new_pairs": len(fresh)})

    # --- consultas ---
    def query(self, j: int, x):
        with self._lock:
            forward = self._forward[j]
            if x in forward:
                return forward[x]
            self.backend.validate(x)
            U = {forward[a] for a in forward if self.backend.adjacent(a, x)}
            V = (self.touched | {x}) - U
            y = self.backend.property_r_witness(U, V)
            self._set(j, x, y)
            self.fresh_steps += 1
            return y

    def query_inv(self, j: int, y):
        with self._lock:
            backward = self._backward[j]
            if y in backward:
                return backward[y]
            self.backend.validate(y)
            U = {backward[b] for b in backward if self.backend.adjacent(b, y)}
            V = (self.touched | {y}) - U
            x = self.backend.property_r_witness(U, V)
            self._set(j, x, y)
            self.fresh_steps += 1
            return x

    def committed(self, j: int) -> PartialIso:
        with self._lock:
            return PartialIso(self._forward[j])

    def covers(self, x) -> bool:
        """x está en dominio y rango de todas las componentes."""
        return all(x in f for f in self._forward) and all(x in b for b in self._backward)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "guarded": len(self.guarded),
            "touched": len(self.touched),
            "rounds": list(self.log),
            "fresh_steps": self.fresh_steps,
        }


def treezation(alphas: Sequence, F: Iterable = (), rounds: Optional[int] = None, backend=None) -> Treezation:
    """Treezation de la tupla relativa a F sobre el backend común de los αⱼ."""
    if backend is None:
        backend = alphas[0].backend
    return Treezation(backend, alphas, F, rounds)


def evaluate_word(maps: Sequence, group: FreeGroup, w: GroupElem, x):
    """ᾱ(w)x aplicando las letras de w de derecha a izquierda."""
    for index, sign in reversed(group.letter_sequence(w)):
        x = maps[index].query(x) if sign == 1 else maps[index].query_inv(x)
    return x


def word_trajectory(maps: Sequence, group: FreeGroup, w: GroupElem, x) -> List:
    """Vértices visitados al evaluar w sobre x, empezando por x."""
    path = [x]
    for index, sign in reversed(group.letter_sequence(w)):
        x = maps[index].query(x) if sign == 1 else maps[index].query_inv(x)
        path.append(x)
    return path


# ---------------------------------------------------------------------------
# Grafo de Schreier
# ---------------------------------------------------------------------------

def committed_schreier_graph(maps: Sequence) -> nx.MultiDiGraph:
    """Aristas x → βⱼ(x) con etiqueta j+ para todos los pares comprometidos."""
    graph = nx.MultiDiGraph()
    for j, beta in enumerate(maps):
        for x, y in beta.committed.items():
            graph.add_edge(x, y, label=f"{j + 1}+")
    return graph


@dataclass
class SchreierReport:
    center: object
    radius: int
    graph: nx.MultiDiGraph
    cycles: List[List] = field(default_factory=list)
    cycles_outside: List[List] = field(default_factory=list)
    increment_violations: List = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.cycles_outside and not self.increment_violations

    def to_dict(self) -> dict:
        return {
            "center": format_vertex(self.center),
            "radius": self.radius,
            "vertices": self.graph.number_of_nodes(),
            "edges": self.graph.number_of_edges(),
            "cycles": [[format_vertex(v) for v in c] for c in self.cycles],
            "cycles_outside": [[format_vertex(v) for v in c] for c in self.cycles_outside],
            "increment_violations": [format_vertex(v) for v in self.increment_violations],
            "passed": self.passed,
        }


def schreier_window(maps: Sequence, center, radius: int, guarded: Iterable = ()) -> SchreierReport:
    """
    Bola de radio `radius` en el grafo de Schreier, forzando consultas.

    El análisis lista los ciclos minimales (lazos, aristas paralelas y una
    base mínima de ciclos), los que salen de F̃, y los vértices interiores
    fuera de F̃ cuya distancia a F̃ no crece de a uno hacia afuera.
    """
    if radius < 0:
        raise InvalidInput(f"Radio inválido: {radius}")
    guarded = frozenset(guarded)
    graph = nx.MultiDiGraph()
    graph.add_node(center)
    depth = {center: 0}
    queue = deque([center])
    while queue:
        v = queue.popleft()
        if depth[v] == radius:
            continue
        for j, beta in enumerate(maps):
            forward = beta.query(v)
            backward = beta.query_inv(v)
            if not graph.has_edge(v, forward, key=f"{j + 1}+"):
                graph.add_edge(v, forward, key=f"{j + 1}+", label=f"{j + 1}+")
            if not graph.has_edge(backward, v, key=f"{j + 1}+"):
                graph.add_edge(backward, v, key=f"{j + 1}+", label=f"{j + 1}+")
            for w in (forward, backward):
                if w not in depth:
                    depth[w] = depth[v] + 1
                    queue.append(w)

    cycles = _minimal_cycles(graph)
    outside = [c for c in cycles if not all(v in guarded for v in c)]
    violations = _increment_violations(graph, guarded, {v for v, d in depth.items() if d < radius})
    report = SchreierReport(center, radius, graph, cycles, outside, violations)
    if not report.passed:
        logger.warning("⚠️ Ventana de Schreier con %d ciclos fuera de F̃", len(outside))
    return report


def _minimal_cycles(graph: nx.MultiDiGraph) -> List[List]:
    cycles = []
    simple = nx.Graph()
    simple.add_nodes_from(graph.nodes)
    multiplicity: Dict[frozenset, int] = {}
    for u, v in graph.edges():
        if u == v:
            cycles.append([u])
            continue
        key = frozenset((u, v))
        multiplicity[key] = multiplicity.get(key, 0) + 1
        simple.add_edge(u, v)
    for key, count in multiplicity.items():
        if count > 1:
            cycles.append(_sorted(key))
    cycles.extend(nx.minimum_cycle_basis(simple))
    return cycles


def _increment_violations(graph: nx.MultiDiGraph, guarded: frozenset, interior: Set) -> List:
    sources = [v for v in graph.nodes if v in guarded]
    if not sources:
        return []
    undirected = nx.MultiGraph(graph.to_undirected())
    distance = nx.multi_source_dijkstra_path_length(undirected, sources)
    violations = []
    for v in _sorted(interior):
        d = distance.get(v)
        if v in guarded or d is None:
            continue
        closer = 0
        level = False
        for _, w in undirected.edges(v):
            dw = distance.get(w)
            if dw == d - 1:
                closer += 1
            elif dw == d:
                level = True
        if closer != 1 or level:
            violations.append(v)
    return violations


def schreier_distances(maps: Sequence, targets: Iterable) -> Dict:
    """Distancias en el grafo de Schreier comprometido desde el conjunto `targets`."""
    graph = nx.MultiGraph(committed_schreier_graph(maps).to_undirected())
    sources = [v for v in targets if v in graph]
    if not sources:
        return {}
    return nx.multi_source_dijkstra_path_length(graph, sources)


def set_diameter(maps: Sequence, vertices: Iterable) -> Tuple[int, bool]:
    """
    Mayor distancia finita entre vértices del conjunto en el grafo comprometido.

    Returns:
        (diámetro, completo) con completo = False si algún par no está conectado
    """
    graph = nx.MultiGraph(committed_schreier_graph(maps).to_undirected())
    vertices = [v for v in _sorted(set(vertices))]
    graph.add_nodes_from(vertices)
    targets = set(vertices)
    diameter = 0
    complete = True
    for v in vertices:
        lengths = nx.single_source_shortest_path_length(graph, v)
        for w in targets:
            if w not in lengths:
                complete = False
            else:
                diameter = max(diameter, lengths[w])
    return diameter, complete


# ---------------------------------------------------------------------------
# Palabras
# ---------------------------------------------------------------------------

def neumann_witness(maps: Sequence, group: FreeGroup, guarded: Iterable, budget: Optional[int] = None) -> GroupElem:
    """
    Primera palabra u ≠ 1 cíclicamente reducida (orden de enumeración del
    grupo libre) con β(u)F̃ ∩ F̃ = ∅ y β(u²)F̃ ∩ F̃ = ∅.

    Raises:
        BudgetExhausted si ninguna palabra del presupuesto sirve
    """
    budget = settings.RADO_NEUMANN_BUDGET if budget is None else budget
    guarded = _sorted(set(guarded))
    targets = set(guarded)
    tried = 0
    for u in islice(group.enumerate(), budget):
        tried += 1
        if u.is_identity or not group.is_cyclically_reduced(u):
            continue
        if any(evaluate_word(maps, group, u, x) in targets for x in guarded):
            continue
        square = u * u
        if any(evaluate_word(maps, group, square, x) in targets for x in guarded):
            continue
        logger.info("✓ Testigo de Neumann %s tras %d palabras", u, tried)
        return u
    logger.warning("⚠️ Sin testigo de Neumann en %d palabras", tried)
    raise BudgetExhausted("Ninguna palabra aleja F̃ de sí mismo dentro del presupuesto", budget=budget, tried=tried)


def edge_pullbacks(
    maps: Sequence, group: FreeGroup, guarded: Iterable, edges: Iterable[Tuple], max_length: int = 3
) -> List[Tuple]:
    """
    Aristas (a, b) para las que ninguna palabra de longitud ≤ max_length lleva
    ambos extremos a una arista dentro de F̃. Lista vacía si todas se recuperan.
    """
    guarded = frozenset(guarded)
    words = []
    for w in group.enumerate():
        if group.word_length(w) > max_length:
            break
        words.append(w)
    failures = []
    for a, b in edges:
        found = False
        for w in words:
            wa = evaluate_word(maps, group, w, a)
            if wa not in guarded:
                continue
            wb = evaluate_word(maps, group, w, b)
            if wb in guarded and wa != wb and maps[0].backend.adjacent(wa, wb):
                found = True
                break
        if not found:
            failures.append((a, b))
    return failures


def orbit_growth_failures(maps: Sequence, window: Iterable, length: int) -> List[Tuple[int, object]]:
    """Pares (j, x) cuya ⟨βⱼ⟩-órbita vuelve a x en menos de `length` pasos."""
    failures = []
    for x in _sorted(set(window)):
        for j, beta in enumerate(maps):
            y = x
            for _ in range(length):
                y = beta.query(y)
                if y == x:
                    failures.append((j, x))
                    break
    return failures


def check_partial_isos(maps: Sequence) -> List[int]:
    """Índices de las componentes cuya parte comprometida no valida."""
    bad = []
    for j, beta in enumerate(maps):
        ok, _ = validate_partial_iso(beta.committed, beta.backend)
        if not ok:
            bad.append(j)
    return bad
