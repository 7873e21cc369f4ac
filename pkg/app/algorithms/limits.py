"""
Extensiones aleatorias, acciones inducidas y la acción base canónica.

Las etapas son virtuales: un vértice es un término y la adyacencia es
estructural, así que solo se materializan las ventanas pedidas.
"""
import logging
from itertools import combinations, islice
from math import gcd
from typing import Callable, FrozenSet, Iterable, List, Optional, Sequence

from ..config import settings
from ..exceptions import BudgetExhausted, EmptyGraph, FiniteGroupRejected, InvalidInput
from ..models.graph import FiniteGraph
from ..models.groups import GroupDescriptor, GroupElem
from ..models.terms import Base, SetTerm, term_key
from .actions import FiniteAction, GroupAction, LeftMultiplicationAction, PermutationAction
from .backends import LimitBackend

logger = logging.getLogger(__name__)


def admissible(size: int, l: int) -> bool:
    return size >= 1 and gcd(l, size) == 1


def random_extension(graph: FiniteGraph, l: int = 1) -> FiniteGraph:
    """
    Extensión aleatoria G̃_l: un vértice nuevo por cada U ⊆ V(G) no vacío con
    gcd(l, |U|) = 1, adyacente exactamente a los miembros de U.

    Raises:
        EmptyGraph si G no tiene vértices
    """
    if len(graph) == 0:
        raise EmptyGraph("La extensión aleatoria necesita un grafo no vacío")
    if l < 1:
        raise InvalidInput(f"Parámetro l inválido: {l}")
    old = list(graph.vertices)
    stage = 1 + max(v.stage for v in old)
    fresh = []
    edges = set(graph.edges)
    for size in range(1, len(old) + 1):
        if not admissible(size, l):
            continue
        for subset in combinations(old, size):
            term = SetTerm(stage, subset)
            fresh.append(term)
            edges.update(frozenset((u, term)) for u in subset)
    fresh.sort(key=term_key)
    logger.info("🔄 Extensión de %d vértices: %d términos nuevos (l=%d)", len(old), len(fresh), l)
    return FiniteGraph(tuple(old + fresh), frozenset(edges))


def iterate_extensions(graph: FiniteGraph, l: int, stages: int) -> List[FiniteGraph]:
    """G_0 = G, G_{n+1} = (G̃_n)_l, hasta `stages` extensiones."""
    tower = [graph]
    for _ in range(stages):
        tower.append(random_extension(tower[-1], l))
    return tower


def seed_action(group: GroupDescriptor, graph: FiniteGraph, image_of: Callable[[GroupElem, Base], Base]) -> FiniteAction:
    """Acción sobre una semilla finita dada por la imagen de cada vértice Base."""
    action = FiniteAction(group, graph, image_of)
    for g in group.elements() if group.is_finite() else ():
        if not action.is_automorphism(g):
            raise InvalidInput(f"{g} no actúa como automorfismo de la semilla")
    return action


def permutation_rule(group) -> Callable[[GroupElem, Base], Base]:
    """Regla Base(i) ↦ Base(p(i)) para grupos de permutaciones de sympy."""

    def rule(g: GroupElem, x: Base) -> Base:
        perm = group.permutation(g)
        i = x.key
        return Base(perm(i) if i < perm.size else i)

    return rule


def lift_action(action: FiniteAction, l: int = 1) -> FiniteAction:
    """Acción inducida sobre random_extension(G, l); los SetTerm se mueven miembro a miembro."""
    return FiniteAction(action.group, random_extension(action.graph, l), action.rule)


# ---------------------------------------------------------------------------
# Puntos fijos
# ---------------------------------------------------------------------------

def orbit_decomposition(action: GroupAction, g: GroupElem, members: FrozenSet) -> Optional[List[FrozenSet]]:
    """
    Parte `members` en ⟨g⟩-órbitas finitas contenidas en él, o None si
    alguna órbita sale del conjunto.
    """
    remaining = set(members)
    orbits = []
    while remaining:
        start = min(remaining, key=term_key)
        orbit = [start]
        y = action.act(g, start)
        while y != start:
            if y not in members or len(orbit) > len(members):
                return None
            orbit.append(y)
            y = action.act(g, y)
        orbits.append(frozenset(orbit))
        remaining.difference_update(orbit)
    return orbits


def is_fixed(action: GroupAction, g: GroupElem, x) -> bool:
    if isinstance(x, SetTerm):
        return orbit_decomposition(action, g, x.members) is not None
    return action.act(g, x) == x


def fixed_vertices(g: GroupElem, action: GroupAction, window: Optional[Iterable] = None) -> List:
    """
    Vértices de la ventana fijados por g: los A que son unión de ⟨g⟩-órbitas
    finitas más Fix_G(g) sobre los vértices de la semilla.

    Sin ventana se usan todos los vértices de una acción finita, o los
    primeros RADO_WINDOW vértices de una acción sobre un backend infinito.
    """
    if window is None:
        if isinstance(action, FiniteAction):
            window = list(action.candidates())
        else:
            window = list(islice(action.candidates(), settings.RADO_WINDOW))
            logger.warning("⚠️ fixed_vertices sin ventana: se usan los primeros %d vértices", len(window))
    if g.is_identity:
        return list(window)
    return [x for x in window if is_fixed(action, g, x)]


# ---------------------------------------------------------------------------
# Acción base canónica
# ---------------------------------------------------------------------------

def canonical_base_action(
    group: GroupDescriptor,
    sigma: Optional[Sequence[GroupElem]] = None,
    l: Optional[int] = None,
) -> LeftMultiplicationAction:
    """
    Γ ↷ R inducida por la multiplicación a izquierda sobre Γ sin aristas,
    con parámetro l = |Σ|.

    Args:
        group: grupo infinito Γ
        sigma: subgrupo finito Σ como lista de elementos de Γ
        l: parámetro explícito (prevalece sobre |Σ|)

    Raises:
        FiniteGroupRejected si Γ es finito
    """
    if group.is_finite():
        raise FiniteGroupRejected(f"{group.name} es finito; la acción base necesita un grupo infinito")
    if l is None:
        l = len(set(sigma)) if sigma else 1
    backend = LimitBackend(group, l=l)
    logger.info("✓ Acción base de %s con l=%d", group.name, l)
    return LeftMultiplicationAction(group, backend)


def is_structural_limit_action(action) -> bool:
    return isinstance(action, (LeftMultiplicationAction, PermutationAction)) and isinstance(
        action.backend, LimitBackend
    )


def property_f_witness(action: GroupAction, S: Sequence[GroupElem], F: Iterable):
    """
    x = {y₁,…,yₙ} con yᵢ ∉ F distintos e yᵢ ≠ g_j y_j, completado hasta
    gcd(|x|, l) = 1. Entonces x ∉ F, x ≁ F y g_j x ≠ x.

    Raises:
        BudgetExhausted si no aparecen vértices movidos dentro del límite de escaneo
    """
    backend: LimitBackend = action.backend
    F = frozenset(F)
    for u in F:
        backend.validate(u)
    if not S:
        return backend.property_r_witness((), F)
    chosen: List = []
    images = set()
    fillers = backend._fillers(F)
    scanned = 0

    def next_filler():
        nonlocal scanned
        for y in fillers:
            scanned += 1
            if scanned > settings.RADO_SCAN_LIMIT:
                break
            yield y

    stream = next_filler()
    for g in S:
        picked = next((y for y in stream if _can_pick(action, g, y, chosen, images)), None)
        if picked is None:
            raise BudgetExhausted(f"Sin vértice movido por {g} dentro del límite de escaneo", scanned=scanned)
        chosen.append(picked)
        images.add(action.act(g, picked))
    while not backend.admissible(len(chosen)):
        pad = None
        for y in stream:
            if y not in chosen and y not in images:
                pad = y
                break
        if pad is None:
            raise BudgetExhausted("Sin vértices para completar el conjunto", scanned=scanned)
        chosen.append(pad)
    stage = 1 + max([v.stage for v in F] + [y.stage for y in chosen])
    witness = SetTerm(stage, chosen)
    backend.validate(witness)
    return witness


def _can_pick(action, g: GroupElem, y, chosen: List, images: set) -> bool:
    if y in chosen or y in images:
        return False
    gy = action.act(g, y)
    return gy != y and gy not in chosen

