"""
Búsquedas acotadas de testigos para las propiedades de una acción Γ ↷ G.

Cada búsqueda recorre los elementos del grupo (o los vértices) en orden
canónico y se detiene al agotar el presupuesto. Agotar el presupuesto es un
resultado inconcluso (BudgetExhausted), nunca una negación.
"""
import logging
from dataclasses import dataclass, field
from itertools import islice
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from ..config import settings
from ..exceptions import BudgetExhausted, InvalidInput
from ..models.graph import PartialIso, validate_partial_iso
from ..models.groups import GroupElem
from ..models.terms import format_vertex, term_key
from .limits import is_structural_limit_action, property_f_witness

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Disconnect:
    F: FrozenSet


@dataclass(frozen=True)
class HighlyCoreFree:
    sigma: Tuple[GroupElem, ...]
    F: FrozenSet


@dataclass(frozen=True)
class PropertyF:
    S: Tuple[GroupElem, ...]
    F: FrozenSet


@dataclass(frozen=True)
class Homogeneity:
    phi: PartialIso


@dataclass(frozen=True)
class Singularity:
    window: Tuple


WitnessKind = Union[Disconnect, HighlyCoreFree, PropertyF, Homogeneity, Singularity]


@dataclass
class SingularityReport:
    """Resultado de buscar (u, g) con gu ∼ u en una ventana."""

    found: bool
    vertex: object = None
    element: Optional[GroupElem] = None
    exhaustive: bool = False

    def to_dict(self) -> dict:
        data = {"found": self.found, "exhaustive": self.exhaustive}
        if self.found:
            data["vertex"] = format_vertex(self.vertex)
            data["element"] = str(self.element)
        return data


def _budget(budget: Optional[int]) -> int:
    return settings.RADO_DEFAULT_BUDGET if budget is None else budget


def _sorted(vertices: Iterable) -> List:
    return sorted(vertices, key=term_key)


# ---------------------------------------------------------------------------
# Separación (cláusulas de "highly core-free")
# ---------------------------------------------------------------------------

def separates(action, g: GroupElem, moving: Iterable, avoid: Iterable, sigma: Sequence[GroupElem]) -> bool:
    """
    Comprueba las cuatro cláusulas de separación para g:

    (i) gA ∩ ΣB = ∅, (ii) ga ≁ b, (iii) σga ≁ ga′ para σ ≠ 1 y
    (iv) Σga ∩ Σga′ = ∅ para a ≠ a′, con A = moving y B = avoid.
    """
    moving = _sorted(set(moving))
    avoid = _sorted(set(avoid))
    nontrivial = [s for s in sigma if not s.is_identity]
    every_sigma = [action.group.identity()] + nontrivial

    images = [action.act(g, a) for a in moving]
    shifted_avoid = {action.act(s, b) for s in every_sigma for b in avoid}
    if any(y in shifted_avoid for y in images):
        return False
    if any(action.adjacent(y, b) for y in images for b in avoid):
        return False
    orbits = [frozenset(action.act(s, y) for s in every_sigma) for y in images]
    for i in range(len(orbits)):
        for j in range(i + 1, len(orbits)):
            if orbits[i] & orbits[j]:
                return False
    for s in nontrivial:
        for y in images:
            sy = action.act(s, y)
            if any(action.adjacent(sy, z) for z in images):
                return False
    return True


def find_separating_element(
    action,
    moving: Iterable,
    avoid: Iterable,
    sigma: Sequence[GroupElem] = (),
    candidates: Optional[Iterable[GroupElem]] = None,
    budget: Optional[int] = None,
) -> GroupElem:
    """
    Menor g (en el orden de `candidates`) que separa `moving` de `avoid`.

    Args:
        action: acción con act/adjacent/group
        moving: conjunto A que g desplaza
        avoid: conjunto B del que hay que alejarse
        sigma: subgrupo finito Σ (lista de elementos de Γ)
        candidates: elementos a probar (por defecto la enumeración del grupo)
        budget: número máximo de elementos probados

    Raises:
        BudgetExhausted si ningún candidato dentro del presupuesto sirve
    """
    budget = _budget(budget)
    moving, avoid = frozenset(moving), frozenset(avoid)
    pool = action.group.enumerate() if candidates is None else iter(candidates)
    tried = 0
    for g in islice(pool, budget):
        tried += 1
        if separates(action, g, moving, avoid, sigma):
            logger.info("✓ Elemento separador %s tras %d candidatos", g, tried)
            return g
    logger.warning("⚠️ Sin elemento separador en %d candidatos", tried)
    raise BudgetExhausted(
        f"Ningún elemento separa {len(moving)} vértices dentro del presupuesto",
        budget=budget,
        tried=tried,
    )


# ---------------------------------------------------------------------------
# Búsqueda por tipo de testigo
# ---------------------------------------------------------------------------

def witness_search(action, kind: WitnessKind, budget: Optional[int] = None):
    """
    Busca un testigo del tipo pedido.

    Returns:
        GroupElem para Disconnect, HighlyCoreFree y Homogeneity; un vértice
        para PropertyF; un SingularityReport para Singularity.

    Raises:
        BudgetExhausted si no hay testigo dentro del presupuesto
    """
    if isinstance(kind, Disconnect):
        return find_separating_element(action, kind.F, kind.F, (), budget=budget)
    if isinstance(kind, HighlyCoreFree):
        return find_separating_element(action, kind.F, kind.F, kind.sigma, budget=budget)
    if isinstance(kind, PropertyF):
        return property_f_search(action, kind.S, kind.F, budget)
    if isinstance(kind, Homogeneity):
        return homogeneity_search(action, kind.phi, budget)
    if isinstance(kind, Singularity):
        return singularity_search(action, kind.window, budget)
    raise InvalidInput(f"Tipo de testigo desconocido: {kind!r}")


def homogeneity_search(action, phi: PartialIso, budget: Optional[int] = None) -> GroupElem:
    budget = _budget(budget)
    domain = _sorted(phi.domain)
    for g in action.group.enumerate(budget):
        if all(action.act(g, u) == phi(u) for u in domain):
            return g
    raise BudgetExhausted("Ningún elemento realiza φ dentro del presupuesto", budget=budget)


def singularity_search(action, window: Iterable, budget: Optional[int] = None) -> SingularityReport:
    """Busca u en la ventana y g con gu ∼ u. `exhaustive` indica que se recorrió todo Γ."""
    budget = _budget(budget)
    elements = list(action.group.enumerate(budget + 1))
    exhaustive = len(elements) <= budget
    elements = elements[:budget]
    for u in window:
        for g in elements:
            if g.is_identity:
                continue
            if action.adjacent(action.act(g, u), u):
                logger.info("⚠️ Acción singular: %s ∼ %s·%s", format_vertex(u), g, format_vertex(u))
                return SingularityReport(True, u, g, exhaustive)
    return SingularityReport(False, exhaustive=exhaustive)


def property_f_search(action, S: Sequence[GroupElem], F: Iterable, budget: Optional[int] = None):
    """
    Vértice x ∉ F, no adyacente a F, movido por todos los elementos de S.

    En acciones estructurales sobre límites se usa la construcción de
    conjuntos; en el resto se recorren los vértices en orden canónico.
    """
    S = tuple(S)
    F = frozenset(F)
    if any(g.is_identity for g in S):
        raise InvalidInput("S no puede contener la identidad")
    if is_structural_limit_action(action):
        return property_f_witness(action, S, F)
    scanned = 0
    limit = settings.RADO_SCAN_LIMIT if budget is None else budget
    for x in action.candidates():
        scanned += 1
        if scanned > limit:
            break
        if x in F or any(action.adjacent(x, u) for u in F):
            continue
        if all(action.act(g, x) != x for g in S):
            return x
    raise BudgetExhausted("Sin vértice con la propiedad (F) dentro del presupuesto", scanned=scanned)


# ---------------------------------------------------------------------------
# Re-verificación independiente
# ---------------------------------------------------------------------------

def verify_disconnect(action, g: GroupElem, F: Iterable) -> bool:
    F = set(F)
    images = {action.act(g, u) for u in F}
    if images & F:
        return False
    return not any(action.adjacent(y, v) for y in images for v in F)


def verify_highly_core_free(action, g: GroupElem, sigma: Sequence[GroupElem], F: Iterable) -> bool:
    F = list(F)
    sigma = list(sigma)
    every_sigma = sigma if any(s.is_identity for s in sigma) else [action.group.identity()] + sigma
    gF = {u: action.act(g, u) for u in F}
    sigma_f = {action.act(s, v) for s in every_sigma for v in F}
    if set(gF.values()) & sigma_f:
        return False
    for u in F:
        for v in F:
            if action.adjacent(gF[u], v):
                return False
            if u != v:
                orbit_u = {action.act(s, gF[u]) for s in every_sigma}
                orbit_v = {action.act(s, gF[v]) for s in every_sigma}
                if orbit_u & orbit_v:
                    return False
            for s in every_sigma:
                if not s.is_identity and action.adjacent(action.act(s, gF[u]), gF[v]):
                    return False
    return True


def verify_property_f(action, x, S: Sequence[GroupElem], F: Iterable) -> bool:
    F = set(F)
    if x in F or any(action.adjacent(x, u) for u in F):
        return False
    return all(action.act(g, x) != x for g in S)


def verify_homogeneity(action, g: GroupElem, phi: PartialIso) -> bool:
    return all(action.act(g, u) == y for u, y in phi.items())


def verify_singularity(action, u, g: GroupElem) -> bool:
    return action.adjacent(action.act(g, u), u)


# ---------------------------------------------------------------------------
# Chequeos de ventana
# ---------------------------------------------------------------------------

def strongly_faithful_window(
    action, elements: Iterable[GroupElem], window: Sequence, m: int
) -> Dict[str, Optional[List]]:
    """
    Para cada g, los primeros m vértices de la ventana movidos por g, o None
    (inconcluso) si la ventana no contiene m vértices movidos.
    """
    report = {}
    for g in elements:
        moved = [x for x in window if action.act(g, x) != x][:m]
        report[str(g)] = moved if len(moved) >= m else None
    return report


@dataclass
class HomogeneousDisconnectReport:
    F: List
    phi: PartialIso
    status: str
    element: Optional[GroupElem] = None
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "F": [format_vertex(v) for v in self.F],
            "phi": {format_vertex(x): format_vertex(y) for x, y in self.phi.items()},
            "status": self.status,
            "element": None if self.element is None else str(self.element),
            "notes": list(self.notes),
        }


def disjoint_copy(backend, F: Sequence) -> PartialIso:
    """
    Copia v₁…vₙ de F = (u₁…uₙ) con uᵢ∼uⱼ ⇔ vᵢ∼vⱼ y uᵢ≁vⱼ, tomando
    v₁ ∈ R_{∅,F} y v_{l+1} ∈ R_{U, V⊔F}.
    """
    F = list(F)
    copies: List = []
    for l, u in enumerate(F):
        U = [copies[i] for i in range(l) if backend.adjacent(F[i], u)]
        V = [copies[i] for i in range(l) if not backend.adjacent(F[i], u)]
        copies.append(backend.property_r_witness(U, set(V) | set(F)))
    return PartialIso(dict(zip(F, copies)))


def homogeneous_disconnect_check(
    action,
    F: Sequence,
    budget: Optional[int] = None,
    solver: Optional[Callable[[PartialIso], GroupElem]] = None,
) -> HomogeneousDisconnectReport:
    """
    Construye la copia disjunta de F, busca un g que la realice y comprueba
    que ese g desconecta F.

    Args:
        solver: busca g con g|d(φ) = φ; por defecto una búsqueda acotada
    """
    backend = getattr(action, "backend", None)
    if backend is None:
        raise InvalidInput("La acción no tiene backend para construir la copia de F")
    F = _sorted(set(F))
    phi = disjoint_copy(backend, F)
    ok, violation = validate_partial_iso(phi, backend)
    if not ok:
        return HomogeneousDisconnectReport(F, phi, "failed", notes=[f"copia inválida: {violation.kind}"])
    try:
        g = solver(phi) if solver is not None else homogeneity_search(action, phi, budget)
    except BudgetExhausted as exc:
        return HomogeneousDisconnectReport(F, phi, "vacuous", notes=[exc.detail])
    if not verify_homogeneity(action, g, phi):
        return HomogeneousDisconnectReport(F, phi, "failed", g, ["g no realiza φ"])
    status = "verified" if verify_disconnect(action, g, F) else "failed"
    return HomogeneousDisconnectReport(F, phi, status, g)
