"""
Pasos de densidad para amalgamas Γ₁ ∗_Σ Γ₂ y extensiones HNN.

Cada setup guarda la acción base Γ ↷ R y un automorfismo perezoso α que
conmuta con Σ. La acción torcida π_α se evalúa sobre la forma normal de g.
Un paso de homogeneidad compromete una isometría finita en α y devuelve g
con π_α(g)|d(φ) = φ; un paso de fidelidad devuelve x con π_α(g)x ≠ x. Todo
resultado se re-verifica por evaluación exacta antes de devolverse.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from ..exceptions import (
    CertificateMismatch,
    CommitConflict,
    FreenessViolated,
    IndexTooSmall,
    InvalidInput,
    InvalidPartialIso,
    NotReduced,
    SingularActionDetected,
)
from ..models.graph import PartialIso, validate_partial_iso
from ..models.groups import AmalgamGroup, GroupElem, HNNGroup
from ..models.terms import format_vertex, term_key
from .back_and_forth import EquivarianceContext, LazyAutomorphism
from .limits import canonical_base_action
from .witnesses import find_separating_element, property_f_search

logger = logging.getLogger(__name__)


@dataclass
class StepOutcome:
    """Resultado de un paso: el elemento o vértice producido y las igualdades comprobadas."""

    requirement: str
    element: GroupElem
    phi: Optional[PartialIso] = None
    vertex: object = None
    image: object = None
    new_pairs: int = 0
    checks: List[str] = field(default_factory=list)
    support: int = 0

    def to_dict(self) -> dict:
        data = {
            "requirement": self.requirement,
            "element": str(self.element),
            "new_pairs": self.new_pairs,
            "checks": list(self.checks),
            "support": self.support,
        }
        if self.phi is not None:
            data["phi"] = [[format_vertex(x), format_vertex(y)] for x, y in sorted(self.phi.items(), key=lambda p: term_key(p[0]))]
        if self.vertex is not None:
            data["vertex"] = format_vertex(self.vertex)
            data["image"] = format_vertex(self.image)
        return data


# ---------------------------------------------------------------------------
# Setups
# ---------------------------------------------------------------------------

class AmalgamSetup:
    """
    Γ = Γ₁ ∗_Σ Γ₂ actuando sobre R con la acción base canónica y α ∈ Z.

    Con Γ₂ finito el parámetro de la acción base es l = |Γ₂|, de modo que
    Γ₂ actúa libremente; en otro caso l = |Σ|.

    Args:
        group: descriptor de la amalgama (Γ₁ debe ser infinito)
        committed: pares iniciales de α (se asumen Σ-equivariantes)

    Raises:
        InvalidInput si Γ₁ es finito
    """

    kind = "amalgam"

    def __init__(self, group: AmalgamGroup, committed: Optional[Mapping] = None):
        if group.factors[0].is_finite():
            raise InvalidInput(f"El primer factor de {group.name} debe ser infinito")
        self.group = group
        self.finite_factor = group.factors[1].is_finite()
        l = group.factors[1].order() if self.finite_factor else group.sigma.order()
        self.base = canonical_base_action(group, l=l)
        self.backend = self.base.backend
        self.sigma: List[GroupElem] = group.sigma_elements()
        self.context = EquivarianceContext(self.base, [(s, s) for s in self.sigma])
        self.alpha = LazyAutomorphism(self.backend, committed, self.context)

    def factor_elements(self, i: int) -> Iterator[GroupElem]:
        factor = self.group.factors[i]
        return (self.group.embed(i, x) for x in factor.enumerate())

    def apply(self, g: GroupElem, x):
        return pi_alpha_apply(self, g, x)

    def support(self) -> frozenset:
        return self.alpha.domain | self.alpha.range


class HNNSetup:
    """
    Γ = HNN(H, Σ, θ) sobre R con α ∘ e(σ) = θ(σ) ∘ α en los pares comprometidos.
    """

    kind = "hnn"

    def __init__(self, group: HNNGroup, committed: Optional[Mapping] = None):
        self.group = group
        pairs = group.sigma_pairs()
        self.base = canonical_base_action(group, l=group.sigma.order())
        self.backend = self.base.backend
        self.sigma: List[GroupElem] = [s for s, _ in pairs]
        self.theta_sigma: List[GroupElem] = [s for _, s in pairs]
        self.context = EquivarianceContext(self.base, pairs)
        self.alpha = LazyAutomorphism(self.backend, committed, self.context)

    def base_elements(self) -> Iterator[GroupElem]:
        return (self.group.embed_base(h) for h in self.group.base.enumerate())

    def apply(self, g: GroupElem, x):
        return pi_alpha_apply(self, g, x)

    def support(self) -> frozenset:
        return self.alpha.domain | self.alpha.range


Setup = Union[AmalgamSetup, HNNSetup]


# ---------------------------------------------------------------------------
# π_α
# ---------------------------------------------------------------------------

def pi_alpha_apply(setup: Setup, g: GroupElem, x):
    """
    π_α(g)x evaluado de derecha a izquierda sobre la forma normal de g.

    Amalgama: las sílabas de Γ₁ actúan por la acción base y las de Γ₂ como
    α⁻¹(g·α(x)). HNN: los elementos de H actúan por la acción base y t^{±1}
    como α^{±1}. Puede disparar pasos perezosos de α.
    """
    group, base, alpha = setup.group, setup.base, setup.alpha
    base.validate(x)
    if setup.kind == "amalgam":
        for i, t in reversed(group.reduced_expression(g)):
            elem = group.embed(i, t)
            if i == 0:
                x = base.act(elem, x)
            else:
                x = alpha.query_inv(base.act(elem, alpha.query(x)))
        return x
    hs, eps = group.britton_expression(g)
    x = base.act(group.embed_base(hs[-1]), x)
    for k in reversed(range(len(eps))):
        x = alpha.query(x) if eps[k] == 1 else alpha.query_inv(x)
        x = base.act(group.embed_base(hs[k]), x)
    return x


# ---------------------------------------------------------------------------
# Auxiliares comunes
# ---------------------------------------------------------------------------

def _as_partial_iso(setup: Setup, phi) -> PartialIso:
    if not isinstance(phi, PartialIso):
        try:
            phi = PartialIso(phi)
        except Exception as exc:
            raise InvalidPartialIso(f"φ no es inyectivo: {exc}") from exc
    for x, y in phi.items():
        setup.backend.validate(x)
        setup.backend.validate(y)
    ok, violation = validate_partial_iso(phi, setup.backend)
    if not ok:
        raise InvalidPartialIso(
            f"φ no es un isomorfismo parcial ({violation.kind})",
            pair=",".join(format_vertex(v) for v in violation.pair),
        )
    return phi


def _absorb_support(setup: Setup, F: Optional[Iterable]) -> None:
    """
    Con F explícito exige F ⊇ d(α) y consulta α en los vértices nuevos de F.

    Raises:
        CommitConflict si F no contiene el dominio comprometido
    """
    if F is None:
        return
    F = frozenset(F)
    missing = setup.alpha.domain - F
    if missing:
        example = min(missing, key=term_key)
        raise CommitConflict(
            "F no contiene el dominio comprometido de α",
            vertex=format_vertex(example),
            missing=len(missing),
        )
    for x in sorted(F - setup.alpha.domain, key=term_key):
        setup.alpha.query(x)


def _verify_homogeneity(setup: Setup, g: GroupElem, phi: PartialIso) -> List[str]:
    checks = []
    for x in sorted(phi.domain, key=term_key):
        image = pi_alpha_apply(setup, g, x)
        if image != phi(x):
            raise CertificateMismatch(
                f"π_α({g}) no realiza φ en {format_vertex(x)}",
                vertex=format_vertex(x),
                expected=format_vertex(phi(x)),
                got=format_vertex(image),
            )
        checks.append(f"pi({g})({format_vertex(x)}) = {format_vertex(image)}")
    return checks


def _verify_moved(setup: Setup, g: GroupElem, x) -> Tuple[object, List[str]]:
    image = pi_alpha_apply(setup, g, x)
    if image == x:
        raise CertificateMismatch(f"π_α({g}) fija {format_vertex(x)}", vertex=format_vertex(x))
    return image, [f"pi({g})({format_vertex(x)}) = {format_vertex(image)} != {format_vertex(x)}"]


def _identity_outcome(setup: Setup, phi: PartialIso) -> StepOutcome:
    g = setup.group.identity()
    checks = _verify_homogeneity(setup, g, phi)
    return StepOutcome("homogeneity", g, phi=phi, checks=checks, support=len(setup.alpha))


# ---------------------------------------------------------------------------
# Homogeneidad
# ---------------------------------------------------------------------------

def density_step_homogeneous(
    setup: Setup,
    phi,
    F: Optional[Iterable] = None,
    budget: Optional[int] = None,
) -> StepOutcome:
    """
    Compromete en α una isometría finita Σ-equivariante y devuelve g con
    π_α(g)|d(φ) = φ.

    Args:
        setup: AmalgamSetup o HNNSetup
        phi: isomorfismo parcial requerido
        F: soporte a preservar; por defecto el dominio comprometido de α
        budget: presupuesto de las búsquedas de elementos separadores

    Returns:
        StepOutcome con el elemento g y las igualdades verificadas

    Raises:
        InvalidPartialIso si φ no valida
        CommitConflict si F no contiene el dominio comprometido
        BudgetExhausted si no aparece un elemento separador
    """
    phi = _as_partial_iso(setup, phi)
    _absorb_support(setup, F)
    if setup.kind == "hnn":
        return _hnn_homogeneous(setup, phi, budget)
    if setup.finite_factor:
        return _finite_factor_step(setup, phi, budget)
    if all(phi(x) == x for x in phi.domain):
        return _identity_outcome(setup, phi)

    group, base, alpha, sigma = setup.group, setup.base, setup.alpha, setup.sigma
    before = len(alpha)
    dom = sorted(phi.domain, key=term_key)
    rng = [phi(x) for x in dom]

    g1 = find_separating_element(base, dom, alpha.domain, sigma, setup.factor_elements(0), budget)
    moved = [alpha.query(base.act(g1, x)) for x in dom]
    c = find_separating_element(base, rng, alpha.domain, sigma, setup.factor_elements(0), budget)
    committed_range = alpha.range
    h = find_separating_element(base, committed_range, committed_range, sigma, setup.factor_elements(1), budget)

    pairs: Dict = {}
    for y, a in zip(rng, moved):
        cy = base.act(c, y)
        ha = base.act(h, a)
        for s in sigma:
            pairs[base.act(s, cy)] = base.act(s, ha)
    alpha.commit(pairs)

    g = c.inverse() * h * g1
    checks = _verify_homogeneity(setup, g, phi)
    logger.info("✓ Homogeneidad en %s: g = %s (%d sílabas)", group.name, g, group.syllable_length(g))
    return StepOutcome("homogeneity", g, phi=phi, new_pairs=len(alpha) - before, checks=checks, support=len(alpha))


def density_step_homogeneous_finite_factor(
    setup: AmalgamSetup,
    phi,
    F: Optional[Iterable] = None,
    budget: Optional[int] = None,
) -> StepOutcome:
    """
    Variante con Γ₂ finito: los vértices z₁,…,zₙ se construyen con testigos de
    la propiedad (R) fuera de Γ₂α(F) y de las Γ₂-órbitas previas, y h es el
    primer elemento de Γ₂ fuera de Σ.

    Raises:
        IndexTooSmall si [Γ₂:Σ] < 2
        FreenessViolated o SingularActionDetected si falla una cláusula de los zᵢ
        BudgetExhausted si no aparece un elemento separador
    """
    group, base, alpha, sigma = setup.group, setup.base, setup.alpha, setup.sigma
    if not group.factors[1].is_finite():
        raise InvalidInput(f"El segundo factor de {group.name} no es finito")
    if group.factors[1].order() // group.sigma.order() < 2:
        raise IndexTooSmall(f"[Γ₂:Σ] < 2 en {group.name}", index=group.factors[1].order() // group.sigma.order())
    phi = _as_partial_iso(setup, phi)
    _absorb_support(setup, F)
    return _finite_factor_step(setup, phi, budget)


def _finite_factor_step(setup: AmalgamSetup, phi: PartialIso, budget: Optional[int]) -> StepOutcome:
    group, base, alpha, sigma = setup.group, setup.base, setup.alpha, setup.sigma
    if all(phi(x) == x for x in phi.domain):
        return _identity_outcome(setup, phi)

    before = len(alpha)
    dom = sorted(phi.domain, key=term_key)
    rng = [phi(x) for x in dom]
    finite_part = [group.embed(1, x) for x in group.factors[1].elements()]
    finite_part.sort(key=lambda e: e.sort_key())
    sigma_set = set(sigma)

    g1 = find_separating_element(base, dom, alpha.domain, sigma, setup.factor_elements(0), budget)
    pushed = {base.act(s, base.act(g1, x)) for s in sigma for x in dom}
    c = find_separating_element(base, rng, alpha.domain | pushed, sigma, setup.factor_elements(0), budget)

    committed_range = alpha.range
    shifted_range = {base.act(e, u) for e in finite_part for u in committed_range}
    zs = _finite_factor_vertices(setup, dom, finite_part, shifted_range)
    h = next(e for e in finite_part if e not in sigma_set)

    pairs: Dict = {}
    for x, y, z in zip(dom, rng, zs):
        for s in sigma:
            pairs[base.act(s, base.act(g1, x))] = base.act(s, z)
            pairs[base.act(s, base.act(c, y))] = base.act(s, base.act(h, z))
    alpha.commit(pairs)

    g = c.inverse() * h * g1
    checks = _verify_homogeneity(setup, g, phi)
    logger.info("✓ Homogeneidad (Γ₂ finito) en %s: g = %s", group.name, g)
    return StepOutcome("homogeneity", g, phi=phi, new_pairs=len(alpha) - before, checks=checks, support=len(alpha))


def _finite_factor_vertices(setup: AmalgamSetup, dom: Sequence, finite_part: Sequence[GroupElem], shifted_range: set) -> List:
    base, backend = setup.base, setup.backend
    zs: List = []
    covered = set(shifted_range)
    for l, x in enumerate(dom):
        U = [zs[i] for i in range(l) if base.adjacent(dom[i], x)]
        V = {zs[i] for i in range(l) if not base.adjacent(dom[i], x)}
        V |= {base.act(e, z) for z in zs for e in finite_part if not e.is_identity}
        V |= shifted_range
        z = backend.property_r_witness(U, V, exclude=covered)
        zs.append(z)
        covered |= {base.act(e, z) for e in finite_part}
    _check_finite_factor_clauses(setup, dom, zs, finite_part, shifted_range)
    return zs


def _check_finite_factor_clauses(setup: AmalgamSetup, dom: Sequence, zs: Sequence, finite_part, shifted_range: set) -> None:
    base = setup.base
    orbits = []
    for x, z in zip(dom, zs):
        if z in shifted_range:
            raise FreenessViolated(f"{format_vertex(z)} cae en Γ₂α(F)", vertex=format_vertex(z))
        if any(base.adjacent(z, u) for u in shifted_range):
            raise SingularActionDetected(f"{format_vertex(z)} es adyacente a Γ₂α(F)", vertex=format_vertex(z))
        orbit = [base.act(e, z) for e in finite_part]
        if len(set(orbit)) != len(orbit):
            raise FreenessViolated(f"Γ₂ no actúa libremente en {format_vertex(z)}", vertex=format_vertex(z))
        orbits.append(set(orbit))
    for i in range(len(zs)):
        for j in range(i + 1, len(zs)):
            if orbits[i] & orbits[j]:
                raise FreenessViolated("Dos Γ₂-órbitas de los zᵢ se cortan", vertex=format_vertex(zs[i]))
    for i, zi in enumerate(zs):
        for j, zj in enumerate(zs):
            if base.adjacent(zi, zj) != base.adjacent(dom[i], dom[j]):
                raise SingularActionDetected(
                    "Los zᵢ no copian la adyacencia de d(φ)", pair=f"{format_vertex(zi)},{format_vertex(zj)}"
                )
            for e in finite_part:
                if not e.is_identity and base.adjacent(base.act(e, zi), zj):
                    raise SingularActionDetected(
                        f"{e}·z ∼ z′ en la construcción", pair=f"{format_vertex(zi)},{format_vertex(zj)}"
                    )


def _hnn_homogeneous(setup: HNNSetup, phi: PartialIso, budget: Optional[int]) -> StepOutcome:
    group, base, alpha = setup.group, setup.base, setup.alpha
    if all(phi(x) == x for x in phi.domain):
        return _identity_outcome(setup, phi)
    before = len(alpha)
    dom = sorted(phi.domain, key=term_key)
    rng = [phi(x) for x in dom]

    g1 = find_separating_element(base, dom, alpha.domain, setup.sigma, setup.base_elements(), budget)
    c = find_separating_element(base, rng, alpha.range, setup.theta_sigma, setup.base_elements(), budget)

    pairs: Dict = {}
    for x, y in zip(dom, rng):
        gx = base.act(g1, x)
        cy = base.act(c, y)
        for s, ts in setup.context.pairs:
            pairs[base.act(s, gx)] = base.act(ts, cy)
    alpha.commit(pairs)

    g = c.inverse() * group.stable(1) * g1
    checks = _verify_homogeneity(setup, g, phi)
    logger.info("✓ Homogeneidad HNN en %s: g = %s", group.name, g)
    return StepOutcome("homogeneity", g, phi=phi, new_pairs=len(alpha) - before, checks=checks, support=len(alpha))


# ---------------------------------------------------------------------------
# Fidelidad
# ---------------------------------------------------------------------------

def density_step_faithful(
    setup: Setup,
    g: GroupElem,
    F: Optional[Iterable] = None,
    budget: Optional[int] = None,
) -> StepOutcome:
    """
    Devuelve x con π_α(g)x ≠ x, comprometiendo en α la identidad (amalgama)
    o t (HNN) sobre las trayectorias de x.

    Raises:
        NotReduced si g es la identidad
        CommitConflict si F no contiene el dominio comprometido
        BudgetExhausted si la búsqueda de la propiedad (F) se agota
    """
    if g.group is not setup.group:
        raise InvalidInput(f"{g!r} no pertenece a {setup.group.name}")
    if g.is_identity:
        raise NotReduced("La identidad no se puede separar")
    _absorb_support(setup, F)
    if setup.kind == "hnn":
        return _hnn_faithful(setup, g, budget)
    return _amalgam_faithful(setup, g, budget)


def _amalgam_faithful(setup: AmalgamSetup, g: GroupElem, budget: Optional[int]) -> StepOutcome:
    group, base, alpha, sigma = setup.group, setup.base, setup.alpha, setup.sigma
    before = len(alpha)
    support = alpha.domain | alpha.range
    expr = group.reduced_expression(g)

    if len(expr) == 1:
        i, t = expr[0]
        z = property_f_search(base, [group.embed(i, t)], support, budget)
        x = z if i == 0 else alpha.query_inv(z)
    else:
        prefixes = [group.identity()]
        for i, t in reversed(expr):
            prefixes.append(group.embed(i, t) * prefixes[-1])
        guarded = set(support)
        for p in prefixes[1:]:
            inv = p.inverse()
            guarded |= {base.act(inv, u) for u in support}
        S = {s * p for p in prefixes for s in sigma}
        for l in range(1, len(prefixes)):
            for k in range(l + 1, len(prefixes)):
                S |= {prefixes[l].inverse() * s * prefixes[k] for s in sigma}
        S = sorted((e for e in S if not e.is_identity), key=lambda e: e.sort_key())
        x = property_f_search(base, S, guarded, budget)
        trajectory = {base.act(s * p, x) for p in prefixes for s in sigma}
        alpha.commit({y: y for y in trajectory})

    image, checks = _verify_moved(setup, g, x)
    logger.info("✓ Fidelidad en %s: %s mueve %s", group.name, g, format_vertex(x))
    return StepOutcome(
        "faithfulness", g, vertex=x, image=image, new_pairs=len(alpha) - before, checks=checks, support=len(alpha)
    )


def _hnn_faithful(setup: HNNSetup, g: GroupElem, budget: Optional[int]) -> StepOutcome:
    group, base, alpha = setup.group, setup.base, setup.alpha
    before = len(alpha)
    support = alpha.domain | alpha.range

    if group.t_length(g) == 0:
        x = property_f_search(base, [g], support, budget)
        image, checks = _verify_moved(setup, g, x)
        return StepOutcome("faithfulness", g, vertex=x, image=image, checks=checks, support=len(alpha))

    hs, eps = group.britton_expression(g)
    t = group.stable(1)
    t_inv = t.inverse()
    prefix = group.embed_base(hs[-1])
    pieces: List[Tuple[List[GroupElem], List[GroupElem]]] = []
    for k in reversed(range(len(eps))):
        if eps[k] == 1:
            domain_side = [s * prefix for s in setup.sigma]
            range_side = [ts * t * prefix for ts in setup.theta_sigma]
            prefix = t * prefix
        else:
            domain_side = [s * t_inv * prefix for s in setup.sigma]
            range_side = [ts * prefix for ts in setup.theta_sigma]
            prefix = t_inv * prefix
        pieces.append((domain_side, range_side))
        prefix = group.embed_base(hs[k]) * prefix

    G = [e for d, _ in pieces for e in d]
    G_tilde = [e for _, r in pieces for e in r]
    S = {a.inverse() * b for a in G for b in G} | {a.inverse() * b for a in G_tilde for b in G_tilde} | {g}
    S = sorted((e for e in S if not e.is_identity), key=lambda e: e.sort_key())
    guarded = set(support)
    for e in set(G) | set(G_tilde):
        inv = e.inverse()
        guarded |= {base.act(inv, u) for u in support}
    x = property_f_search(base, S, guarded, budget)

    pairs: Dict = {}
    for domain_side, range_side in pieces:
        for a, b in zip(domain_side, range_side):
            pairs[base.act(a, x)] = base.act(b, x)
    alpha.commit(pairs)

    image, checks = _verify_moved(setup, g, x)
    logger.info("✓ Fidelidad HNN en %s: %s mueve %s", group.name, g, format_vertex(x))
    return StepOutcome(
        "faithfulness", g, vertex=x, image=image, new_pairs=len(alpha) - before, checks=checks, support=len(alpha)
    )
