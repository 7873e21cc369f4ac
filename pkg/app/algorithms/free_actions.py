"""
Acciones libres F_k ↷ R dadas por k-tuplas de automorfismos.

Un paso de homogeneidad reemplaza la tupla ᾱ por ω̄ que coincide con ᾱ en F
y devuelve una palabra w con ω(w)|d(φ) = φ; un paso de fidelidad devuelve
un vértice movido por ω(w).
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

from ..config import settings
from ..exceptions import (
    CertificateMismatch,
    DisconnectionFailure,
    ExhaustedBackend,
    InvalidInput,
    InvalidPartialIso,
    NotReduced,
)
from ..models.graph import PartialIso, validate_partial_iso
from ..models.groups import FreeGroup, GroupElem
from ..models.terms import format_vertex, term_key
from .back_and_forth import extend_to_automorphism
from .treezation import (
    Treezation,
    evaluate_word,
    neumann_witness,
    orbit_growth_failures,
    set_diameter,
    word_trajectory,
)

logger = logging.getLogger(__name__)


class FreeTupleSetup:
    """
    ᾱ = (α₁,…,α_k) sobre un backend común, con k ≥ 2.

    Args:
        backend: backend de los automorfismos
        alphas: objetos con query/query_inv/committed
        group: grupo libre de rango k (por defecto F{k} con letras a1…ak)
    """

    kind = "free"

    def __init__(self, backend, alphas: Sequence, group: Optional[FreeGroup] = None):
        if len(alphas) < 2:
            raise InvalidInput(f"Se necesitan al menos 2 automorfismos, hay {len(alphas)}")
        self.backend = backend
        self.alphas = list(alphas)
        self.k = len(self.alphas)
        self.group = group or FreeGroup(f"F{self.k}", [f"a{i + 1}" for i in range(self.k)])
        if self.group.rank != self.k:
            raise InvalidInput(f"El grupo {self.group.name} no tiene rango {self.k}")

    @classmethod
    def generic(cls, backend, k: int = 2, rounds: Optional[int] = None) -> "FreeTupleSetup":
        """k automorfismos con todas las órbitas infinitas (treezation de mapas vacíos)."""
        tree = Treezation.generic(backend, k, rounds)
        return cls(backend, tree.maps)

    def support(self) -> frozenset:
        touched = set()
        for alpha in self.alphas:
            touched |= alpha.domain | alpha.range
        return frozenset(touched)

    def evaluate(self, w: GroupElem, x):
        return evaluate_word(self.alphas, self.group, w, x)

    def orbit_report(self, window: Iterable, length: int) -> dict:
        failures = orbit_growth_failures(self.alphas, window, length)
        return {
            "length": length,
            "passed": not failures,
            "failures": [{"map": j + 1, "vertex": format_vertex(x)} for j, x in failures],
        }


@dataclass
class FreeStepOutcome:
    requirement: str
    word: GroupElem
    omegas: List = field(default_factory=list)
    phi: Optional[PartialIso] = None
    vertex: object = None
    image: object = None
    checks: List[str] = field(default_factory=list)
    details: Dict = field(default_factory=dict)

    @property
    def element(self) -> GroupElem:
        return self.word

    def to_dict(self) -> dict:
        data = {
            "requirement": self.requirement,
            "element": str(self.word),
            "checks": list(self.checks),
            "details": dict(self.details),
        }
        if self.phi is not None:
            data["phi"] = [[format_vertex(x), format_vertex(y)] for x, y in sorted(self.phi.items(), key=lambda p: term_key(p[0]))]
        if self.vertex is not None:
            data["vertex"] = format_vertex(self.vertex)
            data["image"] = format_vertex(self.image)
        return data


def _check_agreement(setup: FreeTupleSetup, omegas: Sequence, F: Iterable) -> List[str]:
    for x in sorted(F, key=term_key):
        for j, (omega, alpha) in enumerate(zip(omegas, setup.alphas)):
            if omega.query(x) != alpha.query(x) or omega.query_inv(x) != alpha.query_inv(x):
                raise CertificateMismatch(
                    f"ω{j + 1} no coincide con α{j + 1} en {format_vertex(x)}", vertex=format_vertex(x)
                )
    return [f"omega_j^(+-1) = alpha_j^(+-1) on F ({len(F)} vertices)"]


def _validated(setup: FreeTupleSetup, phi) -> PartialIso:
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


def free_homogeneity_step(
    setup: FreeTupleSetup,
    phi,
    F: Optional[Iterable] = None,
    budget: Optional[int] = None,
    rounds: Optional[int] = None,
) -> FreeStepOutcome:
    """
    Construye ω̄ y w con ω(w)|d(φ) = φ y ωⱼ^{±1} = αⱼ^{±1} en F.

    Se treeza ᾱ relativa a F, se toma un testigo de Neumann u y, con i el
    menor índice distinto de la primera letra de u e i′ ≠ i, se define τ
    igual a β_{i′} cerca de K y β(a_i^s u²)x ↦ β(a_i^{-s} u²)φ(x). Entonces
    ω_{i′} extiende τ y w = u⁻² a_i^s a_{i′} a_i^s u².

    Args:
        setup: tupla de automorfismos
        phi: isomorfismo parcial requerido
        F: conjunto a preservar; por defecto el soporte comprometido de ᾱ
        budget: palabras probadas para el testigo de Neumann
        rounds: rondas materializadas de la treezation

    Raises:
        InvalidPartialIso si φ o τ no validan
        BudgetExhausted si no aparece el testigo de Neumann
        DisconnectionFailure si los trozos de τ se cortan o son adyacentes
        CertificateMismatch si la re-verificación exacta falla
    """
    group, backend = setup.group, setup.backend
    phi = _validated(setup, phi)
    F = set(setup.support() if F is None else F) | phi.domain | phi.range
    if all(phi(x) == x for x in phi.domain):
        w = group.identity()
        checks = [f"omega({w})({format_vertex(x)}) = {format_vertex(x)}" for x in sorted(phi.domain, key=term_key)]
        return FreeStepOutcome("homogeneity", w, list(setup.alphas), phi=phi, checks=checks, details={"fast_path": True})

    tree = Treezation(backend, setup.alphas, F, rounds)
    beta = tree.maps
    u = neumann_witness(beta, group, tree.guarded, budget)
    first = group.letter_sequence(u)[0][0]
    i = min(j for j in range(setup.k) if j != first)
    i2 = min(j for j in range(setup.k) if j != i)
    square = u * u

    K = set()
    for x in sorted(tree.guarded, key=term_key):
        K.update(word_trajectory(beta, group, square, x))
    K_tilde = set(K)
    for p in sorted(K, key=term_key):
        for b in beta:
            K_tilde.add(b.query(p))
            K_tilde.add(b.query_inv(p))
    diameter, complete = set_diameter(beta, K_tilde)
    if not complete:
        logger.warning("⚠️ K̃ no es conexo en el grafo comprometido; se usa la mayor distancia finita (%d)", diameter)
    s = 10 * diameter + 1

    near: Dict = {}
    for p in sorted(K, key=term_key):
        near[p] = beta[i2].query(p)
        near[beta[i2].query_inv(p)] = p
    a_i = group.generator(i)
    push, pull = a_i ** s * square, a_i ** (-s) * square
    far = {evaluate_word(beta, group, push, x): evaluate_word(beta, group, pull, phi(x)) for x in sorted(phi.domain, key=term_key)}
    _check_disconnected(backend, set(near), set(far), "dominio")
    _check_disconnected(backend, set(near.values()), set(far.values()), "rango")
    tau = dict(near)
    tau.update(far)

    omegas = list(beta)
    omegas[i2] = extend_to_automorphism(tau, backend)
    w = square.inverse() * a_i ** s * group.generator(i2) * a_i ** s * square

    checks = []
    for x in sorted(phi.domain, key=term_key):
        image = evaluate_word(omegas, group, w, x)
        if image != phi(x):
            raise CertificateMismatch(
                f"ω({w}) no realiza φ en {format_vertex(x)}",
                vertex=format_vertex(x),
                expected=format_vertex(phi(x)),
                got=format_vertex(image),
            )
        checks.append(f"omega(w)({format_vertex(x)}) = {format_vertex(image)}")
    checks.extend(_check_agreement(setup, omegas, F))
    details = {
        "u": str(u),
        "i": i + 1,
        "i_prime": i2 + 1,
        "s": s,
        "diameter": diameter,
        "diameter_complete": complete,
        "guarded": len(tree.guarded),
        "K": len(K),
    }
    logger.info("✓ Homogeneidad libre: w de longitud %d (u = %s, s = %d)", group.word_length(w), u, s)
    return FreeStepOutcome("homogeneity", w, omegas, phi=phi, checks=checks, details=details)


def _check_disconnected(backend, near: set, far: set, side: str) -> None:
    shared = near & far
    if shared:
        raise DisconnectionFailure(
            f"Los trozos de τ comparten vértices en el {side}",
            vertex=format_vertex(min(shared, key=term_key)),
        )
    for a in sorted(far, key=term_key):
        for b in near:
            if backend.adjacent(a, b):
                raise DisconnectionFailure(
                    f"Los trozos de τ son adyacentes en el {side}",
                    pair=f"{format_vertex(a)},{format_vertex(b)}",
                )


def free_faithful_step(
    setup: FreeTupleSetup,
    w: GroupElem,
    F: Optional[Iterable] = None,
    rounds: Optional[int] = None,
) -> FreeStepOutcome:
    """
    Treeza ᾱ relativa a F y devuelve un vértice sin tocar x con ω(w)x ≠ x.

    Raises:
        NotReduced si w es la identidad
        ExhaustedBackend si no aparece un vértice sin tocar dentro del límite de escaneo
    """
    group = setup.group
    if w.group is not group:
        raise InvalidInput(f"{w!r} no pertenece a {group.name}")
    if w.is_identity:
        raise NotReduced("La palabra vacía no mueve ningún vértice")
    F = set(setup.support() if F is None else F)
    tree = Treezation(setup.backend, setup.alphas, F, rounds)
    x = None
    for scanned, v in enumerate(setup.backend.iter_vertices()):
        if scanned >= settings.RADO_SCAN_LIMIT:
            break
        if v not in tree.touched:
            x = v
            break
    if x is None:
        raise ExhaustedBackend("Sin vértices sin tocar dentro del límite de escaneo")
    image = evaluate_word(tree.maps, group, w, x)
    if image == x:
        raise CertificateMismatch(f"ω({w}) fija {format_vertex(x)}", vertex=format_vertex(x))
    checks = [f"omega({w})({format_vertex(x)}) = {format_vertex(image)} != {format_vertex(x)}"]
    checks.extend(_check_agreement(setup, tree.maps, F))
    logger.info("✓ Fidelidad libre: %s mueve %s", w, format_vertex(x))
    return FreeStepOutcome("faithfulness", w, list(tree.maps), vertex=x, image=image, checks=checks)
