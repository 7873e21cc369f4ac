"""
Scheduler de requisitos: encadena pasos de densidad sobre un mismo setup y
emite un certificado verificable por requisito.

Los requisitos de homogeneidad son isomorfismos parciales sobre ventanas
crecientes, ordenados por (índice máximo, tamaño, lex); los de fidelidad son
los elementos no triviales del grupo en el orden de enumeración. Cada paso
usa F = soporte comprometido, así que los certificados anteriores siguen
valiendo después de cada paso.
"""
import logging
from dataclasses import dataclass, field
from itertools import combinations, islice, permutations
from typing import Iterable, Iterator, List, Optional

from ..algorithms.density_steps import density_step_faithful, density_step_homogeneous
from ..algorithms.free_actions import free_faithful_step, free_homogeneity_step
from ..config import settings
from ..exceptions import BudgetExhausted, InvalidInput, RadoError
from ..models.graph import PartialIso, validate_partial_iso
from ..models.terms import format_vertex
from ..schemas import Certificate, ReplayResult

logger = logging.getLogger(__name__)

STRATEGIES = ("alternate", "homogeneity", "faithfulness")


def homogeneity_requirements(backend, max_size: int = 2, window: Optional[int] = None) -> Iterator[PartialIso]:
    """
    Isomorfismos parciales no idénticos sobre los primeros `window` vértices,
    por (índice máximo, tamaño, lex).
    """
    window = settings.RADO_WINDOW if window is None else window
    vertices: List = []
    for n, v in enumerate(islice(backend.iter_vertices(), window)):
        vertices.append(v)
        for size in range(1, max_size + 1):
            for dom in combinations(range(n + 1), size):
                for rng in permutations(range(n + 1), size):
                    if n not in dom and n not in rng:
                        continue
                    if dom == rng:
                        continue
                    pairs = {vertices[i]: vertices[j] for i, j in zip(dom, rng)}
                    ok, _ = validate_partial_iso(pairs, backend)
                    if ok:
                        yield PartialIso(pairs)


def faithfulness_requirements(group) -> Iterator:
    return (g for g in group.enumerate() if not g.is_identity)


@dataclass
class SchedulerRun:
    certificates: List[Certificate] = field(default_factory=list)
    status: str = "passed"
    error: Optional[dict] = None

    @property
    def inconclusive(self) -> bool:
        return self.status == "inconclusive"

    def to_dict(self) -> dict:
        data = {
            "status": self.status,
            "steps": len(self.certificates),
            "certificates": [c.model_dump() for c in self.certificates],
        }
        if self.error is not None:
            data["error"] = self.error
        return data


class RequirementScheduler:
    """
    Alterna requisitos de homogeneidad y fidelidad sobre un setup.

    Args:
        setup: AmalgamSetup, HNNSetup o FreeTupleSetup
        strategy: "alternate", "homogeneity" o "faithfulness"
        budget: presupuesto de las búsquedas de elementos
        max_size: tamaño máximo de d(φ)
        window: vértices considerados para los requisitos de homogeneidad
        rounds: rondas materializadas en las treezations (solo setups libres)
    """

    def __init__(
        self,
        setup,
        strategy: str = "alternate",
        budget: Optional[int] = None,
        max_size: int = 2,
        window: Optional[int] = None,
        rounds: Optional[int] = None,
    ):
        if strategy not in STRATEGIES:
            raise InvalidInput(f"Estrategia desconocida: '{strategy}'")
        self.setup = setup
        self.strategy = strategy
        self.budget = budget
        self.rounds = rounds
        self._phis = homogeneity_requirements(setup.backend, max_size, window)
        self._elements = faithfulness_requirements(setup.group)

    def _next_kind(self, step: int) -> str:
        if self.strategy == "alternate":
            return "homogeneity" if step % 2 == 0 else "faithfulness"
        return self.strategy

    def step(self, index: int) -> Certificate:
        kind = self._next_kind(index)
        setup = self.setup
        if kind == "homogeneity":
            phi = next(self._phis)
            if setup.kind == "free":
                outcome = free_homogeneity_step(setup, phi, budget=self.budget, rounds=self.rounds)
            else:
                outcome = density_step_homogeneous(setup, phi, F=setup.support(), budget=self.budget)
        else:
            g = next(self._elements)
            if setup.kind == "free":
                outcome = free_faithful_step(setup, g, rounds=self.rounds)
            else:
                outcome = density_step_faithful(setup, g, F=setup.support(), budget=self.budget)
        if setup.kind == "free":
            setup.alphas = list(outcome.omegas)
        data = outcome.to_dict()
        certificate = Certificate(
            step=index,
            setup=setup.kind,
            group=setup.group.name,
            requirement=data["requirement"],
            element=data["element"],
            phi=data.get("phi"),
            vertex=data.get("vertex"),
            image=data.get("image"),
            checks=data["checks"],
            support=len(setup.support()),
        )
        logger.info("✓ Paso %d (%s): %s", index, kind, certificate.element)
        return certificate

    def run(self, n_steps: int) -> SchedulerRun:
        result = SchedulerRun()
        for index in range(n_steps):
            logger.info("🔄 Paso %d de %d", index + 1, n_steps)
            try:
                result.certificates.append(self.step(index))
            except BudgetExhausted as exc:
                logger.warning("⚠️ Presupuesto agotado en el paso %d: %s", index, exc.detail)
                result.status = "inconclusive"
                result.error = exc.to_dict()
                break
        return result


def run_scheduler(
    setup,
    n_steps: Optional[int] = None,
    strategy: str = "alternate",
    budget: Optional[int] = None,
    max_size: int = 2,
    window: Optional[int] = None,
    rounds: Optional[int] = None,
) -> SchedulerRun:
    """
    Ejecuta n pasos y devuelve los certificados; el setup queda con las
    isometrías comprometidas (o la tupla ω̄ final en setups libres).

    Un presupuesto agotado corta la ejecución con estado "inconclusive" y
    los certificados emitidos hasta ese paso.
    """
    n_steps = settings.RADO_STEPS if n_steps is None else n_steps
    scheduler = RequirementScheduler(setup, strategy, budget, max_size, window, rounds)
    return scheduler.run(n_steps)


# ---------------------------------------------------------------------------
# Re-verificación
# ---------------------------------------------------------------------------

def _evaluator(setup):
    if setup.kind == "free":
        return setup.evaluate
    return setup.apply


def replay_certificate(setup, certificate: Certificate) -> ReplayResult:
    """Re-evalúa un certificado contra los compromisos actuales del setup."""
    apply = _evaluator(setup)
    parse = setup.backend.parse_vertex
    try:
        g = setup.group.parse_word(certificate.element)
        if certificate.requirement == "homogeneity":
            for x_text, y_text in certificate.phi or []:
                got = apply(g, parse(x_text))
                if got != parse(y_text):
                    return ReplayResult(
                        step=certificate.step,
                        passed=False,
                        detail=f"{certificate.element} envía {x_text} a {format_vertex(got)}, no a {y_text}",
                    )
            return ReplayResult(step=certificate.step, passed=True)
        x = parse(certificate.vertex)
        got = apply(g, x)
        if got == x:
            return ReplayResult(step=certificate.step, passed=False, detail=f"{certificate.element} fija {certificate.vertex}")
        if certificate.image is not None and format_vertex(got) != certificate.image:
            return ReplayResult(
                step=certificate.step,
                passed=False,
                detail=f"imagen {format_vertex(got)} distinta de {certificate.image}",
            )
        return ReplayResult(step=certificate.step, passed=True)
    except RadoError as exc:
        return ReplayResult(step=certificate.step, passed=False, detail=f"{exc.code}: {exc.detail}")


def replay_certificates(setup, certificates: Iterable[Certificate]) -> List[ReplayResult]:
    results = [replay_certificate(setup, c) for c in certificates]
    failed = [r for r in results if not r.passed]
    if failed:
        logger.warning("❌ %d certificados no se reproducen", len(failed))
    else:
        logger.info("✓ %d certificados reproducidos", len(results))
    return results


def equivariance_failures(setup) -> List[str]:
    """Pares comprometidos de α que rompen α∘π₁(σ) = π₂(σ)∘α (solo en puntos ya comprometidos)."""
    if setup.kind == "free":
        return []
    context, alpha = setup.context, setup.alpha
    failures = []
    for x, y in sorted(alpha.committed.items(), key=lambda p: setup.backend.sort_key(p[0])):
        for s1, s2 in context.pairs[1:]:
            image = alpha.peek(context.action.act(s1, x))
            if image is not None and image != context.action.act(s2, y):
                failures.append(format_vertex(x))
                break
    return failures
