"""
Extensión de isomorfismos parciales a automorfismos perezosos (back-and-forth),
en versión simple y Σ-equivariante.

Un LazyAutomorphism guarda la parte comprometida (solo crece) y completa bajo
demanda: cada consulta fuera del dominio ejecuta un paso "forth" con el
testigo canónico de la propiedad (R); las consultas inversas, un paso "back".
"""
import logging
import threading
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from ..exceptions import (
    CommitConflict,
    EquivarianceViolated,
    FreenessViolated,
    InvalidPartialIso,
    SingularActionDetected,
)
from ..models.graph import PartialIso, Violation, validate_partial_iso
from ..models.groups import GroupElem
from ..models.terms import format_vertex, term_key

logger = logging.getLogger(__name__)


class EquivarianceContext:
    """
    Dos acciones libres y no singulares de un grupo finito Σ sobre el mismo
    backend, dadas como pares (π₁(σ), π₂(σ)) de elementos de la acción.
    El primer par es la identidad.
    """

    def __init__(self, action, pairs: Sequence[Tuple[GroupElem, GroupElem]]):
        self.action = action
        pairs = list(pairs)
        identity = action.group.identity()
        pairs = [p for p in pairs if not (p[0].is_identity and p[1].is_identity)]
        self.pairs: List[Tuple[GroupElem, GroupElem]] = [(identity, identity)] + pairs

    @property
    def order(self) -> int:
        return len(self.pairs)

    def orbit1(self, x) -> List:
        return [self.action.act(s1, x) for s1, _ in self.pairs]

    def orbit2(self, y) -> List:
        return [self.action.act(s2, y) for _, s2 in self.pairs]

    def check_orbit(self, orbit: List, side: str) -> None:
        """
        Raises:
            FreenessViolated si la órbita tiene repetidos
            SingularActionDetected si hay aristas dentro de la órbita
        """
        if len(set(orbit)) != len(orbit):
            raise FreenessViolated(
                f"La acción π{side} no es libre en {format_vertex(orbit[0])}", vertex=format_vertex(orbit[0])
            )
        for i in range(len(orbit)):
            for j in range(i + 1, len(orbit)):
                if self.action.adjacent(orbit[i], orbit[j]):
                    raise SingularActionDetected(
                        f"La acción π{side} es singular en {format_vertex(orbit[0])}",
                        pair=f"{format_vertex(orbit[i])},{format_vertex(orbit[j])}",
                    )


class LazyAutomorphism:
    """
    Automorfismo del backend definido perezosamente a partir de φ.

    Args:
        backend: backend con adjacent/property_r_witness/iter_vertices
        committed: pares ya comprometidos (se asumen validados)
        context: contexto de equivariancia opcional
    """

    def __init__(self, backend, committed: Optional[Mapping] = None, context: Optional[EquivarianceContext] = None):
        self.backend = backend
        self.context = context
        self._forward: Dict = dict(committed or {})
        self._backward: Dict = {y: x for x, y in self._forward.items()}
        self._lock = threading.RLock()
        self._forth_cursor = backend.iter_vertices()
        self._back_cursor = backend.iter_vertices()
        self._next_is_forth = True
        self.steps = 0

    # --- inspección ---
    @property
    def committed(self) -> PartialIso:
        with self._lock:
            return PartialIso(self._forward)

    @property
    def domain(self) -> frozenset:
        return frozenset(self._forward)

    @property
    def range(self) -> frozenset:
        return frozenset(self._backward)

    def peek(self, x):
        return self._forward.get(x)

    def peek_inv(self, y):
        return self._backward.get(y)

    def __len__(self) -> int:
        return len(self._forward)

    # --- consultas ---
    def query(self, x):
        """Imagen de x; si no está comprometida, ejecuta un paso forth."""
        with self._lock:
            if x in self._forward:
                return self._forward[x]
            self.backend.validate(x)
            self._forth(x)
            return self._forward[x]

    def query_inv(self, y):
        """Preimagen de y; si no está comprometida, ejecuta un paso back."""
        with self._lock:
            if y in self._backward:
                return self._backward[y]
            self.backend.validate(y)
            self._back(y)
            return self._backward[y]

    def __call__(self, x):
        return self.query(x)

    def advance(self, n: int = 1) -> None:
        """n pasos forzados alternando forth y back sobre el orden de enumeración."""
        with self._lock:
            for _ in range(n):
                if self._next_is_forth:
                    x = next(v for v in self._forth_cursor if v not in self._forward)
                    self._forth(x)
                else:
                    y = next(v for v in self._back_cursor if v not in self._backward)
                    self._back(y)
                self._next_is_forth = not self._next_is_forth

    # --- pasos ---
    def _forth(self, x) -> None:
        U = [a for a in self._forward if self.backend.adjacent(a, x)]
        V = [a for a in self._forward if a != x and a not in U]
        y = self.backend.property_r_witness([self._forward[a] for a in U], [self._forward[a] for a in V])
        self._commit_orbit_pair(x, y)
        self.steps += 1

    def _back(self, y) -> None:
        U = [b for b in self._backward if self.backend.adjacent(b, y)]
        V = [b for b in self._backward if b != y and b not in U]
        x = self.backend.property_r_witness([self._backward[b] for b in U], [self._backward[b] for b in V])
        self._commit_orbit_pair(x, y)
        self.steps += 1

    def _commit_orbit_pair(self, x, y) -> None:
        if self.context is None:
            self._forward[x] = y
            self._backward[y] = x
            return
        xs = self.context.orbit1(x)
        ys = self.context.orbit2(y)
        self.context.check_orbit(xs, "1")
        self.context.check_orbit(ys, "2")
        for a, b in zip(xs, ys):
            if a in self._forward or b in self._backward:
                raise FreenessViolated(
                    f"Las órbitas de {format_vertex(x)} y {format_vertex(y)} cortan la parte comprometida"
                )
        for a, b in zip(xs, ys):
            self._forward[a] = b
            self._backward[b] = a

    def commit(self, pairs: Mapping) -> None:
        """
        Añade una isometría finita explícita a la parte comprometida.

        Raises:
            CommitConflict si contradice pares ya comprometidos
            InvalidPartialIso si la unión deja de ser isomorfismo parcial
            EquivarianceViolated si (con contexto) la unión no es equivariante
        """
        with self._lock:
            fresh = {}
            images = {}
            for x, y in pairs.items():
                old = self._forward.get(x)
                if old is not None and old != y:
                    raise CommitConflict(
                        f"{format_vertex(x)} ya está comprometido a {format_vertex(old)}",
                        vertex=format_vertex(x),
                    )
                pre = self._backward.get(y)
                if pre is not None and pre != x:
                    raise CommitConflict(
                        f"{format_vertex(y)} ya es imagen de {format_vertex(pre)}",
                        vertex=format_vertex(y),
                    )
                if old is None:
                    if y in images and images[y] != x:
                        raise InvalidPartialIso(f"Dos vértices van a {format_vertex(y)}")
                    fresh[x] = y
                    images[y] = x
            if not fresh:
                return
            violation = _incremental_violation(self.backend, self._forward, fresh)
            if violation is not None:
                raise InvalidPartialIso(
                    f"El compromiso rompe la adyacencia en {violation.pair}",
                    **{"pair": ",".join(format_vertex(v) for v in violation.pair)},
                )
            if self.context is not None:
                merged = dict(self._forward)
                merged.update(fresh)
                for x, y in fresh.items():
                    for s1, s2 in self.context.pairs[1:]:
                        sx = self.context.action.act(s1, x)
                        if merged.get(sx) != self.context.action.act(s2, y):
                            raise EquivarianceViolated(
                                f"El compromiso no es equivariante en {format_vertex(x)} para {s1}",
                                vertex=format_vertex(x),
                            )
            self._forward.update(fresh)
            for x, y in fresh.items():
                self._backward[y] = x
            logger.info("📝 Comprometidos %d pares nuevos (total %d)", len(fresh), len(self._forward))


def _incremental_violation(backend, committed: Mapping, fresh: Mapping) -> Optional[Violation]:
    items_new = sorted(fresh.items(), key=lambda p: term_key(p[0]))
    for x, y in items_new:
        for a, b in committed.items():
            if backend.adjacent(x, a) != backend.adjacent(y, b):
                return Violation("adjacency", (x, a), (y, b))
    for i, (x1, y1) in enumerate(items_new):
        for x2, y2 in items_new[i + 1:]:
            if backend.adjacent(x1, x2) != backend.adjacent(y1, y2):
                return Violation("adjacency", (x1, x2), (y1, y2))
    return None


def check_equivariant_map(phi: PartialIso, context: EquivarianceContext) -> None:
    """
    Comprueba π₁(Σ)d(φ) = d(φ), π₂(Σ)r(φ) = r(φ), φπ₁(σ) = π₂(σ)φ y la
    libertad y no singularidad de ambas acciones sobre las órbitas tocadas.
    """
    done = set()
    for x in sorted(phi.domain, key=term_key):
        if x in done:
            continue
        xs = context.orbit1(x)
        ys = context.orbit2(phi(x))
        context.check_orbit(xs, "1")
        context.check_orbit(ys, "2")
        for a, b in zip(xs, ys):
            if a not in phi or phi(a) != b:
                raise EquivarianceViolated(
                    f"φ no conmuta con Σ en {format_vertex(x)}", vertex=format_vertex(x)
                )
        done.update(xs)


def extend_to_automorphism(phi, backend, context: Optional[EquivarianceContext] = None) -> LazyAutomorphism:
    """
    Extiende φ a un automorfismo perezoso del backend.

    Raises:
        InvalidPartialIso si φ no es un isomorfismo parcial
        EquivarianceViolated, FreenessViolated, SingularActionDetected (con contexto)
    """
    if not isinstance(phi, PartialIso):
        try:
            phi = PartialIso(phi)
        except Exception as exc:
            raise InvalidPartialIso(f"φ no es inyectivo: {exc}") from exc
    for x, y in phi.items():
        backend.validate(x)
        backend.validate(y)
    ok, violation = validate_partial_iso(phi, backend)
    if not ok:
        raise InvalidPartialIso(
            f"φ no es un isomorfismo parcial ({violation.kind})",
            pair=",".join(format_vertex(v) for v in violation.pair),
        )
    if context is not None:
        check_equivariant_map(phi, context)
    return LazyAutomorphism(backend, phi.as_dict(), context)


@dataclass
class WindowReport:
    answered: Dict = field(default_factory=dict)
    violations: List[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "answered": len(self.answered),
            "violations": list(self.violations),
        }


def verify_window(aut: LazyAutomorphism, window: Iterable) -> WindowReport:
    """
    Fuerza consultas sobre la ventana y comprueba biyectividad, adyacencia en
    ambos sentidos y (con contexto) equivariancia. También revisa la tabla
    comprometida completa.
    """
    report = WindowReport()
    window = list(window)
    for x in window:
        report.answered[x] = aut.query(x)
    table = dict(aut._forward)
    seen = {}
    for x, y in table.items():
        if y in seen:
            report.violations.append(Violation("injectivity", (seen[y], x), (y, y)).to_dict())
        seen[y] = x
    for x, y in table.items():
        if aut._backward.get(y) != x:
            report.violations.append(Violation("inverse", (x, x), (y, aut._backward.get(y, y))).to_dict())
    ok, violation = validate_partial_iso(table, aut.backend)
    if not ok and violation.kind == "adjacency":
        report.violations.append(violation.to_dict())
    if aut.context is not None:
        ctx = aut.context
        for x in window:
            y = report.answered[x]
            for s1, s2 in ctx.pairs[1:]:
                left = aut.query(ctx.action.act(s1, x))
                right = ctx.action.act(s2, y)
                if left != right:
                    report.violations.append(Violation("equivariance", (x, ctx.action.act(s1, x)), (y, left)).to_dict())
    if report.violations:
        logger.warning("❌ verify_window: %d violaciones", len(report.violations))
    return report
