"""
Suites de verificación: agrupan las invariantes de cada módulo en chequeos
con conteo de instancias, estado y testigos de los fallos.

Estados por chequeo: "passed", "failed" o "inconclusive" (presupuesto
agotado). El muestreo usa numpy.random.default_rng(seed), así que la misma
configuración y semilla producen el mismo informe byte a byte.
"""
import json
import logging
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Callable, Dict, List, Optional

import numpy as np

from ..algorithms.back_and_forth import EquivarianceContext, extend_to_automorphism, verify_window
from ..algorithms.backends import BitBackend, Delete, LimitBackend, Slice, verify_witness
from ..algorithms.density_steps import AmalgamSetup, HNNSetup
from ..algorithms.free_actions import FreeTupleSetup
from ..algorithms.limits import canonical_base_action, fixed_vertices, lift_action, permutation_rule, random_extension, seed_action
from ..algorithms.treezation import (
    Treezation,
    elementary_extension,
    extension_edge_failures,
    neumann_witness,
    schreier_window,
)
from ..algorithms.witnesses import find_separating_element, verify_highly_core_free
from ..exceptions import BudgetExhausted, LoopQuery, RadoError, UnknownSuite
from ..models.graph import FiniteGraph, PartialIso, validate_partial_iso
from ..models.groups import AmalgamGroup, CyclicGroup, FiniteTableGroup, GroupElem, HNNGroup, trivial_group
from ..models.terms import Base, SetTerm, format_vertex, term_key
from ..schemas import RunConfig
from .scheduler import equivariance_failures, replay_certificates, run_scheduler

logger = logging.getLogger(__name__)

SUITES = ("backends", "extension", "limits", "amalgam", "hnn", "free")


@dataclass
class CheckResult:
    name: str
    instances: int = 0
    failures: List[dict] = field(default_factory=list)
    inconclusive: Optional[str] = None

    @property
    def status(self) -> str:
        if self.failures:
            return "failed"
        if self.inconclusive is not None:
            return "inconclusive"
        return "passed"

    def fail(self, **witness) -> None:
        self.failures.append({k: str(v) for k, v in witness.items()})

    def to_dict(self) -> dict:
        data = {"name": self.name, "instances": self.instances, "status": self.status}
        if self.failures:
            data["failures"] = self.failures[:10]
            data["failure_count"] = len(self.failures)
        if self.inconclusive is not None:
            data["detail"] = self.inconclusive
        return data


@dataclass
class SuiteReport:
    suite: str
    seed: int
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def status(self) -> str:
        statuses = {c.status for c in self.checks}
        if "failed" in statuses:
            return "failed"
        if "inconclusive" in statuses:
            return "inconclusive"
        return "passed"

    @property
    def exit_code(self) -> int:
        return {"passed": 0, "failed": 1, "inconclusive": 3}[self.status]

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "status": self.status,
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False, indent=2)


def _guarded(name: str, body: Callable[[CheckResult], None]) -> CheckResult:
    check = CheckResult(name)
    try:
        body(check)
    except BudgetExhausted as exc:
        check.inconclusive = exc.detail
    except RadoError as exc:
        check.fail(error=exc.code, detail=exc.detail)
    return check


def _disjoint_pairs(window: List, rng=None, limit: Optional[int] = None):
    """
    Todos los pares (U, V) disjuntos de la ventana, o `limit` pares al azar
    si hay más de `limit`.
    """
    if limit is not None and rng is not None and 3 ** len(window) > limit:
        labelings = (tuple(row) for row in rng.integers(0, 3, size=(limit, len(window))))
    else:
        labelings = product(range(3), repeat=len(window))
    for labels in labelings:
        U = [v for v, t in zip(window, labels) if t == 1]
        V = [v for v, t in zip(window, labels) if t == 2]
        yield U, V


def _random_partial_iso(rng, backend, window: List, size: int, attempts: int = 200) -> Optional[PartialIso]:
    """Isomorfismo parcial al azar sobre la ventana, elegido par a par."""
    if size > len(window):
        return None
    for _ in range(attempts):
        pairs: Dict = {}
        for i in rng.permutation(len(window))[:size]:
            x = window[int(i)]
            used = set(pairs.values())
            options = [
                y for y in window
                if y not in used and all(backend.adjacent(x, a) == backend.adjacent(y, b) for a, b in pairs.items())
            ]
            if not options:
                break
            pairs[x] = options[int(rng.integers(len(options)))]
        else:
            return PartialIso(pairs)
    return None


def _random_equivariant_map(rng, action, s: GroupElem, window: List, orbits: int, attempts: int = 200):
    """φ al azar con φ(s·x) = s·φ(x), unión de `orbits` órbitas de ⟨s⟩ de orden 2."""
    if orbits > len(window):
        return None
    for _ in range(attempts):
        xs = rng.choice(len(window), size=orbits, replace=False)
        ys = rng.choice(len(window), size=orbits, replace=False)
        pairs: Dict = {}
        for i, j in zip(xs, ys):
            x, y = window[int(i)], window[int(j)]
            pairs[x] = y
            pairs[action.act(s, x)] = action.act(s, y)
        if len(pairs) != 2 * orbits or len(set(pairs.values())) != len(pairs):
            continue
        if validate_partial_iso(pairs, action.backend)[0]:
            return PartialIso(pairs)
    return None


# ---------------------------------------------------------------------------
# Grupos de referencia
# ---------------------------------------------------------------------------

def free_product_z_z() -> AmalgamGroup:
    za, zb = CyclicGroup("Za", letter="a"), CyclicGroup("Zb", letter="b")
    one = trivial_group()
    return AmalgamGroup("Z*Z", (za, zb), one, ([za.identity()], [zb.identity()]))


def free_product_z_z2() -> AmalgamGroup:
    z, z2 = CyclicGroup("Z", letter="a"), FiniteTableGroup.cyclic("Z2", 2, letter="c")
    one = trivial_group()
    return AmalgamGroup("Z*Z2", (z, z2), one, ([z.identity()], [z2.identity()]))


def modular_group() -> AmalgamGroup:
    """ℤ/2 ∗ ℤ/3 con letras s1 y r1, r2."""
    z2, z3 = FiniteTableGroup.cyclic("Z2", 2, letter="s"), FiniteTableGroup.cyclic("Z3", 3, letter="r")
    one = trivial_group()
    return AmalgamGroup("Z2*Z3", (z2, z3), one, ([z2.identity()], [z3.identity()]))


def hnn_over_modular() -> HNNGroup:
    """HNN(ℤ/2∗ℤ/3, Σ=ℤ/2, θ=id)."""
    base = modular_group()
    sigma = FiniteTableGroup.cyclic("S", 2, letter="x")
    s = base.embed(0, base.factors[0].element("s1"))
    images = [base.identity(), s]
    return HNNGroup("HNN(Z2*Z3)", base, sigma, embedding=images, theta=images)


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

def backends_suite(config: RunConfig, rng, backend=None) -> List[CheckResult]:
    bit = backend or BitBackend()
    n = config.budgets.backend_window
    window = bit.enumerate(n)

    def property_r(check: CheckResult, b, vertices):
        for U, V in _disjoint_pairs(vertices, rng, config.budgets.pair_samples):
            check.instances += 1
            z = b.property_r_witness(U, V)
            if not verify_witness(b, z, U, V):
                check.fail(U=[format_vertex(u) for u in U], V=[format_vertex(v) for v in V], witness=format_vertex(z))

    def symmetric(check: CheckResult):
        for x, y in combinations(bit.enumerate(config.budgets.window), 2):
            check.instances += 1
            if bit.adjacent(x, y) != bit.adjacent(y, x):
                check.fail(pair=f"{format_vertex(x)},{format_vertex(y)}")
        for x in window:
            check.instances += 1
            try:
                bit.adjacent(x, x)
                check.fail(loop=format_vertex(x))
            except LoopQuery:
                pass

    limit = LimitBackend(FiniteGraph.from_pairs([Base(0), Base(1), Base(2)], [(Base(0), Base(1))]))

    def prefix(check: CheckResult):
        for b in (bit, limit):
            for k in range(1, n + 1):
                check.instances += 1
                if b.enumerate(k) != b.enumerate(k + 1)[:k]:
                    check.fail(backend=b.spec, n=k)

    def derived(check: CheckResult):
        sliced = bit.derive(Slice(frozenset({0}), frozenset({1})))
        check.instances += 1
        first = sliced.enumerate(1)[0]
        if first != 5:
            check.fail(expected=5, got=format_vertex(first))
        deleted = bit.derive(Delete(frozenset()))
        check.instances += 1
        if deleted.enumerate(n) != window:
            check.fail(expected="prefijo idéntico", got=deleted.enumerate(n))
        property_r(check, sliced, sliced.enumerate(4))

    return [
        _guarded("property_r_bit", lambda c: property_r(c, bit, window)),
        _guarded("property_r_limit", lambda c: property_r(c, limit, limit.enumerate(n))),
        _guarded("adjacency_symmetric_irreflexive", symmetric),
        _guarded("enumeration_prefix", prefix),
        _guarded("derived_backends", derived),
    ]


def extension_suite(config: RunConfig, rng) -> List[CheckResult]:
    bit = BitBackend()
    budgets = config.budgets
    window = bit.enumerate(max(16, 2 * budgets.extension_domain))
    samples = max(1, budgets.steps)

    def back_and_forth(check: CheckResult):
        verified = bit.enumerate(budgets.extension_window)
        for _ in range(budgets.extension_samples):
            size = int(rng.integers(1, budgets.extension_domain + 1))
            phi = _random_partial_iso(rng, bit, window, size)
            if phi is None:
                continue
            check.instances += 1
            aut = extend_to_automorphism(phi, bit)
            report = verify_window(aut, verified)
            if not report.passed or any(aut.query(x) != y for x, y in phi.items()):
                check.fail(phi=phi, violations=report.violations[:3])

    def equivariant(check: CheckResult):
        group = modular_group()
        action = canonical_base_action(group, l=2)
        s = group.embed(0, group.factors[0].element("s1"))
        vertices = action.backend.enumerate(budgets.equivariant_window)
        pool = vertices[: min(len(vertices), 16)]
        for _ in range(budgets.equivariant_samples):
            phi = _random_equivariant_map(rng, action, s, pool, int(rng.integers(1, 3)))
            if phi is None:
                continue
            check.instances += 1
            aut = extend_to_automorphism(phi, action.backend, EquivarianceContext(action, [(s, s)]))
            report = verify_window(aut, vertices)
            if any(aut.query(x) != y for x, y in phi.items()):
                check.fail(phi=phi, reason="no reproduce φ")
            for x in vertices:
                if aut.query(action.act(s, x)) != action.act(s, aut.query(x)):
                    check.fail(phi=phi, vertex=format_vertex(x))
            for violation in report.violations[:3]:
                check.fail(**violation)

    def elementary(check: CheckResult):
        for _ in range(samples):
            gamma = _random_partial_iso(rng, bit, window[:8], int(rng.integers(1, 3)))
            if gamma is None:
                continue
            check.instances += 1
            F = gamma.domain | gamma.range
            extended = elementary_extension(gamma, [gamma], F, bit)
            K = set(F)
            new_u = [x for x in extended.domain if x not in K]
            new_y = [y for y in extended.range if y not in K]
            if not validate_partial_iso(extended, bit)[0] or not extended.extends(gamma):
                check.fail(gamma=gamma, reason="no valida o no extiende")
            elif any(u in K for u in new_u) or any(bit.adjacent(u, y) for u in new_u for y in new_y if u != y):
                check.fail(gamma=gamma, reason="disyunción")
            elif extension_edge_failures([gamma], gamma, extended, F, bit):
                check.fail(gamma=gamma, reason="arista nueva sin preimagen")

    return [
        _guarded("back_and_forth_bit", back_and_forth),
        _guarded("equivariant_extension", equivariant),
        _guarded("elementary_extension", elementary),
    ]


def limits_suite(config: RunConfig, rng) -> List[CheckResult]:

    def counts(check: CheckResult):
        for n, l, expected in ((2, 1, 5), (3, 2, 7)):
            check.instances += 1
            seed = FiniteGraph.from_pairs([Base(i) for i in range(n)], [])
            size = len(random_extension(seed, l))
            if size != expected:
                check.fail(seed=n, l=l, expected=expected, got=size)

    def fixed_points(check: CheckResult):
        from sympy.combinatorics import Permutation

        for n in range(1, 5):
            seed = FiniteGraph.from_pairs([Base(i) for i in range(n)], [])
            generators = [Permutation(list(range(1, n)) + [0])]
            if n > 1:
                generators.append(Permutation([1, 0] + list(range(2, n))))
            group = FiniteTableGroup.from_permutations(f"S{n}", generators)
            lifted = lift_action(seed_action(group, seed, permutation_rule(group)))
            window = [v for v in lifted.graph.vertices if isinstance(v, SetTerm)]
            for g in group.elements():
                check.instances += 1
                by_formula = set(fixed_vertices(g, lifted, window))
                by_scan = {x for x in window if lifted.act(g, x) == x}
                if by_formula != by_scan:
                    check.fail(seed=n, element=g, formula=len(by_formula), scan=len(by_scan))

    def base_action_freeness(check: CheckResult):
        group = modular_group()
        action = canonical_base_action(group, l=2)
        s = group.embed(0, group.factors[0].element("s1"))
        for x in action.backend.enumerate(config.budgets.window * 2):
            check.instances += 1
            sx = action.act(s, x)
            if sx == x or action.adjacent(sx, x):
                check.fail(vertex=format_vertex(x))

    def hcf_transfer(check: CheckResult):
        group = modular_group()
        action = canonical_base_action(group, l=2)
        sigma = [group.identity(), group.embed(0, group.factors[0].element("s1"))]
        window = action.backend.enumerate(config.budgets.window)
        for _ in range(max(1, config.budgets.steps)):
            picks = rng.choice(len(window), size=2, replace=False)
            F = [window[int(i)] for i in sorted(picks)]
            top = max(v.stage for v in F)
            lower = [v for v in F if v.stage < top or top == 0]
            reduced = set(lower)
            for v in F:
                if v.stage == top and top > 0:
                    reduced.update(v.members)
            check.instances += 1
            g = find_separating_element(action, reduced, reduced, sigma, budget=config.budgets.search)
            if not verify_highly_core_free(action, g, sigma, F):
                check.fail(F=[format_vertex(v) for v in F], element=g)

    return [
        _guarded("random_extension_counts", counts),
        _guarded("fixed_point_formula", fixed_points),
        _guarded("base_action_free_non_singular", base_action_freeness),
        _guarded("highly_core_free_transfer", hcf_transfer),
    ]


def _scheduler_checks(name: str, setup, config: RunConfig) -> List[CheckResult]:
    run = None

    def certificates(check: CheckResult):
        nonlocal run
        run = run_scheduler(
            setup,
            config.budgets.steps,
            config.strategy,
            budget=config.budgets.search,
            max_size=config.budgets.phi_size,
            window=config.budgets.window,
            rounds=config.budgets.rounds,
        )
        check.instances = len(run.certificates)
        if run.inconclusive:
            check.inconclusive = run.error["detail"]

    def replay(check: CheckResult):
        if run is None:
            return
        for result in replay_certificates(setup, run.certificates):
            check.instances += 1
            if not result.passed:
                check.fail(step=result.step, detail=result.detail)
        for vertex in equivariance_failures(setup):
            check.fail(equivariance=vertex)

    return [_guarded(f"{name}_certificates", certificates), _guarded(f"{name}_replay", replay)]


def amalgam_suite(config: RunConfig, rng) -> List[CheckResult]:
    checks = _scheduler_checks("free_product", AmalgamSetup(free_product_z_z()), config)
    checks.extend(_scheduler_checks("finite_factor", AmalgamSetup(free_product_z_z2()), config))
    return checks


def hnn_suite(config: RunConfig, rng) -> List[CheckResult]:
    return _scheduler_checks("hnn", HNNSetup(hnn_over_modular()), config)


def free_suite(config: RunConfig, rng) -> List[CheckResult]:
    backend = LimitBackend(FiniteGraph.from_pairs([Base(0), Base(1)], []))
    rounds = config.budgets.rounds

    def schreier(check: CheckResult):
        generic = FreeTupleSetup.generic(backend, 2, rounds)
        F = backend.enumerate(2)
        tree = Treezation(backend, generic.alphas, F, rounds)
        for center in sorted(tree.guarded, key=term_key)[:4]:
            check.instances += 1
            report = schreier_window(tree.maps, center, 3, tree.guarded)
            if not report.passed:
                check.fail(center=format_vertex(center), report=report.to_dict())

    def neumann(check: CheckResult):
        setup = FreeTupleSetup.generic(backend, 2, rounds)
        check.instances += 1
        u = neumann_witness(setup.alphas, setup.group, (), config.budgets.neumann)
        if u != setup.group.generator(0):
            check.fail(expected="a1", got=u)

    checks = [_guarded("schreier_forest", schreier), _guarded("neumann_empty", neumann)]
    checks.extend(_scheduler_checks("free", FreeTupleSetup.generic(backend, 2, rounds), config))
    return checks


SUITE_FUNCTIONS: Dict[str, Callable] = {
    "backends": backends_suite,
    "extension": extension_suite,
    "limits": limits_suite,
    "amalgam": amalgam_suite,
    "hnn": hnn_suite,
    "free": free_suite,
}


def run_suite(name: str, config: Optional[RunConfig] = None, backend=None) -> SuiteReport:
    """
    Ejecuta una suite con nombre (o "all") y devuelve su informe.

    Args:
        name: backends, extension, limits, amalgam, hnn, free o all
        config: configuración validada (por defecto la vacía)
        backend: backend alternativo para la suite de backends

    Raises:
        UnknownSuite si el nombre no existe
    """
    config = config or RunConfig()
    if name != "all" and name not in SUITE_FUNCTIONS:
        raise UnknownSuite(f"Suite desconocida: '{name}'", suite=name)
    names = SUITES if name == "all" else (name,)
    report = SuiteReport(name, config.seed)
    for suite in names:
        rng = np.random.default_rng(config.seed)
        logger.info("🔄 Suite %s", suite)
        if suite == "backends":
            checks = backends_suite(config, rng, backend)
        else:
            checks = SUITE_FUNCTIONS[suite](config, rng)
        for check in checks:
            check.name = f"{suite}.{check.name}" if name == "all" else check.name
            report.checks.append(check)
    level = logging.INFO if report.status == "passed" else logging.WARNING
    logger.log(level, "%s Suite %s: %s", "✓" if report.status == "passed" else "❌", name, report.status)
    return report
