"""
Carga de configuraciones de ejecución: parseo JSON, validación con los
esquemas pydantic y construcción de grupos, backends y setups.
"""
import json
import logging
import os
from typing import Dict, Optional, Union

from pydantic import ValidationError
from sympy.combinatorics import Permutation

from ..algorithms.backends import Backend, BitBackend, LimitBackend
from ..algorithms.density_steps import AmalgamSetup, HNNSetup
from ..algorithms.free_actions import FreeTupleSetup
from ..algorithms.graph_of_groups import (
    AmalgamData,
    GogEdge,
    GraphOfGroups,
    HNNData,
    decompose_graph_of_groups,
)
from ..exceptions import ConfigParseError, ConfigValidationError, RadoError
from ..models.graph import FiniteGraph
from ..models.groups import (
    AmalgamGroup,
    CyclicGroup,
    FiniteTableGroup,
    FreeGroup,
    GroupDescriptor,
    HNNGroup,
)
from ..models.terms import Base
from ..schemas import (
    AmalgamDecl,
    BackendDecl,
    CyclicDecl,
    FreeDecl,
    GogDecl,
    HNNDecl,
    PermutationsDecl,
    RunConfig,
    TableDecl,
)

logger = logging.getLogger(__name__)

Registry = Dict[str, Union[GroupDescriptor, GraphOfGroups]]


def parse_config(text: str) -> RunConfig:
    """
    Parsea y valida un documento de configuración.

    Raises:
        ConfigParseError con línea y columna si el JSON es inválido
        ConfigValidationError con la ruta de cada campo inválido
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"JSON inválido: {exc.msg}", line=exc.lineno, column=exc.colno) from exc
    return validate_config(data)


def validate_config(data) -> RunConfig:
    """
    Valida un documento ya parseado.

    Raises:
        ConfigValidationError con la ruta de cada campo inválido
    """
    try:
        config = RunConfig.model_validate(data)
    except ValidationError as exc:
        fields = [".".join(str(p) for p in err["loc"]) or "config" for err in exc.errors()]
        messages = "; ".join(f"{f}: {err['msg']}" for f, err in zip(fields, exc.errors()))
        raise ConfigValidationError(f"Configuración inválida ({messages})", fields=fields) from exc
    logger.info("✓ Configuración válida: %d grupos", len(config.groups))
    return config


def load_config(path: str) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


# ---------------------------------------------------------------------------
# Grupos
# ---------------------------------------------------------------------------

def build_groups(config: RunConfig) -> Registry:
    """
    Construye los grupos declarados en orden.

    Raises:
        ConfigValidationError si una tabla, palabra o encaje no es válido
    """
    registry: Registry = {}
    for index, decl in enumerate(config.groups):
        try:
            registry[decl.name] = _build_group(decl, registry)
        except RadoError as exc:
            raise ConfigValidationError(
                f"Grupo '{decl.name}' inválido: {exc.detail}", fields=[f"groups.{index}"]
            ) from exc
    return registry


def _group(registry: Registry, name: str) -> GroupDescriptor:
    group = registry[name]
    if isinstance(group, GraphOfGroups):
        raise ConfigValidationError(f"'{name}' es un grafo de grupos, no un grupo", fields=[name])
    return group


def _build_group(decl, registry: Registry):
    if isinstance(decl, CyclicDecl):
        return CyclicGroup(decl.name, order=decl.order, letter=decl.letter)
    if isinstance(decl, FreeDecl):
        return FreeGroup(decl.name, decl.letters)
    if isinstance(decl, TableDecl):
        index = {n: i for i, n in enumerate(decl.elements)}
        try:
            table = [[index[n] for n in row] for row in decl.table]
        except KeyError as exc:
            raise ConfigValidationError(f"Elemento desconocido en la tabla: {exc}", fields=["table"]) from None
        return FiniteTableGroup(decl.name, decl.elements, table)
    if isinstance(decl, PermutationsDecl):
        generators = [Permutation(cycles) for cycles in decl.generators]
        return FiniteTableGroup.from_permutations(decl.name, generators, decl.prefix)
    if isinstance(decl, AmalgamDecl):
        factors = tuple(_group(registry, n) for n in decl.factors)
        sigma = _group(registry, decl.sigma)
        embeddings = tuple(
            [factor.parse_word(w) for w in words] for factor, words in zip(factors, decl.embeddings)
        )
        return AmalgamGroup(decl.name, factors, sigma, embeddings)
    if isinstance(decl, HNNDecl):
        base = _group(registry, decl.base)
        sigma = _group(registry, decl.sigma)
        return HNNGroup(
            decl.name,
            base,
            sigma,
            embedding=[base.parse_word(w) for w in decl.embedding],
            theta=[base.parse_word(w) for w in decl.theta],
            stable_letter=decl.stable_letter,
        )
    return build_graph_of_groups(decl, registry)


def build_graph_of_groups(decl: GogDecl, registry: Registry) -> GraphOfGroups:
    vertex_groups = {p: _group(registry, g) for p, g in decl.vertices.items()}
    edges = []
    for e in decl.edges:
        if e.source not in vertex_groups or e.target not in vertex_groups:
            raise ConfigValidationError(f"La arista '{e.name}' usa un vértice desconocido", fields=[f"edges.{e.name}"])
        source, target = vertex_groups[e.source], vertex_groups[e.target]
        edges.append(
            GogEdge(
                name=e.name,
                source=e.source,
                target=e.target,
                sigma=_group(registry, e.sigma),
                s_images=tuple(source.parse_word(w) for w in e.s),
                r_images=tuple(target.parse_word(w) for w in e.r),
                hcf_source=e.hcf[0],
                hcf_target=e.hcf[1],
            )
        )
    return GraphOfGroups(vertex_groups, edges, decl.tree)


# ---------------------------------------------------------------------------
# Backends
# ---------------------------------------------------------------------------

def load_seed(path: str) -> FiniteGraph:
    """
    Lee una semilla `{"vertices": n, "edges": [[i, j], ...]}` con vértices b0…b(n-1).

    Raises:
        ConfigParseError si el archivo no es JSON
        ConfigValidationError si el contenido no describe un grafo
    """
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"Semilla inválida: {exc.msg}", line=exc.lineno, column=exc.colno) from exc
    n = data.get("vertices") if isinstance(data, dict) else None
    if not isinstance(n, int) or n < 1:
        raise ConfigValidationError("La semilla necesita 'vertices' ≥ 1", fields=["vertices"])
    edges = data.get("edges", [])
    if any(not isinstance(p, list) or len(p) != 2 for p in edges):
        raise ConfigValidationError("Cada arista de la semilla es un par [i, j]", fields=["edges"])
    vertices = [Base(i) for i in range(n)]
    for i, j in edges:
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise ConfigValidationError(f"Arista inválida en la semilla: [{i}, {j}]", fields=["edges"])
    return FiniteGraph.from_pairs(vertices, [(vertices[i], vertices[j]) for i, j in edges])


def backend_from_spec(spec: Union[str, BackendDecl], registry: Optional[Registry] = None) -> Backend:
    """
    Backend a partir de `bit`, `limit:<semilla>:<l>` o una declaración
    `{"kind": "limit", "group": ..., "l": ...}`.

    Raises:
        ConfigValidationError si la especificación no es válida
    """
    registry = registry or {}
    if isinstance(spec, str):
        if spec == "bit":
            return BitBackend()
        if spec.startswith("limit:"):
            path, sep, l_text = spec[len("limit:"):].rpartition(":")
            if not sep or not l_text.isdigit() or int(l_text) < 1:
                raise ConfigValidationError(f"Backend inválido: '{spec}' (se espera limit:<semilla>:<l>)", fields=["backend"])
            return LimitBackend(load_seed(path), l=int(l_text), seed_path=path)
        raise ConfigValidationError(f"Backend desconocido: '{spec}'", fields=["backend"])
    if spec.kind == "bit":
        return BitBackend()
    if spec.group is not None:
        if spec.group not in registry:
            raise ConfigValidationError(f"Grupo no declarado: '{spec.group}'", fields=["backend.group"])
        return LimitBackend(_group(registry, spec.group), l=spec.l)
    if spec.seed is None or not os.path.exists(spec.seed):
        raise ConfigValidationError("Un backend límite necesita 'group' o un 'seed' existente", fields=["backend.seed"])
    return LimitBackend(load_seed(spec.seed), l=spec.l, seed_path=spec.seed)


# ---------------------------------------------------------------------------
# Setups
# ---------------------------------------------------------------------------

def build_setup(config: RunConfig, registry: Optional[Registry] = None):
    """
    AmalgamSetup, HNNSetup o FreeTupleSetup según `config.setup`. Un grafo de
    grupos se descompone por la arista indicada.

    Raises:
        ConfigValidationError si falta el setup o no encaja con el grupo
    """
    if config.setup is None:
        raise ConfigValidationError("La configuración no declara un setup", fields=["setup"])
    registry = build_groups(config) if registry is None else registry
    setup = config.setup
    if setup.kind == "free":
        backend = backend_from_spec(config.backend, registry)
        return FreeTupleSetup.generic(backend, setup.k, config.budgets.rounds)
    group = registry[setup.group]
    if isinstance(group, GraphOfGroups):
        data = decompose_graph_of_groups(group, setup.edge)
        expected = AmalgamData if setup.kind == "amalgam" else HNNData
        if not isinstance(data, expected):
            raise ConfigValidationError(
                f"La arista '{setup.edge}' da un caso {data.kind}, no {setup.kind}", fields=["setup.edge"]
            )
        group = data.group()
    if setup.kind == "amalgam":
        return AmalgamSetup(group)
    return HNNSetup(group)
