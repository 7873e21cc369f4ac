"""
Grafos de grupos: datos, descomposición por una arista y grupo fundamental.

Las aristas se guardan una vez por par {e, ē}; la arista e va de `source` a
`target` con s_e: Σ_e → Γ_source y r_e: Σ_e → Γ_target, y la relación del
grupo fundamental es e·r_e(σ)·e⁻¹ = s_e(σ). Las aristas del árbol maximal se
convierten en amalgamas y las demás en letras estables HNN.
"""
import logging
import re
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx
from networkx.utils import UnionFind

from ..exceptions import EmptyGraph, InvalidEdge
from ..models.groups import AmalgamGroup, Embedding, GroupDescriptor, GroupElem, HNNGroup

logger = logging.getLogger(__name__)

EDGE_NAME = re.compile(r"^[A-Za-z]\w*$")


@dataclass(frozen=True)
class GogEdge:
    """
    Arista e: source → target con grupo de arista finito Σ_e.

    `s_images` y `r_images` siguen el orden de `sigma.elements()`.
    """

    name: str
    source: str
    target: str
    sigma: GroupDescriptor
    s_images: Tuple[GroupElem, ...]
    r_images: Tuple[GroupElem, ...]
    hcf_source: bool = False
    hcf_target: bool = False

    @property
    def is_loop(self) -> bool:
        return self.source == self.target


class GraphOfGroups:
    """
    Grafo de grupos finito y conexo con árbol maximal.

    Args:
        vertex_groups: nombre de vértice → grupo Γ_p
        edges: aristas (una por par {e, ē})
        tree: nombres de las aristas del árbol maximal; por defecto se
            elige el primero en el orden de las aristas (Kruskal sin pesos)

    Raises:
        EmptyGraph si no hay vértices
        InvalidEdge si una arista es inválida o el árbol no es maximal
    """

    def __init__(
        self,
        vertex_groups: Mapping[str, GroupDescriptor],
        edges: Sequence[GogEdge] = (),
        tree: Optional[Sequence[str]] = None,
    ):
        if not vertex_groups:
            raise EmptyGraph("El grafo de grupos no tiene vértices")
        self.vertex_groups: Dict[str, GroupDescriptor] = dict(vertex_groups)
        self.edges: List[GogEdge] = list(edges)
        self._by_name: Dict[str, GogEdge] = {}
        for edge in self.edges:
            self._validate_edge(edge)
            self._by_name[edge.name] = edge
        self.graph = nx.MultiGraph()
        self.graph.add_nodes_from(self.vertex_groups)
        for edge in self.edges:
            self.graph.add_edge(edge.source, edge.target, key=edge.name)
        if not nx.is_connected(self.graph):
            raise InvalidEdge("El grafo subyacente no es conexo")
        self.tree: Tuple[str, ...] = self._spanning_tree(tree)

    def _validate_edge(self, edge: GogEdge) -> None:
        if not EDGE_NAME.match(edge.name):
            raise InvalidEdge(f"Nombre de arista inválido: '{edge.name}'", edge=edge.name)
        if edge.name in self._by_name:
            raise InvalidEdge(f"Arista duplicada: '{edge.name}'", edge=edge.name)
        for endpoint in (edge.source, edge.target):
            if endpoint not in self.vertex_groups:
                raise InvalidEdge(f"La arista '{edge.name}' usa un vértice desconocido: '{endpoint}'", edge=edge.name)
        if not edge.sigma.is_finite():
            raise InvalidEdge(f"El grupo de la arista '{edge.name}' debe ser finito", edge=edge.name)
        for endpoint, images in ((edge.source, edge.s_images), (edge.target, edge.r_images)):
            group = self.vertex_groups[endpoint]
            if any(img.group is not group for img in images):
                raise InvalidEdge(
                    f"Las imágenes de '{edge.name}' no pertenecen a {group.name}", edge=edge.name
                )
            Embedding(edge.sigma, group, list(images))

    def _spanning_tree(self, tree: Optional[Sequence[str]]) -> Tuple[str, ...]:
        if tree is None:
            components = UnionFind(self.vertex_groups)
            chosen = []
            for edge in self.edges:
                if components[edge.source] != components[edge.target]:
                    components.union(edge.source, edge.target)
                    chosen.append(edge.name)
            return tuple(chosen)
        unknown = [name for name in tree if name not in self._by_name]
        if unknown:
            raise InvalidEdge(f"Aristas del árbol desconocidas: {unknown}", edge=unknown[0])
        subgraph = nx.MultiGraph()
        subgraph.add_nodes_from(self.vertex_groups)
        for name in tree:
            edge = self._by_name[name]
            subgraph.add_edge(edge.source, edge.target, key=name)
        if not nx.is_tree(subgraph):
            raise InvalidEdge("Las aristas indicadas no forman un árbol maximal")
        return tuple(tree)

    def edge(self, name: str) -> GogEdge:
        try:
            return self._by_name[name]
        except KeyError:
            raise InvalidEdge(f"Arista desconocida: '{name}'", edge=name) from None

    def restrict(self, vertices) -> "GraphOfGroups":
        """Subgrafo de grupos inducido; conserva las aristas del árbol si siguen formando uno."""
        vertices = set(vertices)
        groups = {p: g for p, g in self.vertex_groups.items() if p in vertices}
        edges = [e for e in self.edges if e.source in vertices and e.target in vertices]
        names = {e.name for e in edges}
        tree = [name for name in self.tree if name in names]
        if len(tree) != len(groups) - 1:
            tree = None
        return GraphOfGroups(groups, edges, tree)

    def without_edge(self, name: str) -> Tuple["GraphOfGroups", ...]:
        """Componentes (como grafos de grupos) tras quitar e y ē."""
        removed = self.edge(name)
        remainder = nx.MultiGraph(self.graph)
        remainder.remove_edge(removed.source, removed.target, key=name)
        parts = []
        for component in nx.connected_components(remainder):
            groups = {p: g for p, g in self.vertex_groups.items() if p in component}
            edges = [e for e in self.edges if e.name != name and e.source in component]
            kept = {e.name for e in edges}
            tree = [t for t in self.tree if t in kept]
            parts.append(GraphOfGroups(groups, edges, tree if len(tree) == len(groups) - 1 else None))
        return tuple(parts)

    def hypotheses(self) -> dict:
        """Hipótesis del teorema de densidad: grupos de vértice infinitos, grupos de arista finitos y flags hcf."""
        infinite = {p: not g.is_finite() for p, g in sorted(self.vertex_groups.items())}
        hcf = {e.name: {"source": e.hcf_source, "target": e.hcf_target} for e in self.edges}
        return {
            "vertex_groups_infinite": infinite,
            "edge_groups_finite": True,
            "hcf": hcf,
            "satisfied": all(infinite.values()) and all(e.hcf_source and e.hcf_target for e in self.edges),
        }

    def to_dict(self) -> dict:
        return {
            "vertices": {p: g.name for p, g in sorted(self.vertex_groups.items())},
            "edges": [
                {
                    "name": e.name,
                    "source": e.source,
                    "target": e.target,
                    "sigma": e.sigma.name,
                    "s": [str(x) for x in e.s_images],
                    "r": [str(x) for x in e.r_images],
                }
                for e in self.edges
            ],
            "tree": list(self.tree),
        }


# ---------------------------------------------------------------------------
# Grupo fundamental
# ---------------------------------------------------------------------------

@dataclass
class FundamentalGroup:
    """Descriptor anidado de π₁ y los encajes Γ_p → π₁ (como funciones sobre elementos)."""

    group: GroupDescriptor
    vertex_maps: Dict[str, object] = field(default_factory=dict)

    def embed(self, vertex: str, x: GroupElem) -> GroupElem:
        return self.vertex_maps[vertex](x)


def fundamental_group(gog: GraphOfGroups) -> FundamentalGroup:
    """
    Construye π₁(𝒢, 𝒯) de forma recursiva: primero las aristas fuera del
    árbol (HNN), luego las del árbol (amalgamas).
    """
    if not gog.edges:
        (vertex, group), = gog.vertex_groups.items()
        return FundamentalGroup(group, {vertex: lambda x: x})

    extra = [e for e in gog.edges if e.name not in gog.tree]
    if extra:
        edge = extra[-1]
        (rest,) = gog.without_edge(edge.name)
        inner = fundamental_group(rest)
        group = HNNGroup(
            f"HNN({inner.group.name},{edge.name})",
            inner.group,
            edge.sigma,
            embedding=[inner.embed(edge.target, x) for x in edge.r_images],
            theta=[inner.embed(edge.source, x) for x in edge.s_images],
            stable_letter=edge.name,
        )
        maps = {p: _compose(group.embed_base, f) for p, f in inner.vertex_maps.items()}
        return FundamentalGroup(group, maps)

    edge = gog.edge(gog.tree[-1])
    left, right = _sides(gog, edge)
    g1, g2 = fundamental_group(left), fundamental_group(right)
    group = AmalgamGroup(
        f"({g1.group.name}*{g2.group.name})",
        (g1.group, g2.group),
        edge.sigma,
        (
            [g1.embed(edge.source, x) for x in edge.s_images],
            [g2.embed(edge.target, x) for x in edge.r_images],
        ),
    )
    maps = {p: _compose(lambda y: group.embed(0, y), f) for p, f in g1.vertex_maps.items()}
    maps.update({p: _compose(lambda y: group.embed(1, y), f) for p, f in g2.vertex_maps.items()})
    return FundamentalGroup(group, maps)


def _compose(outer, inner):
    return lambda x: outer(inner(x))


def _sides(gog: GraphOfGroups, edge: GogEdge) -> Tuple[GraphOfGroups, GraphOfGroups]:
    parts = gog.without_edge(edge.name)
    left = next(p for p in parts if edge.source in p.vertex_groups)
    right = next(p for p in parts if edge.target in p.vertex_groups)
    return left, right


# ---------------------------------------------------------------------------
# Descomposición por una arista
# ---------------------------------------------------------------------------

@dataclass
class AmalgamData:
    """Caso disconexo: Γ = Γ₁ ∗_{Σ_e} Γ₂ con Γᵢ los grupos fundamentales de las dos componentes."""

    edge: str
    left: GraphOfGroups
    right: GraphOfGroups
    sigma: GroupDescriptor
    s_images: Tuple[GroupElem, ...]
    r_images: Tuple[GroupElem, ...]
    source: str
    target: str

    kind = "amalgam"

    def group(self, name: Optional[str] = None) -> AmalgamGroup:
        g1, g2 = fundamental_group(self.left), fundamental_group(self.right)
        return AmalgamGroup(
            name or f"({g1.group.name}*{g2.group.name})",
            (g1.group, g2.group),
            self.sigma,
            (
                [g1.embed(self.source, x) for x in self.s_images],
                [g2.embed(self.target, x) for x in self.r_images],
            ),
        )

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "edge": self.edge,
            "sigma": self.sigma.name,
            "gamma1": sorted(self.left.vertex_groups),
            "gamma2": sorted(self.right.vertex_groups),
            "s": [str(x) for x in self.s_images],
            "r": [str(x) for x in self.r_images],
        }


@dataclass
class HNNData:
    """Caso conexo: Γ = HNN(H, r_e(Σ_e), θ) con θ = s_e ∘ r_e⁻¹ y H el grupo fundamental del resto."""

    edge: str
    base: GraphOfGroups
    sigma: GroupDescriptor
    r_images: Tuple[GroupElem, ...]
    s_images: Tuple[GroupElem, ...]
    source: str
    target: str

    kind = "hnn"

    @property
    def theta(self) -> Dict[GroupElem, GroupElem]:
        return dict(zip(self.r_images, self.s_images))

    def group(self, name: Optional[str] = None) -> HNNGroup:
        inner = fundamental_group(self.base)
        return HNNGroup(
            name or f"HNN({inner.group.name},{self.edge})",
            inner.group,
            self.sigma,
            embedding=[inner.embed(self.target, x) for x in self.r_images],
            theta=[inner.embed(self.source, x) for x in self.s_images],
            stable_letter=self.edge,
        )

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "edge": self.edge,
            "sigma": self.sigma.name,
            "base": sorted(self.base.vertex_groups),
            "theta": [[str(r), str(s)] for r, s in zip(self.r_images, self.s_images)],
        }


def decompose_graph_of_groups(gog: GraphOfGroups, edge_name: str) -> Union[AmalgamData, HNNData]:
    """
    Quita e₀ y ē₀: si el resto es conexo devuelve los datos HNN, si no los
    datos de la amalgama sobre Σ_{e₀}.

    Raises:
        InvalidEdge si e₀ no es una arista del grafo
    """
    edge = gog.edge(edge_name)
    parts = gog.without_edge(edge_name)
    if len(parts) == 1:
        data = HNNData(
            edge=edge.name,
            base=parts[0],
            sigma=edge.sigma,
            r_images=tuple(edge.r_images),
            s_images=tuple(edge.s_images),
            source=edge.source,
            target=edge.target,
        )
        logger.info("✓ Arista %s: el resto es conexo, caso HNN", edge.name)
        return data
    left, right = _sides(gog, edge)
    logger.info("✓ Arista %s: el resto se desconecta, caso amalgama", edge.name)
    return AmalgamData(
        edge=edge.name,
        left=left,
        right=right,
        sigma=edge.sigma,
        s_images=tuple(edge.s_images),
        r_images=tuple(edge.r_images),
        source=edge.source,
        target=edge.target,
    )
