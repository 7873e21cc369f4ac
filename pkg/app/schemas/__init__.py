"""
Esquemas pydantic de la configuración de ejecución y de los certificados.
"""
from typing import Annotated, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


# Declaraciones de grupos
class CyclicDecl(_Strict):
    name: str
    kind: Literal["cyclic"]
    order: Optional[int] = Field(default=None, ge=1)
    letter: str = "a"


class FreeDecl(_Strict):
    name: str
    kind: Literal["free"]
    letters: List[str] = Field(min_length=1)


class TableDecl(_Strict):
    name: str
    kind: Literal["table"]
    elements: List[str] = Field(min_length=1)
    table: List[List[str]]


class PermutationsDecl(_Strict):
    name: str
    kind: Literal["permutations"]
    generators: List[List[List[int]]] = Field(min_length=1)
    prefix: str = "p"


class AmalgamDecl(_Strict):
    name: str
    kind: Literal["amalgam"]
    factors: List[str] = Field(min_length=2, max_length=2)
    sigma: str
    embeddings: List[List[str]] = Field(min_length=2, max_length=2)


class HNNDecl(_Strict):
    name: str
    kind: Literal["hnn"]
    base: str
    sigma: str
    embedding: List[str]
    theta: List[str]
    stable_letter: str = "t"


class GogEdgeDecl(_Strict):
    name: str
    source: str
    target: str
    sigma: str
    s: List[str]
    r: List[str]
    hcf: List[bool] = Field(default_factory=lambda: [False, False], min_length=2, max_length=2)


class GogDecl(_Strict):
    name: str
    kind: Literal["gog"]
    vertices: Dict[str, str] = Field(min_length=1)
    edges: List[GogEdgeDecl] = Field(default_factory=list)
    tree: Optional[List[str]] = None


GroupDecl = Annotated[
    Union[CyclicDecl, FreeDecl, TableDecl, PermutationsDecl, AmalgamDecl, HNNDecl, GogDecl],
    Field(discriminator="kind"),
]


def _references(decl) -> List[str]:
    if isinstance(decl, AmalgamDecl):
        return [*decl.factors, decl.sigma]
    if isinstance(decl, HNNDecl):
        return [decl.base, decl.sigma]
    if isinstance(decl, GogDecl):
        return [*decl.vertices.values(), *(e.sigma for e in decl.edges)]
    return []


# Backend y setup
class BackendDecl(_Strict):
    kind: Literal["bit", "limit"] = "bit"
    group: Optional[str] = None
    seed: Optional[str] = None
    l: int = Field(default=1, ge=1)


class SetupDecl(_Strict):
    kind: Literal["amalgam", "hnn", "free"]
    group: Optional[str] = None
    k: int = Field(default=2, ge=2)
    edge: Optional[str] = None


class Budgets(_Strict):
    search: int = Field(default=200, gt=0)
    steps: int = Field(default=10, ge=0)
    window: int = Field(default=20, gt=0)
    phi_size: int = Field(default=2, gt=0)
    neumann: int = Field(default=2000, gt=0)
    rounds: int = Field(default=2, ge=0)
    # tamaños de las suites de verificación
    backend_window: int = Field(default=12, gt=0)
    pair_samples: int = Field(default=50000, gt=0)
    extension_samples: int = Field(default=100, gt=0)
    extension_domain: int = Field(default=5, gt=0)
    extension_window: int = Field(default=50, gt=0)
    equivariant_samples: int = Field(default=25, gt=0)
    equivariant_window: int = Field(default=40, gt=0)


class Outputs(_Strict):
    certificates: Optional[str] = None
    report: Optional[str] = None


class RunConfig(_Strict):
    """Documento de configuración de una ejecución."""

    backend: Union[str, BackendDecl] = "bit"
    groups: List[GroupDecl] = Field(default_factory=list)
    setup: Optional[SetupDecl] = None
    budgets: Budgets = Field(default_factory=Budgets)
    strategy: Literal["alternate", "homogeneity", "faithfulness"] = "alternate"
    seed: int = Field(default=0, ge=0)
    outputs: Outputs = Field(default_factory=Outputs)

    @field_validator("groups")
    @classmethod
    def validate_groups(cls, groups):
        seen = set()
        for decl in groups:
            if decl.name in seen:
                raise ValueError(f"Nombre de grupo duplicado: '{decl.name}'")
            missing = [ref for ref in _references(decl) if ref not in seen]
            if missing:
                raise ValueError(f"El grupo '{decl.name}' referencia grupos no declarados antes: {missing}")
            seen.add(decl.name)
        return groups

    @field_validator("setup")
    @classmethod
    def validate_setup(cls, setup, info: ValidationInfo):
        if setup is None:
            return setup
        declared = {d.name: d for d in info.data.get("groups") or []}
        if setup.kind in ("amalgam", "hnn"):
            if setup.group is None:
                raise ValueError(f"Un setup '{setup.kind}' necesita 'group'")
            if setup.group not in declared:
                raise ValueError(f"Grupo no declarado: '{setup.group}'")
            decl = declared[setup.group]
            if decl.kind == "gog" and setup.edge is None:
                raise ValueError("Un grafo de grupos necesita 'edge' para descomponerse")
            if decl.kind not in (setup.kind, "gog"):
                raise ValueError(f"El grupo '{setup.group}' no es de tipo {setup.kind}")
        return setup

    @field_validator("backend")
    @classmethod
    def validate_backend(cls, backend):
        if isinstance(backend, str) and backend != "bit" and not backend.startswith("limit:"):
            raise ValueError(f"Backend desconocido: '{backend}'")
        return backend


# Certificados
class Certificate(BaseModel):
    """Certificado verificable de un requisito: el elemento o vértice producido y las igualdades comprobadas."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    step: int = Field(ge=0)
    setup: Literal["amalgam", "hnn", "free"]
    group: str
    requirement: Literal["homogeneity", "faithfulness"]
    element: str
    phi: Optional[List[List[str]]] = None
    vertex: Optional[str] = None
    image: Optional[str] = None
    checks: List[str] = Field(default_factory=list)
    support: int = Field(default=0, ge=0)


class ReplayResult(BaseModel):
    step: int
    passed: bool
    detail: str = ""


__all__ = [
    "AmalgamDecl",
    "BackendDecl",
    "Budgets",
    "Certificate",
    "CyclicDecl",
    "FreeDecl",
    "GogDecl",
    "GogEdgeDecl",
    "GroupDecl",
    "HNNDecl",
    "Outputs",
    "PermutationsDecl",
    "ReplayResult",
    "RunConfig",
    "SetupDecl",
    "TableDecl",
]
