"""
Errores del dominio.

Cada error lleva un `code` estable (lo usa la CLI en la salida JSON) y un
`detail` legible, igual que un HTTPException lleva status y detail.
"""
from typing import Any, List, Optional


class RadoError(Exception):
    code = "rado_error"

    def __init__(self, detail: str, **context: Any):
        super().__init__(detail)
        self.detail = detail
        self.context = context

    def to_dict(self) -> dict:
        data = {"error": self.code, "detail": self.detail}
        if self.context:
            data["context"] = {k: str(v) for k, v in sorted(self.context.items())}
        return data


# Backends y grafos
class InvalidVertex(RadoError):
    code = "invalid_vertex"


class LoopQuery(RadoError):
    code = "loop_query"


class DisjointnessViolated(RadoError):
    code = "disjointness_violated"


class ExhaustedBackend(RadoError):
    code = "exhausted_backend"


class EmptyGraph(RadoError):
    code = "empty_graph"


# Grupos
class InvalidLetter(RadoError):
    code = "invalid_letter"


class GroupTableInvalid(RadoError):
    code = "group_table_invalid"


class FiniteGroupRejected(RadoError):
    code = "finite_group_rejected"


class BudgetExhausted(RadoError):
    """Resultado inconcluso: no se encontró testigo dentro del presupuesto."""

    code = "budget_exhausted"


# Back-and-forth
class InvalidPartialIso(RadoError):
    code = "invalid_partial_iso"


class EquivarianceViolated(RadoError):
    code = "equivariance_violated"


class FreenessViolated(RadoError):
    code = "freeness_violated"


class SingularActionDetected(RadoError):
    code = "singular_action"


class CommitConflict(RadoError):
    code = "commit_conflict"


# Motor de genericidad
class IndexTooSmall(RadoError):
    code = "index_too_small"


class NotReduced(RadoError):
    code = "not_reduced"


class InvalidEdge(RadoError):
    code = "invalid_edge"


class InvalidInput(RadoError):
    code = "invalid_input"


class DisconnectionFailure(RadoError):
    code = "disconnection_failure"


# CLI / configuración
class ConfigParseError(RadoError):
    code = "parse_error"

    def __init__(self, detail: str, line: Optional[int] = None, column: Optional[int] = None):
        super().__init__(detail, line=line, column=column)
        self.line = line
        self.column = column


class ConfigValidationError(RadoError):
    code = "validation_error"

    def __init__(self, detail: str, fields: Optional[List[str]] = None):
        super().__init__(detail, fields=",".join(fields or []))
        self.fields = list(fields or [])


class UnknownSuite(RadoError):
    code = "unknown_suite"


class CertificateMismatch(RadoError):
    """La re-verificación exacta de un paso no reproduce el resultado construido."""

    code = "certificate_mismatch"
