"""
Exportación de ventanas finitas a DOT y JSON-lines, e importación JSONL.

Formato JSONL: una arista por línea, `{"u": ..., "v": ...}` con u < v como
cadenas, líneas ordenadas. DOT: grafo no orientado con etiquetas de
vértice y un comentario de cabecera con la lista de vértices.
"""
import json
import logging
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

from ..exceptions import InvalidInput
from ..models.graph import FiniteGraph, induced_subgraph
from ..models.terms import format_vertex, parse_limit_term, parse_nat

logger = logging.getLogger(__name__)

FORMATS = ("dot", "jsonl")


def parse_vertex_string(text: str, group=None):
    """Vértice BIT (`12`, `2^a+2^b`) o término límite (`b3`, `b(<palabra>)`, `{...}`)."""
    text = text.strip()
    if text[:1].isdigit() or text.startswith("2^"):
        return parse_nat(text)
    return parse_limit_term(text, group)


def _edge_strings(graph: FiniteGraph) -> List[Tuple[str, str]]:
    pairs = []
    for edge in graph.edges:
        u, v = sorted(format_vertex(x) for x in edge)
        pairs.append((u, v))
    return sorted(pairs)


def to_jsonl(graph: FiniteGraph) -> str:
    lines = [json.dumps({"u": u, "v": v}, ensure_ascii=False) for u, v in _edge_strings(graph)]
    return "".join(line + "\n" for line in lines)


def to_dot(graph: FiniteGraph, name: str = "R") -> str:
    labels = [format_vertex(v) for v in graph.vertices]
    out = [f"// vertices: {json.dumps(labels, ensure_ascii=False)}", f"graph {name} {{"]
    out.extend(f'  "{label}";' for label in labels)
    out.extend(f'  "{u}" -- "{v}";' for u, v in _edge_strings(graph))
    out.append("}")
    return "\n".join(out) + "\n"


def serialize_graph(graph: FiniteGraph, fmt: str) -> str:
    if fmt == "dot":
        return to_dot(graph)
    if fmt == "jsonl":
        return to_jsonl(graph)
    raise InvalidInput(f"Formato desconocido: '{fmt}' (dot o jsonl)", format=fmt)


def from_jsonl(
    text: str,
    parse: Callable[[str], object] = parse_vertex_string,
    vertices: Optional[Sequence] = None,
) -> FiniteGraph:
    """
    Reconstruye un FiniteGraph desde JSON-lines.

    Args:
        text: Contenido JSONL
        parse: Parser de cadenas de vértice
        vertices: Lista completa de vértices (por defecto, los extremos de las aristas)

    Raises:
        InvalidInput si una línea no es un registro {"u", "v"}
    """
    pairs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            pairs.append((parse(record["u"]), parse(record["v"])))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise InvalidInput(f"Línea {lineno} inválida: {exc}", line=lineno) from exc
    if vertices is None:
        seen = {}
        for u, v in pairs:
            seen.setdefault(u, None)
            seen.setdefault(v, None)
        vertices = list(seen)
    return FiniteGraph.from_pairs(vertices, pairs)


def export_graph(backend, window: Iterable, fmt: str, path: str) -> FiniteGraph:
    """
    Escribe el subgrafo inducido por `window` en `path`.

    Raises:
        InvalidInput si el formato no existe
        OSError si el archivo no se puede escribir
    """
    if fmt not in FORMATS:
        raise InvalidInput(f"Formato desconocido: '{fmt}' (dot o jsonl)", format=fmt)
    graph = induced_subgraph(window, backend)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_graph(graph, fmt))
    logger.info("📝 %d vértices y %d aristas exportados a %s", len(graph), len(graph.edges), path)
    return graph
