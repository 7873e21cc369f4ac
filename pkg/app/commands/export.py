"""
`export`: ventana de un backend a DOT o JSON-lines.
"""
from ..exceptions import InvalidInput
from ..models.graph import induced_subgraph
from ..utils.config_loader import backend_from_spec
from ..utils.serialization import FORMATS, export_graph, serialize_graph
from ..utils.validators import parse_vertices
from . import CommandResult, backend_option


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("export", parents=parents, help="exportar el subgrafo inducido por una ventana")
    backend_option(parser)
    window = parser.add_mutually_exclusive_group(required=True)
    window.add_argument("-n", type=int, help="primeros n vértices (0 = ventana vacía)")
    window.add_argument("--vertices", help="lista explícita separada por comas")
    parser.add_argument("--format", "-f", choices=FORMATS, required=True)
    parser.add_argument("--out", "-o", default=None, help="archivo destino (por defecto stdout)")
    parser.set_defaults(handler=run_export)


def run_export(args) -> CommandResult:
    backend = backend_from_spec(args.backend)
    if args.vertices is not None:
        window = parse_vertices(args.vertices, backend)
    elif args.n < 0:
        raise InvalidInput(f"-n debe ser ≥ 0, no {args.n}")
    else:
        window = backend.enumerate(args.n)
    if args.out is None:
        content = serialize_graph(induced_subgraph(window, backend), args.format)
        return CommandResult(payload={"format": args.format, "content": content}, text=content.rstrip("\n"))
    graph = export_graph(backend, window, args.format, args.out)
    payload = {"format": args.format, "path": args.out, "vertices": len(graph), "edges": len(graph.edges)}
    return CommandResult(payload=payload, text=f"{len(graph.edges)} aristas → {args.out}")
