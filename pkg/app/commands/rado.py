"""
`rado`: consultas sobre un backend del grafo aleatorio.
"""
import logging

from ..algorithms.backends import Delete, Slice, verify_witness
from ..models.terms import format_vertex
from ..utils.config_loader import backend_from_spec
from ..utils.validators import parse_vertices, positive_int
from . import CommandResult, backend_option

logger = logging.getLogger(__name__)


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("rado", help="adyacencia, testigos y enumeración")
    actions = parser.add_subparsers(dest="action", required=True)

    adjacent = actions.add_parser("adjacent", parents=parents, help="¿x ~ y?")
    backend_option(adjacent)
    adjacent.add_argument("x")
    adjacent.add_argument("y")
    adjacent.set_defaults(handler=run_adjacent)

    witness = actions.add_parser("witness", parents=parents, help="menor z adyacente a U y no a V")
    backend_option(witness)
    witness.add_argument("-U", default="", help="lista separada por comas")
    witness.add_argument("-V", default="", help="lista separada por comas")
    witness.add_argument("--exclude", default="", help="vértices prohibidos además de U∪V")
    witness.set_defaults(handler=run_witness)

    enum = actions.add_parser("enum", parents=parents, help="primeros n vértices")
    backend_option(enum)
    enum.add_argument("-n", type=positive_int, required=True)
    enum.add_argument("--delete", default=None, help="enumerar R∖A")
    enum.add_argument("--slice", nargs=2, metavar=("U", "V"), default=None, help="enumerar R_{U,V}")
    enum.set_defaults(handler=run_enum)


def run_adjacent(args) -> CommandResult:
    backend = backend_from_spec(args.backend)
    x, y = backend.parse_vertex(args.x), backend.parse_vertex(args.y)
    answer = backend.adjacent(x, y)
    return CommandResult(
        payload={"backend": backend.spec, "x": format_vertex(x), "y": format_vertex(y), "adjacent": answer},
        text="true" if answer else "false",
    )


def run_witness(args) -> CommandResult:
    backend = backend_from_spec(args.backend)
    U = parse_vertices(args.U, backend)
    V = parse_vertices(args.V, backend)
    exclude = parse_vertices(args.exclude, backend)
    z = backend.property_r_witness(U, V, exclude)
    verified = verify_witness(backend, z, U, V)
    logger.info("✓ Testigo %s", format_vertex(z))
    return CommandResult(
        payload={
            "backend": backend.spec,
            "U": [format_vertex(u) for u in U],
            "V": [format_vertex(v) for v in V],
            "witness": format_vertex(z),
            "verified": verified,
        },
        text=format_vertex(z),
        exit_code=0 if verified else 1,
    )


def run_enum(args) -> CommandResult:
    backend = backend_from_spec(args.backend)
    if args.delete is not None:
        backend = backend.derive(Delete(frozenset(parse_vertices(args.delete, backend))))
    if args.slice is not None:
        U_text, V_text = args.slice
        backend = backend.derive(
            Slice(frozenset(parse_vertices(U_text, backend)), frozenset(parse_vertices(V_text, backend)))
        )
    vertices = [format_vertex(v) for v in backend.enumerate(args.n)]
    return CommandResult(payload={"backend": backend.spec, "vertices": vertices}, lines=vertices)
