"""
`extend`: back-and-forth de un isomorfismo parcial finito, plano o
Σ-equivariante sobre la acción base de un grupo declarado.
"""
import json

from ..algorithms.back_and_forth import EquivarianceContext, extend_to_automorphism, verify_window
from ..config import settings
from ..exceptions import InvalidInput
from ..models.graph import PartialIso
from ..models.terms import format_vertex, term_key
from ..utils.config_loader import backend_from_spec
from ..utils.validators import parse_mapping, parse_vertices, positive_int
from . import CommandResult, add_config, backend_option
from .group import base_action, lookup_group


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("extend", parents=parents, help="extender φ a un automorfismo perezoso")
    backend_option(parser)
    parser.add_argument("--map", "--phi", dest="map", required=True, help="pares x:y separados por comas")
    parser.add_argument("--window", "-n", type=positive_int, default=None, help="verificar los primeros n vértices")
    parser.add_argument("--query", default="", help="vértices a consultar además de la ventana")
    parser.add_argument("--sigma", default=None, help="Σ finito (palabras) para la extensión equivariante")
    add_config(parser, required=False)
    parser.add_argument("--group", "-g", default=None, help="grupo de la acción base (con --sigma)")
    parser.add_argument("--l", type=positive_int, default=None, help="parámetro l (por defecto |Σ|)")
    parser.set_defaults(handler=run_extend)


def _equivariant_setup(args):
    if not args.config or not args.group:
        raise InvalidInput("--sigma necesita --config y --group")
    group = lookup_group(args)
    action, sigma = base_action(args, group)
    if len(sigma) == 1:
        raise InvalidInput("--sigma no tiene elementos no triviales")
    return action, sigma, EquivarianceContext(action, [(s, s) for s in sigma])


def run_extend(args) -> CommandResult:
    action = sigma = context = None
    if args.sigma is not None:
        action, sigma, context = _equivariant_setup(args)
        backend = action.backend
    else:
        backend = backend_from_spec(args.backend)
    phi = PartialIso(parse_mapping(args.map, backend))
    aut = extend_to_automorphism(phi, backend, context)
    queried = parse_vertices(args.query, backend)
    window = backend.enumerate(args.window or settings.RADO_WINDOW)
    checked = window + [q for q in queried if q not in window]
    report = verify_window(aut, checked)
    answers = {format_vertex(x): format_vertex(aut.query(x)) for x in queried}
    committed = sorted(aut.committed.items(), key=lambda p: term_key(p[0]))
    pairs = [{"x": format_vertex(x), "y": format_vertex(y)} for x, y in committed]
    payload = {
        "backend": backend.spec,
        "phi_size": len(phi),
        "window": report.to_dict(),
        "queries": answers,
        "committed": pairs,
    }
    passed = report.passed
    if context is not None:
        broken = [
            format_vertex(x) for x in checked for s in sigma[1:]
            if aut.query(action.act(s, x)) != action.act(s, aut.query(x))
        ]
        payload["sigma"] = [str(s) for s in sigma]
        payload["equivariant"] = not broken
        passed = passed and not broken
    lines = [json.dumps(pair, ensure_ascii=False) for pair in pairs]
    return CommandResult(payload=payload, lines=lines, exit_code=0 if passed else 1)
