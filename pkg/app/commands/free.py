"""
`free`: tuplas genéricas de automorfismos y pasos del grupo libre.
"""
from ..algorithms.free_actions import FreeTupleSetup, free_faithful_step, free_homogeneity_step
from ..algorithms.treezation import Treezation, schreier_window
from ..models.graph import PartialIso
from ..utils.config_loader import backend_from_spec
from ..utils.validators import parse_mapping, parse_vertices, positive_int
from . import CommandResult, backend_option


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("free", help="acciones del grupo libre F_k")
    actions = parser.add_subparsers(dest="action", required=True)

    def base(name: str, help_text: str):
        sub = actions.add_parser(name, parents=parents, help=help_text)
        backend_option(sub)
        sub.add_argument("-k", type=int, default=2, help="rango (≥ 2)")
        sub.add_argument("--rounds", type=int, default=None, help="rondas materializadas")
        return sub

    homogeneity = base("homogeneity", "ω̄ y w con ω(w)|d(φ) = φ")
    homogeneity.add_argument("--phi", required=True, help="pares x:y separados por comas")
    homogeneity.add_argument("--F", default=None, help="vértices donde ωⱼ = αⱼ (por defecto el soporte)")
    homogeneity.add_argument("--budget", type=positive_int, default=None)
    homogeneity.set_defaults(handler=run_homogeneity)

    faithful = base("faithful", "vértice x con ω(w)x ≠ x")
    faithful.add_argument("--word", "-w", required=True)
    faithful.set_defaults(handler=run_faithful)

    schreier = base("schreier", "bola de Schreier de una treezation genérica")
    schreier.add_argument("--center", required=True)
    schreier.add_argument("--radius", type=int, default=3)
    schreier.add_argument("--guard", default="", help="F: vértices a preservar")
    schreier.set_defaults(handler=run_schreier)


def _setup(args) -> FreeTupleSetup:
    backend = backend_from_spec(args.backend)
    return FreeTupleSetup.generic(backend, args.k, args.rounds)


def _outcome_result(outcome) -> CommandResult:
    data = outcome.to_dict()
    lines = [f"w = {data['element']}", *data["checks"]]
    return CommandResult(payload=data, lines=lines)


def run_homogeneity(args) -> CommandResult:
    setup = _setup(args)
    phi = PartialIso(parse_mapping(args.phi, setup.backend))
    F = None if args.F is None else parse_vertices(args.F, setup.backend)
    return _outcome_result(free_homogeneity_step(setup, phi, F=F, budget=args.budget, rounds=args.rounds))


def run_faithful(args) -> CommandResult:
    setup = _setup(args)
    w = setup.group.parse_word(args.word)
    return _outcome_result(free_faithful_step(setup, w, rounds=args.rounds))


def run_schreier(args) -> CommandResult:
    backend = backend_from_spec(args.backend)
    guard = parse_vertices(args.guard, backend)
    center = backend.parse_vertex(args.center)
    tree = Treezation.generic(backend, args.k, args.rounds)
    if guard:
        tree = Treezation(backend, tree.maps, guard, args.rounds)
    report = schreier_window(tree.maps, center, args.radius, tree.guarded)
    data = report.to_dict()
    lines = [
        f"vértices: {data['vertices']}, aristas: {data['edges']}",
        f"ciclos: {len(data['cycles'])}, fuera de F̃: {len(data['cycles_outside'])}",
    ]
    return CommandResult(payload=data, lines=lines, exit_code=0 if report.passed else 1)
