"""
`group`: grupos declarados en un archivo de configuración y su acción base
sobre el límite de extensiones aleatorias.
"""
from itertools import islice

from ..algorithms.limits import canonical_base_action
from ..algorithms.witnesses import (
    Disconnect,
    HighlyCoreFree,
    Homogeneity,
    PropertyF,
    Singularity,
    verify_disconnect,
    verify_highly_core_free,
    verify_homogeneity,
    verify_property_f,
    verify_singularity,
    witness_search,
)
from ..config import settings
from ..exceptions import InvalidInput
from ..models.graph import PartialIso
from ..models.terms import format_vertex
from ..utils.config_loader import build_groups, load_config
from ..utils.validators import parse_mapping, parse_vertices, positive_int, split_vertex_list
from . import CommandResult, add_config

WITNESS_KINDS = ("disconnect", "hcf", "property-f", "homogeneity", "singularity")


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("group", help="descriptores de grupos")
    actions = parser.add_subparsers(dest="action", required=True)

    def base(name: str, help_text: str, **kwargs):
        sub = actions.add_parser(name, parents=parents, help=help_text, **kwargs)
        add_config(sub)
        sub.add_argument("--group", "-g", required=True)
        return sub

    def acting(name: str, help_text: str):
        sub = base(name, help_text)
        sub.add_argument("--sigma", default="", help="Σ finito: palabras separadas por comas")
        sub.add_argument("--l", type=positive_int, default=None, help="parámetro l (por defecto |Σ|)")
        return sub

    info = base("info", "letras, finitud y orden")
    info.set_defaults(handler=run_info)

    nf = base("nf", "forma normal de una palabra", aliases=["normal-form"])
    nf.add_argument("word")
    nf.set_defaults(handler=run_normal_form)

    enum = base("enum", "primeros n elementos")
    enum.add_argument("-n", type=positive_int, required=True)
    enum.set_defaults(handler=run_enum)

    act = acting("act", "imagen de un vértice del límite por g")
    act.add_argument("--element", "-e", required=True, help="palabra del grupo")
    act.add_argument("--vertex", "-x", required=True, help="b(<palabra>) o {t1,t2,...}")
    act.set_defaults(handler=run_act)

    witness = acting("witness", "búsqueda acotada de testigos de la acción base")
    witness.add_argument("--kind", "-k", choices=WITNESS_KINDS, required=True)
    witness.add_argument("--budget", type=positive_int, default=None)
    witness.add_argument("--F", default="", help="conjunto finito de vértices")
    witness.add_argument("--S", default="", help="elementos para property-f, separados por comas")
    witness.add_argument("--phi", default=None, help="pares x:y para homogeneity")
    witness.add_argument("--window", "-n", type=positive_int, default=None, help="vértices para singularity")
    witness.set_defaults(handler=run_witness)


def lookup_group(args):
    registry = build_groups(load_config(args.config))
    if args.group not in registry:
        raise InvalidInput(f"Grupo no declarado: '{args.group}'", group=args.group)
    group = registry[args.group]
    if not hasattr(group, "parse_word"):
        raise InvalidInput(f"'{args.group}' es un grafo de grupos; usar `gog`", group=args.group)
    return group


def _words(group, text: str) -> list:
    return [group.parse_word(word) for word in split_vertex_list(text)]


def base_action(args, group):
    """Acción base Γ ↷ R; Σ incluye siempre la identidad."""
    sigma = [group.identity()]
    for s in _words(group, args.sigma):
        if s not in sigma:
            sigma.append(s)
    return canonical_base_action(group, sigma, args.l), sigma


def run_info(args) -> CommandResult:
    group = lookup_group(args)
    data = group.to_dict()
    data["letters"] = sorted(group.letters())
    data["finite"] = group.is_finite()
    data["order"] = group.order()
    lines = [f"{k}: {data[k]}" for k in sorted(data)]
    return CommandResult(payload=data, lines=lines)


def run_normal_form(args) -> CommandResult:
    group = lookup_group(args)
    g = group.normal_form(args.word)
    order = group.order_of(g)
    return CommandResult(
        payload={"group": group.name, "word": args.word, "normal_form": str(g), "order": order},
        text=str(g),
    )


def run_enum(args) -> CommandResult:
    group = lookup_group(args)
    elements = [str(g) for g in islice(group.enumerate(), args.n)]
    return CommandResult(payload={"group": group.name, "elements": elements}, lines=elements)


def run_act(args) -> CommandResult:
    group = lookup_group(args)
    action, _ = base_action(args, group)
    g = group.parse_word(args.element)
    x = action.backend.parse_vertex(args.vertex)
    y = action.act(g, x)
    payload = {
        "group": group.name,
        "l": action.backend.l,
        "element": str(g),
        "vertex": format_vertex(x),
        "image": format_vertex(y),
        "adjacent": x != y and action.adjacent(x, y),
    }
    return CommandResult(payload=payload, text=format_vertex(y))


def run_witness(args) -> CommandResult:
    group = lookup_group(args)
    action, sigma = base_action(args, group)
    backend = action.backend
    F = frozenset(parse_vertices(args.F, backend))
    payload = {"group": group.name, "kind": args.kind, "l": backend.l}

    if args.kind == "singularity":
        window = tuple(backend.enumerate(args.window or settings.RADO_WINDOW))
        report = witness_search(action, Singularity(window), args.budget)
        payload.update(report.to_dict())
        payload["window"] = len(window)
        if report.found:
            payload["verified"] = verify_singularity(action, report.vertex, report.element)
        text = f"{report.vertex} ∼ {report.element}·{report.vertex}" if report.found else "sin testigo en la ventana"
        return CommandResult(payload=payload, text=text)

    if args.kind == "disconnect":
        g = witness_search(action, Disconnect(F), args.budget)
        witness, verified = str(g), verify_disconnect(action, g, F)
    elif args.kind == "hcf":
        g = witness_search(action, HighlyCoreFree(tuple(sigma), F), args.budget)
        witness, verified = str(g), verify_highly_core_free(action, g, sigma, F)
    elif args.kind == "property-f":
        S = _words(group, args.S)
        if not S:
            raise InvalidInput("property-f necesita --S")
        x = witness_search(action, PropertyF(tuple(S), F), args.budget)
        witness, verified = format_vertex(x), verify_property_f(action, x, S, F)
    else:
        if not args.phi:
            raise InvalidInput("homogeneity necesita --phi")
        phi = PartialIso(parse_mapping(args.phi, backend))
        g = witness_search(action, Homogeneity(phi), args.budget)
        witness, verified = str(g), verify_homogeneity(action, g, phi)

    payload.update({"F": sorted(format_vertex(v) for v in F), "witness": witness, "verified": verified})
    return CommandResult(payload=payload, text=witness, exit_code=0 if verified else 1)
