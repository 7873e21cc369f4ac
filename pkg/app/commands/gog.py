"""
`gog`: grafos de grupos declarados en una configuración.
"""
from ..algorithms.graph_of_groups import GraphOfGroups, decompose_graph_of_groups, fundamental_group
from ..exceptions import InvalidInput
from ..utils.config_loader import build_groups, load_config
from . import CommandResult, add_config


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("gog", help="grafos de grupos")
    actions = parser.add_subparsers(dest="action", required=True)

    for name, handler, help_text in (
        ("show", run_show, "vértices, aristas, árbol e hipótesis"),
        ("fundamental", run_fundamental, "descriptor del grupo fundamental"),
        ("decompose", run_decompose, "amalgama o HNN al cortar una arista"),
    ):
        sub = actions.add_parser(name, parents=parents, help=help_text)
        add_config(sub)
        sub.add_argument("--group", "-g", required=True)
        if name == "decompose":
            sub.add_argument("--edge", "-e", required=True)
        sub.set_defaults(handler=handler)


def _graph(args) -> GraphOfGroups:
    registry = build_groups(load_config(args.config))
    gog = registry.get(args.group)
    if not isinstance(gog, GraphOfGroups):
        raise InvalidInput(f"'{args.group}' no es un grafo de grupos declarado", group=args.group)
    return gog


def run_show(args) -> CommandResult:
    gog = _graph(args)
    data = gog.to_dict()
    data["hypotheses"] = gog.hypotheses()
    lines = [
        f"vértices: {', '.join(f'{p}={g}' for p, g in data['vertices'].items())}",
        f"aristas: {', '.join(e['name'] for e in data['edges']) or '-'}",
        f"árbol: {', '.join(data['tree']) or '-'}",
        f"hipótesis: {'sí' if data['hypotheses']['satisfied'] else 'no'}",
    ]
    return CommandResult(payload=data, lines=lines)


def run_fundamental(args) -> CommandResult:
    result = fundamental_group(_graph(args))
    group = result.group
    data = group.to_dict()
    data["letters"] = sorted(group.letters())
    return CommandResult(payload=data, text=group.name)


def run_decompose(args) -> CommandResult:
    data = decompose_graph_of_groups(_graph(args), args.edge)
    payload = data.to_dict()
    return CommandResult(payload=payload, text=f"{data.kind}: {data.group().name}")
