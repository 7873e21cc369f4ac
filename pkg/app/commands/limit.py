"""
`limit`: etapas de la extensión aleatoria iterada y puntos fijos.
"""
import logging

from sympy.combinatorics import Permutation

from ..algorithms.limits import fixed_vertices, iterate_extensions, lift_action, permutation_rule, seed_action
from ..exceptions import InvalidInput
from ..models.groups import FiniteTableGroup
from ..models.terms import format_vertex, term_key
from ..utils.config_loader import load_seed
from ..utils.serialization import FORMATS, serialize_graph
from ..utils.validators import positive_int, split_vertex_list
from . import CommandResult

logger = logging.getLogger(__name__)


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("limit", help="extensiones aleatorias de una semilla")
    actions = parser.add_subparsers(dest="action", required=True)

    stage = actions.add_parser("stage", parents=parents, help="G_0 … G_upto")
    stage.add_argument("--seed", required=True, help="archivo JSON de la semilla")
    stage.add_argument("--l", type=positive_int, default=1)
    stage.add_argument("--upto", type=int, default=1)
    stage.add_argument("--export", choices=FORMATS, default=None)
    stage.add_argument("--out", default=None, help="archivo de salida del export (por defecto stdout)")
    stage.set_defaults(handler=run_stage)

    fix = actions.add_parser("fix", parents=parents, help="vértices fijos de una permutación de la semilla")
    fix.add_argument("--seed", required=True)
    fix.add_argument("--perm", required=True, help="imágenes de b0…b(n-1), p.ej. 1,0,2")
    fix.add_argument("--l", type=positive_int, default=1)
    fix.add_argument("--window", type=positive_int, default=None, help="limitar a los primeros términos nuevos")
    fix.set_defaults(handler=run_fix)


def run_stage(args) -> CommandResult:
    if args.upto < 0:
        raise InvalidInput(f"--upto debe ser ≥ 0, no {args.upto}")
    tower = iterate_extensions(load_seed(args.seed), args.l, args.upto)
    sizes = [len(g) for g in tower]
    payload = {"seed": args.seed, "l": args.l, "stages": sizes, "edges": len(tower[-1].edges)}
    lines = [f"G_{n}: {size} vértices" for n, size in enumerate(sizes)]
    if args.export is not None:
        content = serialize_graph(tower[-1], args.export)
        if args.out is None:
            return CommandResult(payload={**payload, "export": content}, text=content.rstrip("\n"))
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(content)
        logger.info("📝 Etapa %d exportada a %s", args.upto, args.out)
        payload["export"] = args.out
    return CommandResult(payload=payload, lines=lines)


def _permutation(text: str, n: int) -> Permutation:
    try:
        images = [int(item) for item in split_vertex_list(text)]
    except ValueError:
        raise InvalidInput(f"Permutación inválida: '{text}'") from None
    if sorted(images) != list(range(n)):
        raise InvalidInput(f"'{text}' no es una permutación de 0…{n - 1}")
    return Permutation(images)


def run_fix(args) -> CommandResult:
    seed = load_seed(args.seed)
    perm = _permutation(args.perm, len(seed))
    group = FiniteTableGroup.from_permutations("P", [perm])
    g = next(h for h in group.elements() if group.permutation(h) == perm)
    lifted = lift_action(seed_action(group, seed, permutation_rule(group)), args.l)
    window = sorted((v for v in lifted.graph.vertices if v.stage > 0), key=term_key)
    if args.window is not None:
        window = window[: args.window]
    fixed = [format_vertex(v) for v in fixed_vertices(g, lifted, window)]
    return CommandResult(
        payload={"permutation": list(perm.array_form), "l": args.l, "window": len(window), "fixed": fixed},
        lines=fixed,
    )
