"""
`generic`: scheduler de requisitos sobre el setup de una configuración.
"""
import json
import logging

from pydantic import ValidationError

from ..exceptions import InvalidInput
from ..schemas import Certificate
from ..services.scheduler import replay_certificates, run_scheduler
from ..utils.config_loader import build_setup, load_config
from . import CommandResult, add_config

logger = logging.getLogger(__name__)


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("generic", help="pasos de densidad encadenados")
    actions = parser.add_subparsers(dest="action", required=True)

    run = actions.add_parser("run", parents=parents, help="ejecutar n pasos y emitir certificados")
    add_config(run)
    run.add_argument("--steps", type=int, default=None)
    run.add_argument("--strategy", choices=("alternate", "homogeneity", "faithfulness"), default=None)
    run.add_argument("--out", default=None, help="certificados en JSON-lines")
    run.set_defaults(handler=run_generic)

    replay = actions.add_parser("replay", parents=parents, help="re-verificar certificados contra una ejecución nueva")
    add_config(replay)
    replay.add_argument("--certs", required=True)
    replay.set_defaults(handler=run_replay)


def _execute(config, steps=None, strategy=None):
    setup = build_setup(config)
    run = run_scheduler(
        setup,
        config.budgets.steps if steps is None else steps,
        strategy or config.strategy,
        budget=config.budgets.search,
        max_size=config.budgets.phi_size,
        window=config.budgets.window,
        rounds=config.budgets.rounds,
    )
    return setup, run


def write_certificates(certificates, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for cert in certificates:
            fh.write(json.dumps(cert.model_dump(), sort_keys=True, ensure_ascii=False) + "\n")
    logger.info("📝 %d certificados escritos en %s", len(certificates), path)


def read_certificates(path: str):
    certificates = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                certificates.append(Certificate.model_validate_json(line))
            except ValidationError as exc:
                raise InvalidInput(f"Certificado inválido en la línea {lineno}", line=lineno) from exc
    return certificates


def run_generic(args) -> CommandResult:
    config = load_config(args.config)
    if args.steps is not None and args.steps < 0:
        raise InvalidInput(f"--steps debe ser ≥ 0, no {args.steps}")
    _, run = _execute(config, args.steps, args.strategy)
    out = args.out or config.outputs.certificates
    if out:
        write_certificates(run.certificates, out)
    lines = [f"{c.step}\t{c.requirement}\t{c.element}" for c in run.certificates]
    lines.append(f"estado: {run.status}")
    return CommandResult(payload=run.to_dict(), lines=lines, exit_code=3 if run.inconclusive else 0)


def run_replay(args) -> CommandResult:
    config = load_config(args.config)
    certificates = read_certificates(args.certs)
    setup, run = _execute(config, steps=len(certificates))
    results = replay_certificates(setup, certificates)
    failed = [r for r in results if not r.passed]
    payload = {"replayed": len(results), "failed": [r.model_dump() for r in failed], "run_status": run.status}
    lines = [f"{len(results) - len(failed)}/{len(results)} certificados reproducidos"]
    lines.extend(f"paso {r.step}: {r.detail}" for r in failed)
    return CommandResult(payload=payload, lines=lines, exit_code=1 if failed else 0)
