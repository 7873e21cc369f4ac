"""
`verify`: suites de invariantes con informe JSON determinista.
"""
import logging

from ..schemas import RunConfig
from ..services.verification_suites import SUITES, run_suite
from ..utils.config_loader import load_config, validate_config
from . import CommandResult, add_config

logger = logging.getLogger(__name__)


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("verify", parents=parents, help="ejecutar una suite de verificación")
    parser.add_argument("--suite", "-s", required=True, help=f"{', '.join(SUITES)} o all")
    add_config(parser, required=False)
    parser.add_argument("--steps", type=int, default=None, help="pasos del scheduler en las suites de densidad")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", default=None, help="archivo del informe")
    parser.set_defaults(handler=run_verify)


def run_verify(args) -> CommandResult:
    config = load_config(args.config) if args.config else RunConfig()
    if args.steps is not None or args.seed is not None:
        data = config.model_dump()
        if args.steps is not None:
            data["budgets"]["steps"] = args.steps
        if args.seed is not None:
            data["seed"] = args.seed
        config = validate_config(data)
    report = run_suite(args.suite, config)
    text = report.to_json()
    out = args.out or config.outputs.report
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
        logger.info("📝 Informe escrito en %s", out)
    lines = [f"{c.status:12} {c.name} ({c.instances})" for c in report.checks]
    lines.append(f"estado: {report.status}")
    return CommandResult(payload=report.to_dict(), lines=lines, exit_code=report.exit_code)
