"""
Punto de entrada de la CLI `rado-actions`.

Códigos de salida: 0 ok, 1 chequeos fallidos, 2 error de entrada o de
dominio, 3 inconcluso (presupuesto agotado).
"""
import argparse
import json
import logging
import sys
from typing import List, Optional

from .commands import common_options, extend, export, free, generic, gog, group, limit, rado, verify
from .config import settings
from .exceptions import BudgetExhausted, RadoError

logger = logging.getLogger(__name__)

COMMANDS = (rado, group, limit, extend, generic, free, gog, verify, export)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rado",
        description="Acciones genéricas de grupos sobre el grafo aleatorio",
    )
    parents = [common_options()]
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in COMMANDS:
        module.register(subparsers, parents)
    return parser


def configure_logging(verbose: bool) -> None:
    level = logging.INFO if verbose else getattr(logging, settings.RADO_LOG_LEVEL.upper(), logging.WARNING)
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s", force=True)


def _emit(payload, as_json: bool, text: str = "") -> None:
    if as_json:
        print(json.dumps(payload, sort_keys=True, ensure_ascii=False))
    elif text:
        print(text)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    as_json = getattr(args, "json", False)
    configure_logging(getattr(args, "verbose", False))
    try:
        result = args.handler(args)
    except BudgetExhausted as exc:
        logger.warning("⚠️ Inconcluso: %s", exc.detail)
        _emit(exc.to_dict(), as_json, f"inconcluso: {exc.detail}")
        return 3
    except RadoError as exc:
        logger.error("❌ %s: %s", exc.code, exc.detail)
        _emit(exc.to_dict(), as_json, f"error ({exc.code}): {exc.detail}")
        return 2
    except OSError as exc:
        logger.error("❌ Error de E/S: %s", exc)
        _emit({"error": "io_error", "detail": str(exc)}, as_json, f"error (io_error): {exc}")
        return 2
    _emit(result.payload, as_json, result.render_text())
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
