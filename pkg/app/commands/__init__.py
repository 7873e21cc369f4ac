"""
Subcomandos de la CLI. Cada módulo expone `register(subparsers, parents)` y
sus manejadores devuelven un CommandResult: el payload JSON, el texto plano
y el código de salida.
"""
import argparse
from dataclasses import dataclass, field
from typing import Any, List, Optional


@dataclass
class CommandResult:
    payload: Any
    text: str = ""
    exit_code: int = 0
    lines: List[str] = field(default_factory=list)

    def render_text(self) -> str:
        if self.text:
            return self.text
        return "\n".join(self.lines)


def common_options() -> argparse.ArgumentParser:
    """Opciones presentes en todos los subcomandos."""
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--json", action="store_true", help="salida JSON para scripts")
    parent.add_argument("--verbose", "-v", action="store_true", help="logs INFO en stderr")
    return parent


def add_config(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument("--config", "-c", required=required, help="archivo JSON de configuración")


def backend_option(parser: argparse.ArgumentParser, default: Optional[str] = "bit") -> None:
    parser.add_argument("--backend", "-b", default=default, help="bit | limit:<semilla>:<l>")


def exit_code_for(status: str) -> int:
    return {"passed": 0, "failed": 1, "inconclusive": 3}.get(status, 1)
