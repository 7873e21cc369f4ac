"""
Pytest configuration and shared fixtures
"""
import json
from typing import Callable, List, Tuple

import pytest

from app.algorithms.backends import BitBackend, LimitBackend
from app.main import main
from app.models.graph import FiniteGraph
from app.models.groups import AmalgamGroup, CyclicGroup, FiniteTableGroup, HNNGroup, trivial_group
from app.models.terms import Base
from app.services.verification_suites import free_product_z_z, free_product_z_z2, hnn_over_modular, modular_group


@pytest.fixture
def bit() -> BitBackend:
    return BitBackend()


@pytest.fixture
def path_seed() -> FiniteGraph:
    """b0 - b1, b2 aislado."""
    return FiniteGraph.from_pairs([Base(0), Base(1), Base(2)], [(Base(0), Base(1))])


@pytest.fixture
def small_limit() -> LimitBackend:
    """Límite de una semilla sin aristas de dos vértices (l=1)."""
    return LimitBackend(FiniteGraph.from_pairs([Base(0), Base(1)], []))


@pytest.fixture
def z_z() -> AmalgamGroup:
    return free_product_z_z()


@pytest.fixture
def z_z2() -> AmalgamGroup:
    return free_product_z_z2()


@pytest.fixture
def z2_z3() -> AmalgamGroup:
    return modular_group()


@pytest.fixture
def hnn_group() -> HNNGroup:
    return hnn_over_modular()


@pytest.fixture
def integers() -> CyclicGroup:
    return CyclicGroup("Z", letter="a")


@pytest.fixture
def z3() -> FiniteTableGroup:
    return FiniteTableGroup.cyclic("Z3", 3, letter="r")


@pytest.fixture
def trivial():
    return trivial_group()


@pytest.fixture
def seed_file(tmp_path) -> str:
    path = tmp_path / "seed.json"
    path.write_text(json.dumps({"vertices": 3, "edges": [[0, 1]]}), encoding="utf-8")
    return str(path)


@pytest.fixture
def write_config(tmp_path) -> Callable[[dict], str]:
    """Escribe un documento de configuración y devuelve su ruta."""

    def _write(document: dict, name: str = "config.json") -> str:
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return str(path)

    return _write


@pytest.fixture
def amalgam_config() -> dict:
    """ℤ∗ℤ con Σ trivial, dos pasos alternados."""
    return {
        "groups": [
            {"name": "Za", "kind": "cyclic", "letter": "a"},
            {"name": "Zb", "kind": "cyclic", "letter": "b"},
            {"name": "One", "kind": "table", "elements": ["e"], "table": [["e"]]},
            {"name": "G", "kind": "amalgam", "factors": ["Za", "Zb"], "sigma": "One", "embeddings": [["1"], ["1"]]},
        ],
        "setup": {"kind": "amalgam", "group": "G"},
        "budgets": {"steps": 2},
    }


@pytest.fixture
def run_cli(capsys) -> Callable[[List[str]], Tuple[int, object]]:
    """Ejecuta la CLI con --json y devuelve (código de salida, JSON de stdout)."""

    def _run(argv: List[str]) -> Tuple[int, object]:
        code = main([*argv, "--json"])
        out = capsys.readouterr().out.strip()
        return code, json.loads(out) if out else None

    return _run
