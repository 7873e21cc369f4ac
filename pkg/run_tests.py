"""
Script de ejemplo para ejecutar tests
"""
import subprocess
import sys

SUITES = {
    "all": ("🧪 Ejecutando suite completa de tests...", ["pytest", "--cov=app", "--cov-report=html", "--cov-report=term"]),
    "unit": ("🧩 Ejecutando tests unitarios...", ["pytest", "tests/unit/"]),
    "integration": ("🔗 Ejecutando tests de integración...", ["pytest", "tests/integration/", "tests/black_box/"]),
    "concurrency": ("⚡ Ejecutando tests de concurrencia...", ["pytest", "tests/concurrency/"]),
    "quick": ("⚡ Ejecutando tests rápidos...", ["pytest", "-m", "not slow", "--tb=short"]),
}


def run(command: str) -> int:
    message, argv = SUITES[command]
    print(message)
    return subprocess.run(argv).returncode


if __name__ == "__main__":
    if len(sys.argv) > 1:
        command = sys.argv[1]
        if command in SUITES:
            exit_code = run(command)
        else:
            print(f"❌ Comando desconocido: {command}")
            print(f"Comandos disponibles: {', '.join(SUITES)}")
            exit_code = 1
    else:
        print(f"📋 Uso: python run_tests.py [{'|'.join(SUITES)}]")
        print("")
        print("Comandos:")
        print("  all          - Ejecutar todos los tests con cobertura")
        print("  unit         - Ejecutar solo tests unitarios")
        print("  integration  - Ejecutar tests de integración y caja negra")
        print("  concurrency  - Ejecutar solo tests de concurrencia")
        print("  quick        - Ejecutar tests sin los marcados como slow")
        exit_code = 0

    sys.exit(exit_code)
