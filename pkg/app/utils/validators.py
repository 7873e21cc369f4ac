"""
Funciones de validación para argumentos de línea de comandos
"""

from typing import List

from ..exceptions import InvalidInput


def split_vertex_list(text: str) -> List[str]:
    """
    Separa una lista `a,b,c` respetando comas dentro de `{...}` y `b(...)`.

    Args:
        text: Lista separada por comas (puede ser vacía)

    Returns:
        Cadenas de vértice sin espacios sobrantes
    """
    text = text.strip()
    if not text:
        return []
    items, depth, start = [], 0, 0
    for idx, ch in enumerate(text):
        if ch in "{(":
            depth += 1
        elif ch in "})":
            depth -= 1
            if depth < 0:
                raise InvalidInput(f"Paréntesis desbalanceados en '{text}'")
        elif ch == "," and depth == 0:
            items.append(text[start:idx].strip())
            start = idx + 1
    if depth != 0:
        raise InvalidInput(f"Paréntesis desbalanceados en '{text}'")
    items.append(text[start:].strip())
    if any(not item for item in items):
        raise InvalidInput(f"Elemento vacío en la lista '{text}'")
    return items


def parse_vertices(text: str, backend) -> List:
    """
    Valida cada vértice de la lista contra el backend.

    Raises:
        InvalidVertex si alguna cadena no es un vértice del backend
    """
    return [backend.parse_vertex(item) for item in split_vertex_list(text)]


def parse_mapping(text: str, backend) -> dict:
    """
    Parsea un isomorfismo parcial `x:y,x2:y2` (la última `:` de cada par separa).

    Raises:
        InvalidInput si un par no tiene `:` o un dominio se repite
    """
    pairs = {}
    for item in split_vertex_list(text):
        x_text, sep, y_text = item.rpartition(":")
        if not sep or not x_text:
            raise InvalidInput(f"Par inválido '{item}' (se espera x:y)")
        x = backend.parse_vertex(x_text)
        if x in pairs:
            raise InvalidInput(f"El vértice {x_text} aparece dos veces en el dominio")
        pairs[x] = backend.parse_vertex(y_text)
    return pairs


def positive_int(value) -> int:
    """
    Entero positivo para budgets, ventanas y pasos.

    Raises:
        InvalidInput si no es un entero mayor que cero
    """
    try:
        number = int(value)
    except (TypeError, ValueError):
        raise InvalidInput(f"'{value}' no es un entero") from None
    if number <= 0:
        raise InvalidInput(f"Se esperaba un entero positivo, no {number}")
    return number
