"""
Términos de vértice.

Dos familias de vértices:
- Naturales del modelo BIT: `int` o `Tower` cuando alguna posición de bit es
  demasiado grande para materializar el entero.
- Términos del límite inductivo: `Base` (vértice de la semilla) y `SetTerm`
  (conjunto finito de términos de etapa menor).
"""
import re
from typing import Iterable, Iterator, List, Optional, Tuple, Union

from ..config import settings
from ..exceptions import InvalidVertex

INT_LIMIT = settings.RADO_BIT_INT_LIMIT


class Tower:
    """
    Natural 2^e1 + 2^e2 + ... con exponentes e1 > e2 > ... (int o Tower).

    Solo se usa cuando el valor no cabe bajo INT_LIMIT bits, así que toda
    Tower es mayor que cualquier int normalizado.
    """

    __slots__ = ("exponents", "exponent_set", "_hash")

    def __init__(self, exponents: Iterable["Nat"]):
        ordered = tuple(sorted(set(exponents), reverse=True))
        self.exponents = ordered
        self.exponent_set = frozenset(ordered)
        self._hash = hash(("tower", ordered))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Tower):
            return False
        return self._hash == other._hash and self.exponents == other.exponents

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    def __lt__(self, other) -> bool:
        if isinstance(other, Tower):
            return self.exponents < other.exponents
        if isinstance(other, int):
            return False
        return NotImplemented

    def __le__(self, other) -> bool:
        return self == other or self.__lt__(other)

    def __gt__(self, other) -> bool:
        if isinstance(other, Tower):
            return self.exponents > other.exponents
        if isinstance(other, int):
            return True
        return NotImplemented

    def __ge__(self, other) -> bool:
        return self == other or self.__gt__(other)

    def __repr__(self) -> str:
        return f"Tower({format_nat(self)})"

    def __str__(self) -> str:
        return format_nat(self)


Nat = Union[int, Tower]


def is_nat(value) -> bool:
    if isinstance(value, bool):
        return False
    if isinstance(value, int):
        return value >= 0
    return isinstance(value, Tower)


def int_bits(n: int) -> Iterator[int]:
    """Posiciones de los bits a 1 de n, en orden creciente."""
    while n:
        low = n & -n
        yield low.bit_length() - 1
        n ^= low


def normalize_nat(n: Nat) -> Nat:
    """Convierte enteros demasiado grandes a Tower."""
    if isinstance(n, int) and n.bit_length() > INT_LIMIT:
        return Tower(int_bits(n))
    return n


def nat_from_exponents(exponents: Iterable[Nat]) -> Nat:
    exps = set(exponents)
    if all(isinstance(e, int) and e < INT_LIMIT for e in exps):
        total = 0
        for e in exps:
            total |= 1 << e
        return total
    return Tower(exps)


def nat_bits(n: Nat) -> List[Nat]:
    if isinstance(n, Tower):
        return sorted(n.exponent_set)
    return list(int_bits(n))


def has_bit(n: Nat, m: Nat) -> bool:
    """True si la posición m aparece en la expansión binaria de n."""
    if isinstance(n, Tower):
        return m in n.exponent_set
    if isinstance(m, Tower):
        return False
    return m < n.bit_length() and (n >> m) & 1 == 1


def format_nat(n: Nat) -> str:
    if isinstance(n, int):
        return str(n)
    parts = []
    for e in n.exponents:
        if isinstance(e, int):
            parts.append(f"2^{e}")
        else:
            parts.append(f"2^({format_nat(e)})")
    return "+".join(parts)


def parse_nat(text: str) -> Nat:
    text = text.strip()
    if text.isdigit():
        return normalize_nat(int(text))
    value, pos = _parse_sum(text, 0)
    if pos != len(text):
        raise InvalidVertex(f"Vértice BIT mal formado: '{text}'")
    return value


def _parse_sum(text: str, pos: int) -> Tuple[Nat, int]:
    exponents = []
    while True:
        if not text.startswith("2^", pos):
            raise InvalidVertex(f"Se esperaba '2^' en la posición {pos} de '{text}'")
        pos += 2
        if pos < len(text) and text[pos] == "(":
            inner, pos = _parse_sum(text, pos + 1)
            if pos >= len(text) or text[pos] != ")":
                raise InvalidVertex(f"Paréntesis sin cerrar en '{text}'")
            pos += 1
            exponents.append(inner)
        else:
            match = re.compile(r"\d+").match(text, pos)
            if not match:
                raise InvalidVertex(f"Exponente inválido en '{text}'")
            exponents.append(normalize_nat(int(match.group())))
            pos = match.end()
        if pos < len(text) and text[pos] == "+":
            pos += 1
            continue
        break
    if len(set(exponents)) != len(exponents):
        raise InvalidVertex(f"Exponentes repetidos en '{text}'")
    return nat_from_exponents(exponents), pos


# ---------------------------------------------------------------------------
# Términos del límite inductivo
# ---------------------------------------------------------------------------

class Base:
    """Vértice de la semilla: índice entero o elemento de grupo."""

    __slots__ = ("key", "_hash", "_sort_key")
    stage = 0

    def __init__(self, key):
        self.key = key
        self._hash = hash(("base", key))
        if isinstance(key, int):
            self._sort_key = (0, (key,))
        else:
            self._sort_key = (0, key.sort_key())

    @property
    def sort_key(self) -> tuple:
        return self._sort_key

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        return isinstance(other, Base) and self._hash == other._hash and self.key == other.key

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    def __repr__(self) -> str:
        return f"Base({self})"

    def __str__(self) -> str:
        if isinstance(self.key, int):
            return f"b{self.key}"
        return f"b({self.key})"


class SetTerm:
    """Conjunto finito no vacío de términos de etapa estrictamente menor."""

    __slots__ = ("stage", "members", "_hash", "_sort_key", "_ordered")

    def __init__(self, stage: int, members: Iterable["VertexTerm"]):
        members = frozenset(members)
        if not members:
            raise InvalidVertex("Un SetTerm necesita al menos un miembro")
        if not isinstance(stage, int) or stage < 1:
            raise InvalidVertex(f"Etapa inválida: {stage}")
        for m in members:
            if not isinstance(m, (Base, SetTerm)):
                raise InvalidVertex(f"Miembro inválido: {m!r}")
            if m.stage >= stage:
                raise InvalidVertex(f"El miembro {m} no tiene etapa menor que {stage}")
        self.stage = stage
        self.members = members
        self._ordered = tuple(sorted(members, key=term_key))
        self._sort_key = (stage, tuple(m.sort_key for m in self._ordered))
        self._hash = hash(("set", stage, members))

    @property
    def sort_key(self) -> tuple:
        return self._sort_key

    @property
    def ordered_members(self) -> Tuple["VertexTerm", ...]:
        return self._ordered

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, SetTerm)
            and self._hash == other._hash
            and self.stage == other.stage
            and self.members == other.members
        )

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    def __repr__(self) -> str:
        return f"SetTerm({self})"

    def __str__(self) -> str:
        body = "{" + ",".join(str(m) for m in self._ordered) + "}"
        natural_stage = 1 + max(m.stage for m in self.members)
        if self.stage != natural_stage:
            body += f"@{self.stage}"
        return body


LimitTerm = Union[Base, SetTerm]
VertexTerm = Union[int, Tower, Base, SetTerm]


def term_key(term: VertexTerm):
    """Clave de orden canónico (numérico en BIT, estructural en el límite)."""
    if isinstance(term, (Base, SetTerm)):
        return term.sort_key
    return term


def natural_set_term(members: Iterable[LimitTerm]) -> SetTerm:
    members = list(members)
    return SetTerm(1 + max(m.stage for m in members), members)


def format_vertex(term: VertexTerm) -> str:
    if isinstance(term, (Base, SetTerm)):
        return str(term)
    return format_nat(term)


def parse_limit_term(text: str, group=None) -> LimitTerm:
    """
    Parsea `b3`, `b(<palabra>)` o `{t1,t2,...}` con sufijo opcional `@k`.

    Args:
        text: Cadena del vértice
        group: Descriptor de grupo para semillas de grupo (opcional)
    """
    term, pos = _parse_term(text.strip(), 0, group)
    if pos != len(text.strip()):
        raise InvalidVertex(f"Texto sobrante en el vértice '{text}'")
    return term


def _parse_term(text: str, pos: int, group) -> Tuple[LimitTerm, int]:
    if text.startswith("b(", pos):
        end = -1
        depth = 0
        for idx in range(pos + 1, len(text)):
            if text[idx] == "(":
                depth += 1
            elif text[idx] == ")":
                depth -= 1
                if depth == 0:
                    end = idx
                    break
        if end < 0 or group is None:
            raise InvalidVertex(f"Vértice de grupo inválido en '{text}'")
        return Base(group.parse_word(text[pos + 2:end])), end + 1
    if text.startswith("b", pos):
        match = re.compile(r"b(\d+)").match(text, pos)
        if not match:
            raise InvalidVertex(f"Vértice base inválido en '{text}'")
        return Base(int(match.group(1))), match.end()
    if text.startswith("{", pos):
        pos += 1
        members = []
        while True:
            member, pos = _parse_term(text, pos, group)
            members.append(member)
            if pos < len(text) and text[pos] == ",":
                pos += 1
                continue
            break
        if pos >= len(text) or text[pos] != "}":
            raise InvalidVertex(f"Llave sin cerrar en '{text}'")
        pos += 1
        stage = 1 + max(m.stage for m in members)
        match = re.compile(r"@(\d+)").match(text, pos)
        if match:
            stage = int(match.group(1))
            pos = match.end()
        if len(set(members)) != len(members):
            raise InvalidVertex(f"Miembros repetidos en '{text}'")
        return SetTerm(stage, members), pos
    raise InvalidVertex(f"Vértice inválido: '{text}'")
