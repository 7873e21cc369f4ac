"""
Descriptores de grupo con formas normales canónicas.

Tipos soportados: tabla finita, cíclico (finito o infinito), libre de rango k,
producto amalgamado sobre Σ finito (producto libre si Σ es trivial) y
extensión HNN sobre Σ finito. Cada elemento vive en su forma normal, así que
la igualdad de elementos es igualdad estructural.
"""
import re
from abc import ABC, abstractmethod
from collections import deque
from itertools import islice
from typing import Dict, Hashable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy.combinatorics import Permutation
from sympy.combinatorics.free_groups import free_group

from ..config import settings
from ..exceptions import GroupTableInvalid, InvalidLetter

_TOKEN = re.compile(r"\((-?\d+)_([A-Za-z]\w*)\)|([A-Za-z]\w*)(?:\^(-?\d+))?|(1)(?![\w^])")
_SEPARATORS = re.compile(r"[\s*·]+")


class GroupElem:
    """Elemento de un grupo, guardado en forma normal."""

    __slots__ = ("group", "nf", "_hash")

    def __init__(self, group: "GroupDescriptor", nf: Hashable):
        self.group = group
        self.nf = nf
        self._hash = hash((id(group), nf))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, GroupElem)
            and self.group is other.group
            and self._hash == other._hash
            and self.nf == other.nf
        )

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    def __mul__(self, other: "GroupElem") -> "GroupElem":
        return self.group.multiply(self, other)

    def __pow__(self, k: int) -> "GroupElem":
        base = self if k >= 0 else self.inverse()
        result = self.group.identity()
        for _ in range(abs(k)):
            result = result * base
        return result

    def inverse(self) -> "GroupElem":
        return self.group.inverse(self)

    @property
    def is_identity(self) -> bool:
        return self == self.group.identity()

    def sort_key(self) -> tuple:
        return self.group.sort_key(self)

    def __repr__(self) -> str:
        return f"GroupElem({self.group.name}: {self})"

    def __str__(self) -> str:
        return self.group.format(self)


class GroupDescriptor(ABC):
    """
    Interfaz común de los grupos soportados.

    Las subclases implementan las operaciones sobre formas normales; esta
    clase aporta parseo de palabras, enumeración BFS y órdenes de elementos.
    """

    kind = "abstract"

    def __init__(self, name: str):
        self.name = name
        self._identity = None

    # --- operaciones sobre formas normales -------------------------------
    @abstractmethod
    def _identity_nf(self) -> Hashable:
        ...

    @abstractmethod
    def _mul_nf(self, a: Hashable, b: Hashable) -> Hashable:
        ...

    @abstractmethod
    def _inv_nf(self, a: Hashable) -> Hashable:
        ...

    @abstractmethod
    def _sort_key_nf(self, a: Hashable) -> tuple:
        ...

    @abstractmethod
    def _tokens_nf(self, a: Hashable) -> List[str]:
        ...

    @abstractmethod
    def letters(self) -> Dict[str, GroupElem]:
        """Generadores con nombre, en el orden usado para enumerar."""

    @abstractmethod
    def is_finite(self) -> bool:
        ...

    # --- API pública -----------------------------------------------------
    def elem(self, nf: Hashable) -> GroupElem:
        return GroupElem(self, nf)

    def identity(self) -> GroupElem:
        if self._identity is None:
            self._identity = GroupElem(self, self._identity_nf())
        return self._identity

    def multiply(self, a: GroupElem, b: GroupElem) -> GroupElem:
        self._check(a)
        self._check(b)
        return GroupElem(self, self._mul_nf(a.nf, b.nf))

    def inverse(self, a: GroupElem) -> GroupElem:
        self._check(a)
        return GroupElem(self, self._inv_nf(a.nf))

    def sort_key(self, a: GroupElem) -> tuple:
        return self._sort_key_nf(a.nf)

    def format(self, a: GroupElem) -> str:
        tokens = self._tokens_nf(a.nf)
        return " ".join(tokens) if tokens else "1"

    def product(self, elems: Sequence[GroupElem]) -> GroupElem:
        result = self.identity()
        for g in elems:
            result = result * g
        return result

    def order(self) -> Optional[int]:
        if not self.is_finite():
            return None
        return len(self.elements())

    def elements(self) -> List[GroupElem]:
        if not self.is_finite():
            raise GroupTableInvalid(f"El grupo {self.name} es infinito; no se pueden listar sus elementos")
        return list(self.enumerate())

    def enumerate(self, limit: Optional[int] = None) -> Iterator[GroupElem]:
        """
        Enumera elementos por longitud de palabra y luego por orden de
        generadores (BFS desde la identidad, multiplicando a la derecha).
        """
        iterator = self._bfs()
        if limit is not None:
            iterator = islice(iterator, limit)
        return iterator

    def _bfs(self) -> Iterator[GroupElem]:
        generators = []
        for g in self.letters().values():
            generators.append(g)
            inv = g.inverse()
            if inv != g:
                generators.append(inv)
        start = self.identity()
        seen = {start}
        queue = deque([start])
        yield start
        while queue:
            g = queue.popleft()
            for s in generators:
                h = g * s
                if h not in seen:
                    seen.add(h)
                    queue.append(h)
                    yield h

    def order_of(self, g: GroupElem) -> Optional[int]:
        """Orden de g; None si supera la cota de torsión en grupos infinitos."""
        bound = self.order() if self.is_finite() else settings.RADO_MAX_TORSION
        power = g
        for k in range(1, bound + 1):
            if power.is_identity:
                return k
            power = power * g
        return None

    def parse_word(self, text: str) -> GroupElem:
        """
        Parsea una palabra: letras `x`, potencias `x^k` o sílabas `(k_x)`,
        separadas por espacios o `*`. `1` es la identidad.

        Raises:
            InvalidLetter si una letra no pertenece al grupo
        """
        letters = self.letters()
        result = self.identity()
        text = text.strip()
        if not text:
            return result
        for chunk in _SEPARATORS.split(text):
            if not chunk:
                continue
            pos = 0
            while pos < len(chunk):
                match = _TOKEN.match(chunk, pos)
                if not match or match.end() == pos:
                    raise InvalidLetter(f"Símbolo no reconocido en '{chunk}' para el grupo {self.name}")
                pos = match.end()
                if match.group(5):
                    continue
                if match.group(2):
                    name, exponent = match.group(2), int(match.group(1))
                else:
                    name, exponent = match.group(3), int(match.group(4) or 1)
                result = result * self._letter_power(letters, name, exponent)
        return result

    def normal_form(self, word: Union[str, Sequence[Tuple[str, int]], GroupElem]) -> GroupElem:
        """Forma normal de una palabra cruda (texto o lista de (letra, exponente))."""
        if isinstance(word, GroupElem):
            self._check(word)
            return word
        if isinstance(word, str):
            return self.parse_word(word)
        letters = self.letters()
        result = self.identity()
        for name, exponent in word:
            result = result * self._letter_power(letters, name, exponent)
        return result

    def _letter_power(self, letters: Dict[str, GroupElem], name: str, exponent: int) -> GroupElem:
        if name not in letters:
            raise InvalidLetter(f"La letra '{name}' no pertenece al grupo {self.name}", letter=name)
        return letters[name] ** exponent

    def _check(self, a: GroupElem) -> None:
        if not isinstance(a, GroupElem) or a.group is not self:
            raise InvalidLetter(f"{a!r} no es un elemento de {self.name}")

    def to_dict(self) -> dict:
        return {"name": self.name, "kind": self.kind, "finite": self.is_finite()}

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name})"


# ---------------------------------------------------------------------------
# Grupos finitos por tabla
# ---------------------------------------------------------------------------

class FiniteTableGroup(GroupDescriptor):
    """Grupo finito dado por su tabla de multiplicación (validada con numpy)."""

    kind = "table"

    def __init__(self, name: str, element_names: Sequence[str], table):
        super().__init__(name)
        self.element_names = list(element_names)
        self.table = np.asarray(table, dtype=np.int64)
        self._e = self._validate()
        self._inv = [int(np.where(self.table[a] == self._e)[0][0]) for a in range(len(self.element_names))]
        self._by_name = {n: i for i, n in enumerate(self.element_names)}
        self.permutations: Optional[List[Permutation]] = None

    def _validate(self) -> int:
        n = len(self.element_names)
        t = self.table
        if n == 0 or t.shape != (n, n):
            raise GroupTableInvalid(f"La tabla de {self.name} debe ser {n}x{n}")
        if len(set(self.element_names)) != n:
            raise GroupTableInvalid(f"Nombres de elementos repetidos en {self.name}")
        for name in self.element_names:
            if not re.fullmatch(r"[A-Za-z]\w*", name):
                raise GroupTableInvalid(f"Nombre de elemento inválido: '{name}'")
        if t.min() < 0 or t.max() >= n:
            raise GroupTableInvalid(f"Entradas fuera de rango en la tabla de {self.name}")
        full = np.arange(n)
        # Cuadrado latino: cada fila y cada columna es una permutación
        if not all(np.array_equal(np.sort(t[i]), full) for i in range(n)):
            raise GroupTableInvalid(f"La tabla de {self.name} no es un cuadrado latino (filas)")
        if not all(np.array_equal(np.sort(t[:, j]), full) for j in range(n)):
            raise GroupTableInvalid(f"La tabla de {self.name} no es un cuadrado latino (columnas)")
        identities = [e for e in range(n) if np.array_equal(t[e], full) and np.array_equal(t[:, e], full)]
        if not identities:
            raise GroupTableInvalid(f"La tabla de {self.name} no tiene identidad")
        # Asociatividad: t[t[a,b],c] == t[a,t[b,c]]
        left = t[t]
        right = t[full[:, None, None], t[None, :, :]]
        if not np.array_equal(left, right):
            raise GroupTableInvalid(f"La tabla de {self.name} no es asociativa")
        return identities[0]

    @classmethod
    def cyclic(cls, name: str, n: int, letter: str = "c") -> "FiniteTableGroup":
        names = ["e"] + [f"{letter}{k}" for k in range(1, n)]
        table = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
        return cls(name, names, table)

    @classmethod
    def from_permutations(cls, name: str, generators: Sequence[Permutation], prefix: str = "p") -> "FiniteTableGroup":
        """
        Grupo generado por permutaciones de sympy. El producto a·b actúa
        como a(b(x)), así que corresponde a `b * a` en la convención de sympy.
        """
        size = max([g.size for g in generators] + [1])
        identity = Permutation(list(range(size)))
        perms = [identity]
        index = {identity: 0}
        queue = deque([identity])
        while queue:
            p = queue.popleft()
            for g in generators:
                q = Permutation(g.array_form + list(range(g.size, size))) * p
                if q not in index:
                    index[q] = len(perms)
                    perms.append(q)
                    queue.append(q)
        n = len(perms)
        table = np.zeros((n, n), dtype=np.int64)
        for i, a in enumerate(perms):
            for j, b in enumerate(perms):
                table[i, j] = index[b * a]
        names = ["e"] + [f"{prefix}{k}" for k in range(1, n)]
        group = cls(name, names, table)
        group.permutations = perms
        return group

    def permutation(self, g: GroupElem) -> Permutation:
        if self.permutations is None:
            raise GroupTableInvalid(f"{self.name} no tiene permutaciones asociadas")
        return self.permutations[g.nf]

    def element(self, name: str) -> GroupElem:
        if name not in self._by_name:
            raise InvalidLetter(f"'{name}' no es un elemento de {self.name}")
        return self.elem(self._by_name[name])

    def _identity_nf(self):
        return self._e

    def _mul_nf(self, a, b):
        return int(self.table[a, b])

    def _inv_nf(self, a):
        return self._inv[a]

    def _sort_key_nf(self, a):
        return (0 if a == self._e else 1, a)

    def _tokens_nf(self, a):
        return [] if a == self._e else [self.element_names[a]]

    def letters(self):
        return {n: self.elem(i) for i, n in enumerate(self.element_names) if i != self._e}

    def _letter_power(self, letters, name, exponent):
        if name == self.element_names[self._e]:
            return self.identity()
        return super()._letter_power(letters, name, exponent)

    def is_finite(self):
        return True

    def order(self):
        return len(self.element_names)

    def elements(self):
        ordered = [self._e] + [i for i in range(len(self.element_names)) if i != self._e]
        return [self.elem(i) for i in ordered]


# ---------------------------------------------------------------------------
# Grupos cíclicos y libres
# ---------------------------------------------------------------------------

class CyclicGroup(GroupDescriptor):
    """ℤ (order=None) o ℤ/n con un único generador."""

    kind = "cyclic"

    def __init__(self, name: str, order: Optional[int] = None, letter: str = "a"):
        super().__init__(name)
        if order is not None and order < 1:
            raise GroupTableInvalid(f"Orden inválido para {name}: {order}")
        self.n = order
        self.letter = letter

    def _reduce(self, k: int) -> int:
        return k % self.n if self.n else k

    def _identity_nf(self):
        return 0

    def _mul_nf(self, a, b):
        return self._reduce(a + b)

    def _inv_nf(self, a):
        return self._reduce(-a)

    def _sort_key_nf(self, a):
        if self.n is None:
            return (abs(a), 0 if a >= 0 else 1)
        return (min(a, self.n - a), a)

    def _tokens_nf(self, a):
        if a == 0:
            return []
        if a == 1:
            return [self.letter]
        return [f"{self.letter}^{a}"]

    def letters(self):
        if self.n == 1:
            return {}
        return {self.letter: self.elem(self._reduce(1))}

    def power(self, k: int) -> GroupElem:
        return self.elem(self._reduce(k))

    def is_finite(self):
        return self.n is not None

    def order(self):
        return self.n

    def elements(self):
        if self.n is None:
            return super().elements()
        return sorted((self.elem(k) for k in range(self.n)), key=self.sort_key)

    def to_dict(self):
        data = super().to_dict()
        data["order"] = self.n
        return data


class FreeGroup(GroupDescriptor):
    """Grupo libre sobre las letras dadas; formas reducidas vía sympy."""

    kind = "free"

    def __init__(self, name: str, letter_names: Sequence[str]):
        super().__init__(name)
        if not letter_names:
            raise GroupTableInvalid(f"El grupo libre {name} necesita al menos una letra")
        self.letter_names = list(letter_names)
        self._free, *gens = free_group(",".join(self.letter_names))
        self._gens = {n: g for n, g in zip(self.letter_names, gens)}
        self._index = {n: i for i, n in enumerate(self.letter_names)}

    @property
    def rank(self) -> int:
        return len(self.letter_names)

    def generator(self, index: int) -> GroupElem:
        return self.elem(self._gens[self.letter_names[index]])

    def syllables(self, g: GroupElem) -> List[Tuple[int, int]]:
        """Lista (índice de generador, exponente) de izquierda a derecha."""
        return [(self._index[str(sym)], int(exp)) for sym, exp in g.nf.array_form]

    def letter_sequence(self, g: GroupElem) -> List[Tuple[int, int]]:
        """Letras una a una: (índice, ±1), de izquierda a derecha."""
        seq = []
        for index, exp in self.syllables(g):
            sign = 1 if exp > 0 else -1
            seq.extend([(index, sign)] * abs(exp))
        return seq

    def from_letters(self, letters: Sequence[Tuple[int, int]]) -> GroupElem:
        result = self._free.identity
        for index, sign in letters:
            result = result * self._gens[self.letter_names[index]] ** sign
        return self.elem(result)

    def is_cyclically_reduced(self, g: GroupElem) -> bool:
        return bool(g.nf.is_cyclically_reduced())

    def word_length(self, g: GroupElem) -> int:
        return len(g.nf)

    def _identity_nf(self):
        return self._free.identity

    def _mul_nf(self, a, b):
        return a * b

    def _inv_nf(self, a):
        return a ** -1

    def _sort_key_nf(self, a):
        codes = []
        for sym, exp in a.array_form:
            code = 2 * self._index[str(sym)] + (0 if exp > 0 else 1)
            codes.extend([code] * abs(int(exp)))
        return (len(codes), tuple(codes))

    def _tokens_nf(self, a):
        tokens = []
        for sym, exp in a.array_form:
            tokens.append(str(sym) if exp == 1 else f"{sym}^{int(exp)}")
        return tokens

    def letters(self):
        return {n: self.elem(g) for n, g in self._gens.items()}

    def is_finite(self):
        return False

    def to_dict(self):
        data = super().to_dict()
        data["letters"] = list(self.letter_names)
        return data


# ---------------------------------------------------------------------------
# Subgrupos finitos encajados
# ---------------------------------------------------------------------------

class Embedding:
    """
    Monomorfismo Σ → G dado por la lista de imágenes de Σ.elements().

    Raises:
        GroupTableInvalid si no es un homomorfismo inyectivo
    """

    def __init__(self, source: GroupDescriptor, target: GroupDescriptor, images: Sequence[GroupElem]):
        self.source = source
        self.target = target
        elements = source.elements()
        if len(images) != len(elements):
            raise GroupTableInvalid(
                f"El encaje {source.name}→{target.name} necesita {len(elements)} imágenes"
            )
        self._forward = dict(zip(elements, images))
        self._backward = {}
        for s, img in self._forward.items():
            if img.group is not target:
                raise GroupTableInvalid(f"La imagen {img} no pertenece a {target.name}")
            if img in self._backward:
                raise GroupTableInvalid(f"El encaje {source.name}→{target.name} no es inyectivo")
            self._backward[img] = s
        for a in elements:
            for b in elements:
                if self._forward[a * b] != self._forward[a] * self._forward[b]:
                    raise GroupTableInvalid(
                        f"El encaje {source.name}→{target.name} no es un homomorfismo en ({a}, {b})"
                    )

    def __call__(self, s: GroupElem) -> GroupElem:
        return self._forward[s]

    def contains(self, g: GroupElem) -> bool:
        return g in self._backward

    def preimage(self, g: GroupElem) -> GroupElem:
        return self._backward[g]

    def image(self) -> List[GroupElem]:
        return list(self._forward.values())

    def items(self):
        return self._forward.items()


def _coset_decompose(x: GroupElem, embedding: Embedding, cache: Dict) -> Tuple[GroupElem, GroupElem]:
    """
    Escribe x = t·e(s) con t el representante mínimo (por sort_key) de x·e(Σ).
    """
    if x in cache:
        return cache[x]
    best = None
    for s, es in embedding.items():
        candidate = x * es
        key = candidate.sort_key()
        if best is None or key < best[0]:
            best = (key, candidate, s)
    _, rep, s_prime = best
    result = (rep, s_prime.inverse())
    cache[x] = result
    return result


# ---------------------------------------------------------------------------
# Producto amalgamado
# ---------------------------------------------------------------------------

class AmalgamGroup(GroupDescriptor):
    """
    Γ₁ ∗_Σ Γ₂ con Σ finito. Forma normal: (t₁,…,t_m, σ) con tⱼ
    representantes de coclases izquierdas tⱼΣ en factores alternados.
    Si Σ es trivial es el producto libre.
    """

    kind = "amalgam"

    def __init__(
        self,
        name: str,
        factors: Tuple[GroupDescriptor, GroupDescriptor],
        sigma: GroupDescriptor,
        embeddings: Tuple[Sequence[GroupElem], Sequence[GroupElem]],
    ):
        super().__init__(name)
        if not sigma.is_finite():
            raise GroupTableInvalid(f"Σ debe ser finito en {name}")
        self.factors = tuple(factors)
        self.sigma = sigma
        self.embeddings = tuple(Embedding(sigma, f, imgs) for f, imgs in zip(self.factors, embeddings))
        letters_0 = set(self.factors[0].letters())
        letters_1 = set(self.factors[1].letters())
        if letters_0 & letters_1:
            raise GroupTableInvalid(f"Los factores de {name} comparten letras: {sorted(letters_0 & letters_1)}")
        self._caches = ({}, {})
        self._letter_factor = {n: 0 for n in letters_0}
        self._letter_factor.update({n: 1 for n in letters_1})

    # --- normal forms ---
    def _rmul(self, state, i: int, x: GroupElem):
        syllables, sigma = state
        y = self.embeddings[i](sigma) * x
        if syllables and syllables[-1][0] == i:
            y = syllables[-1][1] * y
            syllables = syllables[:-1]
        t, s = _coset_decompose(y, self.embeddings[i], self._caches[i])
        if not t.is_identity:
            syllables = syllables + ((i, t),)
        return (syllables, s)

    def _identity_nf(self):
        return ((), self.sigma.identity())

    def _mul_nf(self, a, b):
        state = a
        for i, t in b[0]:
            state = self._rmul(state, i, t)
        return (state[0], state[1] * b[1])

    def _inv_nf(self, a):
        syllables, sigma = a
        state = ((), sigma.inverse())
        for i, t in reversed(syllables):
            state = self._rmul(state, i, t.inverse())
        return state

    def _sort_key_nf(self, a):
        syllables, sigma = a
        return (len(syllables), tuple((i, t.sort_key()) for i, t in syllables), sigma.sort_key())

    def _tokens_nf(self, a):
        syllables, sigma = a
        tokens = []
        for i, t in syllables:
            tokens.extend(self.factors[i]._tokens_nf(t.nf))
        if not sigma.is_identity:
            tokens.extend(self.factors[0]._tokens_nf(self.embeddings[0](sigma).nf))
        return tokens

    def letters(self):
        result = {}
        for i, factor in enumerate(self.factors):
            for n, g in factor.letters().items():
                result[n] = self.embed(i, g)
        return result

    def is_finite(self):
        index = [f.order() // self.sigma.order() if f.is_finite() else None for f in self.factors]
        if index[0] == 1:
            return self.factors[1].is_finite()
        if index[1] == 1:
            return self.factors[0].is_finite()
        return False

    def order(self):
        if not self.is_finite():
            return None
        return super().order()

    # --- API específica ---
    def embed(self, i: int, x: GroupElem) -> GroupElem:
        """Imagen de x ∈ Γ_{i+1} en el amalgama."""
        return self.elem(self._rmul(self._identity_nf(), i, x))

    def sigma_element(self, s: GroupElem) -> GroupElem:
        return self.elem(((), s))

    def sigma_elements(self) -> List[GroupElem]:
        return [self.sigma_element(s) for s in self.sigma.elements()]

    def syllable_length(self, g: GroupElem) -> int:
        return len(g.nf[0])

    def factor_of(self, g: GroupElem) -> Optional[int]:
        """Índice del factor que contiene a g, o None si g tiene longitud ≥ 2."""
        syllables, _ = g.nf
        if not syllables:
            return 0
        if len(syllables) == 1:
            return syllables[0][0]
        return None

    def reduced_expression(self, g: GroupElem) -> List[Tuple[int, GroupElem]]:
        """
        Sílabas (factor, elemento) de izquierda a derecha; Σ se absorbe en la
        última sílaba. Ninguna sílaba está en Σ.
        """
        syllables, sigma = g.nf
        if not syllables:
            return [] if sigma.is_identity else [(0, self.embeddings[0](sigma))]
        result = list(syllables[:-1])
        i, t = syllables[-1]
        result.append((i, t * self.embeddings[i](sigma)))
        return result

    def to_dict(self):
        data = super().to_dict()
        data.update({"factors": [f.name for f in self.factors], "sigma": self.sigma.name})
        return data


# ---------------------------------------------------------------------------
# Extensión HNN
# ---------------------------------------------------------------------------

class HNNGroup(GroupDescriptor):
    """
    HNN(H, Σ, θ) con t e(σ) t⁻¹ = θ(σ). Forma normal de Britton:
    c₀ t^ε₁ c₁ … t^εₙ h, con cⱼ representantes de coclase respecto al
    subgrupo que exige la letra siguiente y sin pinzas t e(σ) t⁻¹ ni
    t⁻¹ θ(σ) t.
    """

    kind = "hnn"

    def __init__(
        self,
        name: str,
        base: GroupDescriptor,
        sigma: GroupDescriptor,
        embedding: Sequence[GroupElem],
        theta: Sequence[GroupElem],
        stable_letter: str = "t",
    ):
        super().__init__(name)
        if not sigma.is_finite():
            raise GroupTableInvalid(f"Σ debe ser finito en {name}")
        self.base = base
        self.sigma = sigma
        self.embedding = Embedding(sigma, base, embedding)
        self.theta = Embedding(sigma, base, theta)
        self.stable_letter = stable_letter
        if stable_letter in base.letters():
            raise GroupTableInvalid(f"La letra estable '{stable_letter}' ya es una letra de {base.name}")
        self._cache_plus = {}
        self._cache_minus = {}

    def _rmul_h(self, state, h: GroupElem):
        pairs, last = state
        return (pairs, last * h)

    def _rmul_t(self, state, eps: int):
        pairs, last = state
        if pairs:
            c_prev, e_prev = pairs[-1]
            if e_prev == 1 and eps == -1 and self.embedding.contains(last):
                s = self.embedding.preimage(last)
                return (pairs[:-1], c_prev * self.theta(s))
            if e_prev == -1 and eps == 1 and self.theta.contains(last):
                s = self.theta.preimage(last)
                return (pairs[:-1], c_prev * self.embedding(s))
        if eps == 1:
            # c θ(s) t = c t e(s)
            c, s = _coset_decompose(last, self.theta, self._cache_plus)
            return (pairs + ((c, 1),), self.embedding(s))
        # c e(s) t⁻¹ = c t⁻¹ θ(s)
        c, s = _coset_decompose(last, self.embedding, self._cache_minus)
        return (pairs + ((c, -1),), self.theta(s))

    def _identity_nf(self):
        return ((), self.base.identity())

    def _mul_nf(self, a, b):
        state = a
        for c, eps in b[0]:
            state = self._rmul_h(state, c)
            state = self._rmul_t(state, eps)
        return self._rmul_h(state, b[1])

    def _inv_nf(self, a):
        pairs, last = a
        state = ((), last.inverse())
        for c, eps in reversed(pairs):
            state = self._rmul_t(state, -eps)
            state = self._rmul_h(state, c.inverse())
        return state

    def _sort_key_nf(self, a):
        pairs, last = a
        return (len(pairs), tuple((c.sort_key(), eps) for c, eps in pairs), last.sort_key())

    def _tokens_nf(self, a):
        pairs, last = a
        tokens = []
        for c, eps in pairs:
            tokens.extend(self.base._tokens_nf(c.nf))
            tokens.append(self.stable_letter if eps == 1 else f"{self.stable_letter}^-1")
        tokens.extend(self.base._tokens_nf(last.nf))
        return tokens

    def letters(self):
        result = {n: self.embed_base(g) for n, g in self.base.letters().items()}
        result[self.stable_letter] = self.stable(1)
        return result

    def is_finite(self):
        return False

    # --- API específica ---
    def embed_base(self, h: GroupElem) -> GroupElem:
        return self.elem(((), h))

    def stable(self, eps: int = 1) -> GroupElem:
        return self.elem(self._rmul_t(self._identity_nf(), eps))

    def sigma_pairs(self) -> List[Tuple[GroupElem, GroupElem]]:
        """Pares (e(σ), θ(σ)) como elementos del HNN, en el orden de Σ."""
        return [
            (self.embed_base(self.embedding(s)), self.embed_base(self.theta(s)))
            for s in self.sigma.elements()
        ]

    def t_length(self, g: GroupElem) -> int:
        return len(g.nf[0])

    def britton_expression(self, g: GroupElem) -> Tuple[List[GroupElem], List[int]]:
        """
        (h, ε) con g = h[0] t^ε[0] h[1] … t^ε[n-1] h[n], de izquierda a derecha.
        """
        pairs, last = g.nf
        return [c for c, _ in pairs] + [last], [eps for _, eps in pairs]

    def to_dict(self):
        data = super().to_dict()
        data.update({"base": self.base.name, "sigma": self.sigma.name, "stable_letter": self.stable_letter})
        return data


def trivial_group(name: str = "1") -> CyclicGroup:
    return CyclicGroup(name, order=1)
