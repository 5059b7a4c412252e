"""Per-atom level structure and the tensor-product basis.

Each atom carries the qubit states ``q0``/``q1`` and the Rydberg state
``ryd``; optionally a ``leak`` ground state collecting decay out of the
qubit pair, and an auxiliary excited state ``aux_e`` used when the
Stark-shift-compensation fields are modelled explicitly.

Basis ordering (used by every module):

* per-atom levels are ordered ``q0, q1, ryd, leak, aux_e`` (present ones
  only), indexed 0..L-1;
* multi-atom kets are indexed with atom 0 slowest, i.e.
  ``index = l_0 * L**(n-1) + l_1 * L**(n-2) + ... + l_{n-1}``.

Kets are written compactly as strings, one character per atom:
``0 -> q0, 1 -> q1, r -> ryd, 2 -> leak, e -> aux_e``, atom 0 first.
For the three-atom register the control atom is atom 0.
"""

from dataclasses import dataclass
from functools import cached_property
from itertools import product

import numpy as np

from .errors import ConfigurationError

_CANONICAL = ("q0", "q1", "ryd", "leak", "aux_e")
_CHAR_OF = {"q0": "0", "q1": "1", "ryd": "r", "leak": "2", "aux_e": "e"}
_LABEL_OF = {v: k for k, v in _CHAR_OF.items()}


@dataclass(frozen=True, eq=True)
class LevelScheme:
    """Level content of the register and the basis-index bijection."""

    atom_count: int
    with_leak: bool = False
    with_aux: bool = False

    def __post_init__(self):
        if not 1 <= self.atom_count <= 3:
            raise ConfigurationError(
                f"atom_count must be 1, 2 or 3, got {self.atom_count}"
            )

    @property
    def levels(self) -> tuple:
        names = ["q0", "q1", "ryd"]
        if self.with_leak:
            names.append("leak")
        if self.with_aux:
            names.append("aux_e")
        return tuple(names)

    @property
    def n_levels(self) -> int:
        return 3 + self.with_leak + self.with_aux

    @property
    def dim(self) -> int:
        return self.n_levels**self.atom_count

    def level_index(self, label: str) -> int:
        label = _LABEL_OF.get(label, label)
        try:
            return self.levels.index(label)
        except ValueError:
            raise ConfigurationError(
                f"level {label!r} not in scheme {self.levels}"
            ) from None

    def ket_index(self, ket) -> int:
        """Basis index of a product ket, given as a string like ``'0r'``
        or a tuple of level labels, atom 0 first."""
        if isinstance(ket, str):
            ket = tuple(ket)
        if len(ket) != self.atom_count:
            raise ConfigurationError(
                f"ket {ket!r} has {len(ket)} atoms, scheme has {self.atom_count}"
            )
        idx = 0
        for label in ket:
            idx = idx * self.n_levels + self.level_index(label)
        return idx

    def ket_labels(self, index: int) -> str:
        """Inverse of :meth:`ket_index`, as a compact string."""
        if not 0 <= index < self.dim:
            raise ConfigurationError(f"basis index {index} out of range")
        chars = []
        for _ in range(self.atom_count):
            index, l = divmod(index, self.n_levels)
            chars.append(_CHAR_OF[self.levels[l]])
        return "".join(reversed(chars))

    def all_kets(self):
        """All product kets as compact strings, in basis order."""
        chars = [_CHAR_OF[l] for l in self.levels]
        return ["".join(p) for p in product(chars, repeat=self.atom_count)]

    @cached_property
    def computational_indices(self) -> np.ndarray:
        """Indices of the 2**n computational kets, in binary order
        (atom 0 most significant)."""
        kets = ["".join(p) for p in product("01", repeat=self.atom_count)]
        return np.array([self.ket_index(k) for k in kets], dtype=np.intp)

    @property
    def computational_labels(self):
        return ["".join(p) for p in product("01", repeat=self.atom_count)]

    def single_atom_operator(self, atom: int, bra: str, ket: str) -> np.ndarray:
        """Dense |bra><ket| on one atom, identity on the rest."""
        if not 0 <= atom < self.atom_count:
            raise ConfigurationError(f"atom index {atom} out of range")
        op = np.zeros((self.n_levels, self.n_levels), dtype=np.complex128)
        op[self.level_index(bra), self.level_index(ket)] = 1.0
        full = np.array([[1.0 + 0j]])
        eye = np.eye(self.n_levels, dtype=np.complex128)
        for j in range(self.atom_count):
            full = np.kron(full, op if j == atom else eye)
        return full

    def projector(self, *kets) -> np.ndarray:
        """Diagonal projector onto the listed product kets."""
        p = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for ket in kets:
            i = self.ket_index(ket)
            p[i, i] = 1.0
        return p

    def rydberg_pair_projector(self, atom_a: int, atom_b: int) -> np.ndarray:
        """Projector onto |ryd> of both named atoms (any state elsewhere)."""
        pa = self.single_atom_operator(atom_a, "ryd", "ryd")
        pb = self.single_atom_operator(atom_b, "ryd", "ryd")
        return pa @ pb

    def basis_state(self, ket) -> np.ndarray:
        """Unit amplitude vector for a product ket."""
        v = np.zeros(self.dim, dtype=np.complex128)
        v[self.ket_index(ket)] = 1.0
        return v

    # default registers -------------------------------------------------

    @staticmethod
    def two_atom(with_leak=False, with_aux=False) -> "LevelScheme":
        return LevelScheme(2, with_leak=with_leak, with_aux=with_aux)

    @staticmethod
    def three_atom(with_leak=False, with_aux=False) -> "LevelScheme":
        return LevelScheme(3, with_leak=with_leak, with_aux=with_aux)
