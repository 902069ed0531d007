"""Lattice arithmetic and root data for the affine superalgebra B(0,n)^(1).

The weight lattice is spanned by a null vector ``cbar`` and an orthonormal
family ``eps_1 .. eps_n``. ``cbar`` is orthogonal to everything, including
itself, so every scalar that appears here is an exact rational.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Tuple, Union

Scalar = Union[int, Fraction]

CBAR = 0  # basis label of the null vector; eps_i has label i


class Parity(IntEnum):
    EVEN = 0
    ODD = 1

    def __add__(self, other):  # type: ignore[override]
        return Parity((int(self) + int(other)) % 2)

    def __str__(self) -> str:
        return self.name.lower()


def label_name(label: int) -> str:
    return "cbar" if label == CBAR else f"eps{label}"


@dataclass(frozen=True)
class WeightVector:
    """Exact coordinate vector over the basis {cbar, eps_1, ..., eps_n}.

    ``coords`` is a sorted tuple of ``(label, coefficient)`` pairs with no
    zero coefficients, so equal vectors compare and hash equal.
    """

    rank: int
    coords: Tuple[Tuple[int, Fraction], ...] = ()

    @classmethod
    def from_map(cls, rank: int, mapping: Mapping[int, Scalar]) -> "WeightVector":
        for label in mapping:
            if not 0 <= label <= rank:
                raise ValueError(f"label {label} outside rank {rank}")
        items = tuple(
            sorted((lab, Fraction(c)) for lab, c in mapping.items() if c != 0)
        )
        return cls(rank, items)

    @classmethod
    def zero(cls, rank: int) -> "WeightVector":
        return cls(rank, ())

    def as_dict(self) -> Dict[int, Fraction]:
        return dict(self.coords)

    def __getitem__(self, label: int) -> Fraction:
        return self.as_dict().get(label, Fraction(0))

    def _check(self, other: "WeightVector") -> None:
        if not isinstance(other, WeightVector):
            raise TypeError(f"expected WeightVector, got {type(other).__name__}")
        if other.rank != self.rank:
            raise ValueError(f"rank mismatch: {self.rank} vs {other.rank}")

    def __add__(self, other: "WeightVector") -> "WeightVector":
        self._check(other)
        acc = self.as_dict()
        for lab, c in other.coords:
            acc[lab] = acc.get(lab, Fraction(0)) + c
        return WeightVector.from_map(self.rank, acc)

    def __neg__(self) -> "WeightVector":
        return WeightVector(self.rank, tuple((lab, -c) for lab, c in self.coords))

    def __sub__(self, other: "WeightVector") -> "WeightVector":
        return self + (-other)

    def __mul__(self, scalar: Scalar) -> "WeightVector":
        s = Fraction(scalar)
        return WeightVector.from_map(self.rank, {lab: s * c for lab, c in self.coords})

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.coords

    def __str__(self) -> str:
        if not self.coords:
            return "0"
        parts = []
        for lab, c in self.coords:
            name = label_name(lab)
            if c == 1:
                parts.append(f"+ {name}")
            elif c == -1:
                parts.append(f"- {name}")
            elif c > 0:
                parts.append(f"+ {c}*{name}")
            else:
                parts.append(f"- {-c}*{name}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


def basis_vector(label: int, rank: int) -> WeightVector:
    return WeightVector.from_map(rank, {label: 1})


def cbar(rank: int) -> WeightVector:
    return basis_vector(CBAR, rank)


def eps(i: int, rank: int) -> WeightVector:
    if not 1 <= i <= rank:
        raise ValueError(f"eps index {i} outside 1..{rank}")
    return basis_vector(i, rank)


def inner(u: WeightVector, v: WeightVector) -> Fraction:
    """Symmetric bilinear form: (eps_i, eps_j) = delta_ij, cbar null and orthogonal."""
    u._check(v)
    vd = v.as_dict()
    return sum(
        (c * vd[lab] for lab, c in u.coords if lab != CBAR and lab in vd),
        Fraction(0),
    )


def _check_rank(n: int) -> None:
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"rank must be an integer >= 1, got {n!r}")


def _check_index(i: int, n: int) -> None:
    _check_rank(n)
    if not isinstance(i, int) or not 0 <= i <= n:
        raise ValueError(f"simple root index {i!r} outside 0..{n}")


def beta(n: int) -> WeightVector:
    _check_rank(n)
    return eps(1, n) - Fraction(1, 2) * cbar(n)


def theta(n: int) -> WeightVector:
    _check_rank(n)
    return 2 * eps(1, n)


def simple_root(i: int, n: int) -> WeightVector:
    """Distinguished simple root alpha_i; alpha_0 = cbar - theta."""
    _check_index(i, n)
    if i == 0:
        return cbar(n) - theta(n)
    if i == n:
        return eps(n, n)
    return eps(i, n) - eps(i + 1, n)


def simple_roots(n: int) -> List[WeightVector]:
    return [simple_root(i, n) for i in range(n + 1)]


def sym_form(i: int, j: int, n: int) -> Fraction:
    _check_index(i, n)
    _check_index(j, n)
    return inner(simple_root(i, n), simple_root(j, n))


def cartan_matrix(n: int) -> List[List[int]]:
    """a_ij = 2 (alpha_i, alpha_j) / (alpha_i, alpha_i), from the inner products."""
    _check_rank(n)
    roots = simple_roots(n)
    rows = []
    for ai in roots:
        norm = inner(ai, ai)
        row = []
        for aj in roots:
            a = 2 * inner(ai, aj) / norm
            if a.denominator != 1:
                raise ArithmeticError(f"non-integral Cartan entry {a}")
            row.append(int(a))
        rows.append(row)
    return rows


def symmetrizer(n: int) -> List[Fraction]:
    """d_i with (alpha_i, alpha_j) = d_i a_ij, i.e. d_i = (alpha_i, alpha_i) / 2."""
    return [inner(a, a) / 2 for a in simple_roots(n)]


def parity(i: int, n: int) -> Parity:
    _check_index(i, n)
    return Parity.ODD if i == n else Parity.EVEN


def null_root(n: int) -> WeightVector:
    roots = simple_roots(n)
    acc = roots[0]
    for a in roots[1:]:
        acc = acc + 2 * a
    return acc


@dataclass(frozen=True)
class RootDatum:
    rank: int
    simple_roots: Tuple[WeightVector, ...]
    d: Tuple[Fraction, ...]
    parity: Tuple[Parity, ...]
    beta: WeightVector
    delta: WeightVector
    theta: WeightVector

    @property
    def cartan(self) -> List[List[int]]:
        return cartan_matrix(self.rank)

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "cartan_matrix": self.cartan,
            "d": [str(x) for x in self.d],
            "parity": [str(p) for p in self.parity],
            "simple_roots": [str(a) for a in self.simple_roots],
            "beta": str(self.beta),
            "theta": str(self.theta),
            "delta": str(self.delta),
        }


def root_datum(n: int) -> RootDatum:
    _check_rank(n)
    return RootDatum(
        rank=n,
        simple_roots=tuple(simple_roots(n)),
        d=tuple(symmetrizer(n)),
        parity=tuple(parity(i, n) for i in range(n + 1)),
        beta=beta(n),
        delta=null_root(n),
        theta=theta(n),
    )


def weight_sum(vectors: Iterable[WeightVector], rank: int) -> WeightVector:
    acc = WeightVector.zero(rank)
    for v in vectors:
        acc = acc + v
    return acc
