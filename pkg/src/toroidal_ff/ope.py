"""Symbolic calculus of normal-ordered quadratic free fields.

Atoms are basis generators: a boson ``u`` or its starred partner ``u*`` for
``u`` in {cbar, eps_1, ..., eps_n}, and the single odd ghost ``e``. The pairing
is

    <b*, a> = -<a, b*> = (a, b),   <a, b> = <a*, b*> = 0,   <e, e> = 1,

and the contraction ``x(z) y(w) - :x(z) y(w):`` has leading singular part
``<x, y> / (z - w)``. Quadratic fields therefore produce OPE singularities of
order at most two, and super-commutators of quadratics are finite sums of

    X(w) delta(z - w)    and    c * d/dw delta(z - w)

with ``X`` quadratic and ``c`` scalar. Variables are integer tags; ``0`` is the
output variable ``w`` and ``k >= 1`` are the ``z`` variables.

Fields carrying sqrt(2) (the odd currents) are tracked with a formal factor
``s`` (``root2`` flag, ``s**2 = 2``) so every coefficient stays rational.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, NamedTuple, Optional, Tuple, Union

from .root_data import CBAR, Parity, WeightVector, basis_vector, label_name

GHOST_LABEL = 1 << 30
W = 0
Z = 1


class EngineError(AssertionError):
    """Internal consistency check of the OPE engine failed."""


class Gen(NamedTuple):
    """Basis generator. Natural tuple order is the canonical generator order."""

    label: int
    starred: bool = False

    @property
    def is_ghost(self) -> bool:
        return self.label == GHOST_LABEL

    @property
    def is_central(self) -> bool:
        return self.label == CBAR

    def __str__(self) -> str:
        if self.is_ghost:
            return "e"
        return label_name(self.label) + ("*" if self.starred else "")


GHOST = Gen(GHOST_LABEL, False)


def boson_gen(label: int, starred: bool = False) -> Gen:
    return Gen(label, starred)


@dataclass(frozen=True)
class Boson:
    """Boson attached to an arbitrary lattice vector, e.g. beta or beta*."""

    weight: WeightVector
    starred: bool = False

    def star(self) -> "Boson":
        return Boson(self.weight, not self.starred)

    def __str__(self) -> str:
        return f"({self.weight})" + ("*" if self.starred else "")


Symbol = Union[Gen, Boson]
Word = Tuple[Tuple[Gen, int], ...]
Quad = Tuple[Gen, Gen]


def expand_symbol(x: Symbol) -> Dict[Gen, Fraction]:
    if isinstance(x, Gen):
        return {x: Fraction(1)}
    return {Gen(lab, x.starred): c for lab, c in x.weight.coords}


def _basis_pairing(x: Gen, y: Gen) -> int:
    if x.is_ghost or y.is_ghost:
        return 1 if x.is_ghost and y.is_ghost else 0
    if x.starred == y.starred or x.label != y.label or x.label == CBAR:
        return 0
    # <b*, a> = (a, b) and <a, b*> = -(a, b)
    return 1 if x.starred else -1


def pairing(x: Symbol, y: Symbol) -> Fraction:
    """Antisymmetric on bosons, symmetric (value 1) on the ghost, zero across."""
    if isinstance(x, Gen) and isinstance(y, Gen):
        return Fraction(_basis_pairing(x, y))
    total = Fraction(0)
    for gx, cx in expand_symbol(x).items():
        for gy, cy in expand_symbol(y).items():
            p = _basis_pairing(gx, gy)
            if p:
                total += p * cx * cy
    return total


def _odd(g: Gen) -> int:
    return 1 if g.is_ghost else 0


def _swap_sign(x: Gen, y: Gen) -> int:
    return -1 if x.is_ghost and y.is_ghost else 1


def canonicalize(word: Iterable[Tuple[Gen, int]]) -> Tuple[int, Optional[Word]]:
    """Sort a normal-ordered word into canonical order.

    Returns ``(sign, word)``; the sign is (-1)**(ghost transpositions). A
    repeated ghost at the same variable makes the word vanish: ``(0, None)``.
    """
    word = tuple(word)
    order = sorted(range(len(word)), key=lambda p: word[p])
    ghosts = [p for p in order if word[p][0].is_ghost]
    inversions = sum(
        1 for a in range(len(ghosts)) for b in range(a + 1, len(ghosts)) if ghosts[a] > ghosts[b]
    )
    canon = tuple(word[p] for p in order)
    for left, right in zip(canon, canon[1:]):
        if left == right and left[0].is_ghost:
            return 0, None
    return (-1 if inversions % 2 else 1), canon


def _add(acc: Dict, key, value) -> None:
    if not value:
        return
    new = acc.get(key, 0) + value
    if new:
        acc[key] = new
    else:
        del acc[key]


def _sym_weight(x: Symbol, rank: int) -> WeightVector:
    if isinstance(x, Boson):
        return -x.weight if x.starred else x.weight
    if x.is_ghost:
        return WeightVector.zero(rank)
    v = basis_vector(x.label, rank)
    return -v if x.starred else v


def _render_coef(c: Fraction, first: bool) -> str:
    sign = "-" if c < 0 else "+"
    mag = abs(c)
    body = "" if mag == 1 else f"{mag} "
    if first:
        return ("-" if c < 0 else "") + body
    return f" {sign} {body}"


class FieldExpr:
    """Finite sum of coefficient * :g1 g2:(z) over basis generators.

    Monomials are canonical pairs (g1 <= g2); ``root2`` is the power of the
    formal sqrt(2) factor. ``weight`` is the lattice weight of the expression
    when it was built from a weight-homogeneous presentation.
    """

    __slots__ = ("rank", "terms", "root2", "weight", "_parity")

    def __init__(
        self,
        rank: int,
        terms: Mapping[Quad, Fraction],
        root2: int = 0,
        weight: Optional[WeightVector] = None,
    ):
        clean = {}
        for (g1, g2), c in terms.items():
            sign, canon = canonicalize(((g1, 0), (g2, 0)))
            if sign:
                _add(clean, (canon[0][0], canon[1][0]), sign * Fraction(c))
        parities = {(_odd(a) + _odd(b)) % 2 for a, b in clean}
        if len(parities) > 1:
            raise ValueError("field expression is not parity-homogeneous")
        if root2 not in (0, 1):
            raise ValueError("root2 must be 0 or 1")
        self.rank = rank
        self.terms = dict(sorted(clean.items()))
        self.root2 = root2 if clean else 0
        self.weight = weight
        self._parity = Parity(parities.pop()) if parities else Parity.EVEN

    @property
    def parity(self) -> Parity:
        return self._parity

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, FieldExpr):
            return NotImplemented
        return self.terms == other.terms and self.root2 == other.root2

    def __hash__(self) -> int:
        return hash((tuple(self.terms.items()), self.root2))

    def _combine(self, other: "FieldExpr", sign: int) -> "FieldExpr":
        if other.rank != self.rank:
            raise ValueError("rank mismatch")
        if self.terms and other.terms and self.root2 != other.root2:
            raise ValueError("cannot add fields with different sqrt(2) powers")
        acc = dict(self.terms)
        for k, c in other.terms.items():
            _add(acc, k, sign * c)
        if self.is_zero():
            weight = other.weight
        elif other.is_zero() or self.weight == other.weight:
            weight = self.weight
        else:
            weight = None
        root2 = self.root2 if self.terms else other.root2
        return FieldExpr(self.rank, acc, root2, weight)

    def __add__(self, other: "FieldExpr") -> "FieldExpr":
        return self._combine(other, 1)

    def __sub__(self, other: "FieldExpr") -> "FieldExpr":
        return self._combine(other, -1)

    def __neg__(self) -> "FieldExpr":
        return FieldExpr(self.rank, {k: -c for k, c in self.terms.items()}, self.root2, self.weight)

    def __rmul__(self, scalar) -> "FieldExpr":
        s = Fraction(scalar)
        return FieldExpr(self.rank, {k: s * c for k, c in self.terms.items()}, self.root2, self.weight)

    def modulo_center(self) -> "FieldExpr":
        """Image in the quotient where the central cbar, cbar* modes act by zero."""
        kept = {k: c for k, c in self.terms.items() if not (k[0].is_central or k[1].is_central)}
        return FieldExpr(self.rank, kept, self.root2, self.weight)

    def render(self, var: str = "z") -> str:
        if not self.terms:
            return "0"
        out = []
        for i, ((g1, g2), c) in enumerate(self.terms.items()):
            out.append(f"{_render_coef(c, i == 0)}:{g1}({var}){g2}({var}):")
        text = "".join(out)
        return f"sqrt2*({text})" if self.root2 else text

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"FieldExpr({self.render()})"


def expand_bilinear(
    rank: int,
    raw_terms: Iterable[Tuple[Fraction, Symbol, Symbol]],
    root2: int = 0,
) -> FieldExpr:
    """Expand ``sum c :x y:`` with lattice-vector bosons over basis generators."""
    acc: Dict[Quad, Fraction] = {}
    weights = set()
    for coef, x, y in raw_terms:
        coef = Fraction(coef)
        if coef == 0:
            continue
        weights.add(_sym_weight(x, rank) + _sym_weight(y, rank))
        for gx, cx in expand_symbol(x).items():
            for gy, cy in expand_symbol(y).items():
                sign, canon = canonicalize(((gx, 0), (gy, 0)))
                if sign:
                    _add(acc, (canon[0][0], canon[1][0]), sign * coef * cx * cy)
    weight = weights.pop() if len(weights) == 1 else None
    return FieldExpr(rank, acc, root2, weight)


def quad(rank: int, x: Symbol, y: Symbol, coef=1, root2: int = 0) -> FieldExpr:
    return expand_bilinear(rank, [(Fraction(coef), x, y)], root2)


def weight_of(f: FieldExpr) -> WeightVector:
    """Weight: unstarred weights minus starred weights; the ghost carries none."""
    if f.weight is not None:
        return f.weight
    weights = {_sym_weight(g1, f.rank) + _sym_weight(g2, f.rank) for g1, g2 in f.terms}
    if len(weights) != 1:
        raise ValueError("field expression is not weight-homogeneous")
    return weights.pop()


def parity_of(f: FieldExpr) -> Parity:
    return f.parity


def quad_pairing(p: Tuple[Symbol, Symbol], q: Tuple[Symbol, Symbol]) -> Fraction:
    """<:r1 r2:, :s1 s2:> = -<r1,s1><r2,s2> + <r1,s2><r2,s1>."""
    r1, r2 = p
    s1, s2 = q
    return -pairing(r1, s1) * pairing(r2, s2) + pairing(r1, s2) * pairing(r2, s1)


def field_pairing(f: FieldExpr, g: FieldExpr) -> Fraction:
    total = Fraction(0)
    for p, cp in f.terms.items():
        for q, cq in g.terms.items():
            total += cp * cq * quad_pairing(p, q)
    if f.root2 and g.root2:
        total *= 2
    elif f.root2 or g.root2:
        if total:
            raise ValueError("pairing has an odd sqrt(2) power")
    return total


@dataclass
class OPEProduct:
    """Wick expansion of A(za) B(zb) for |za| > |zb|.

    ``order1`` multiplies 1/(za - zb), ``order2`` multiplies 1/(za - zb)**2;
    all coefficients already include the reduced sqrt(2) factor and the
    remaining power is ``root2``.
    """

    regular: Dict[Word, Fraction]
    order1: Dict[Word, Fraction]
    order2: Fraction
    root2: int


def _root2_product(a: int, b: int) -> Tuple[Fraction, int]:
    total = a + b
    return Fraction(2 ** (total // 2)), total % 2


def ope_product(a: FieldExpr, b: FieldExpr, za: int = Z, zb: int = W) -> OPEProduct:
    if za == zb:
        raise ValueError("ope_product needs two distinct variables")
    scale, root2 = _root2_product(a.root2, b.root2)
    regular: Dict[Word, Fraction] = {}
    order1: Dict[Word, Fraction] = {}
    order2 = Fraction(0)
    for (a1, a2), ca in a.terms.items():
        for (b1, b2), cb in b.terms.items():
            c = scale * ca * cb
            sign, word = canonicalize(((a1, za), (a2, za), (b1, zb), (b2, zb)))
            if sign:
                _add(regular, word, sign * c)
            singles = (
                (a1, b1, a2, b2, _swap_sign(a1, a2)),
                (a1, b2, a2, b1, _swap_sign(a1, a2) * _swap_sign(a1, b1)),
                (a2, b1, a1, b2, 1),
                (a2, b2, a1, b1, _swap_sign(a2, b1)),
            )
            for x, y, left, right, perm in singles:
                p = _basis_pairing(x, y)
                if not p:
                    continue
                sign, word = canonicalize(((left, za), (right, zb)))
                if sign:
                    _add(order1, word, perm * sign * p * c)
            order2 += c * (
                _basis_pairing(a2, b1) * _basis_pairing(a1, b2)
                + _swap_sign(a2, b1) * _basis_pairing(a1, b1) * _basis_pairing(a2, b2)
            )
    return OPEProduct(regular, order1, order2, root2)


def _scaled(d: Mapping, s: int) -> Dict:
    return {k: s * v for k, v in d.items()}


Payload = Optional[Quad]
Deltas = Tuple[Tuple[int, int], ...]


def var_name(v: int) -> str:
    if v == W:
        return "w"
    return "z" if v == Z else f"z{v}"


class DistExpr:
    """Finite sum of coefficient * payload(w) * prod delta(z_k - w) factors.

    A payload is a canonical quadratic at ``w`` or ``None`` (scalar). Each
    delta factor is ``(var, deriv)`` with ``deriv`` in {0, 1}; derivatives only
    appear on scalar terms.
    """

    __slots__ = ("rank", "terms", "root2", "parity")

    def __init__(
        self,
        rank: int,
        terms: Mapping[Tuple[Payload, Deltas], Fraction],
        root2: int = 0,
        parity: Parity = Parity.EVEN,
    ):
        clean: Dict[Tuple[Payload, Deltas], Fraction] = {}
        for (payload, deltas), c in terms.items():
            deltas = tuple(sorted(deltas))
            if sum(d for _, d in deltas) > 1:
                raise EngineError("more than one derivative delta in a term")
            if payload is not None and any(d for _, d in deltas):
                raise EngineError("derivative delta on a quadratic payload")
            _add(clean, (payload, deltas), Fraction(c))
        self.rank = rank
        self.terms = dict(sorted(clean.items(), key=_dist_key))
        self.root2 = root2 if clean else 0
        self.parity = Parity(parity)

    @classmethod
    def zero(cls, rank: int, parity: Parity = Parity.EVEN) -> "DistExpr":
        return cls(rank, {}, 0, parity)

    @classmethod
    def from_field(cls, f: FieldExpr, z: int = Z, coef=1) -> "DistExpr":
        """coef * f(w) delta(z - w)."""
        c = Fraction(coef)
        terms = {(q, ((z, 0),)): c * v for q, v in f.terms.items()}
        return cls(f.rank, terms, f.root2, f.parity)

    @classmethod
    def derivative(cls, rank: int, coef, z: int = Z) -> "DistExpr":
        """coef * d/dw delta(z - w)."""
        return cls(rank, {(None, ((z, 1),)): Fraction(coef)})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DistExpr):
            return NotImplemented
        return self.terms == other.terms and self.root2 == other.root2

    def __hash__(self) -> int:
        return hash((tuple(self.terms.items()), self.root2))

    def _combine(self, other: "DistExpr", sign: int) -> "DistExpr":
        if self.rank != other.rank:
            raise ValueError("rank mismatch")
        if self.terms and other.terms:
            if self.root2 != other.root2:
                raise ValueError("cannot add distributions with different sqrt(2) powers")
            if self.parity != other.parity:
                raise ValueError("cannot add distributions of different parity")
        acc = dict(self.terms)
        for k, c in other.terms.items():
            _add(acc, k, sign * c)
        root2 = self.root2 if self.terms else other.root2
        parity = self.parity if self.terms else other.parity
        return DistExpr(self.rank, acc, root2, parity)

    def __add__(self, other: "DistExpr") -> "DistExpr":
        return self._combine(other, 1)

    def __sub__(self, other: "DistExpr") -> "DistExpr":
        return self._combine(other, -1)

    def __neg__(self) -> "DistExpr":
        return DistExpr(self.rank, _scaled(self.terms, -1), self.root2, self.parity)

    def __rmul__(self, scalar) -> "DistExpr":
        s = Fraction(scalar)
        return DistExpr(self.rank, {k: s * c for k, c in self.terms.items()}, self.root2, self.parity)

    def variables(self) -> set:
        return {v for _, deltas in self.terms for v, _ in deltas}

    def modulo_center(self) -> "DistExpr":
        kept = {
            k: c
            for k, c in self.terms.items()
            if k[0] is None or not (k[0][0].is_central or k[0][1].is_central)
        }
        return DistExpr(self.rank, kept, self.root2, self.parity)

    def derivative_coefficient(self, z: int = Z) -> Fraction:
        return self.terms.get((None, ((z, 1),)), Fraction(0))

    def delta_payload(self, z: int = Z) -> FieldExpr:
        """The quadratic X with X(w) delta(z - w) in this expression."""
        terms = {p: c for (p, d), c in self.terms.items() if p is not None and d == ((z, 0),)}
        return FieldExpr(self.rank, terms, self.root2 if terms else 0)

    def to_json(self) -> list:
        out = []
        for (payload, deltas), c in self.terms.items():
            out.append(
                {
                    "coef": str(c),
                    "payload": None if payload is None else [str(g) for g in payload],
                    "deltas": [[var_name(v), d] for v, d in deltas],
                }
            )
        return out

    def render(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for i, ((payload, deltas), c) in enumerate(self.terms.items()):
            factors = []
            if payload is not None:
                factors.append(f":{payload[0]}(w){payload[1]}(w):")
            for v, d in deltas:
                prefix = "d_w " if d else ""
                factors.append(f"{prefix}delta({var_name(v)}-w)")
            mag = abs(c)
            sign = "-" if c < 0 else "+"
            coef = "" if mag == 1 else f"{mag} "
            lead = ("-" if c < 0 else "") if i == 0 else f" {sign} "
            out.append(f"{lead}{coef}{' '.join(factors)}")
        text = "".join(out)
        return f"sqrt2*({text})" if self.root2 else text

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"DistExpr({self.render()})"


def _dist_key(item):
    (payload, deltas), _ = item
    return (payload is not None, payload or (), deltas)


def super_commutator(a: FieldExpr, b: FieldExpr, z: int = Z, w: int = W) -> DistExpr:
    """[A(z), B(w)] = A(z)B(w) - (-1)^{|A||B|} B(w)A(z) as a delta distribution."""
    if a.rank != b.rank:
        raise ValueError("rank mismatch")
    if w != W:
        raise ValueError("the output variable must be w")
    s = -1 if (a.parity and b.parity) else 1
    forward = ope_product(a, b, z, w)
    backward = ope_product(b, a, w, z)
    if forward.regular != _scaled(backward.regular, s):
        raise EngineError("regular quartic parts do not cancel")
    if backward.order1 != _scaled(forward.order1, -s):
        raise EngineError("first-order poles are not local")
    if backward.order2 != s * forward.order2:
        raise EngineError("second-order poles are not local")
    terms: Dict[Tuple[Payload, Deltas], Fraction] = {}
    for word, c in forward.order1.items():
        (g1, _), (g2, _) = word
        sign, canon = canonicalize(((g1, w), (g2, w)))
        if sign:
            _add(terms, ((canon[0][0], canon[1][0]), ((z, 0),)), sign * c)
    if forward.order2:
        terms[(None, ((z, 1),))] = forward.order2
    return DistExpr(a.rank, terms, forward.root2, a.parity + b.parity)


def commute_into_dist(a: FieldExpr, dist: DistExpr, z: int) -> DistExpr:
    """[A(z), D] for a delta distribution D whose payloads live at w."""
    if z == W or z in dist.variables():
        raise ValueError(f"variable {var_name(z)} is not fresh")
    out = DistExpr.zero(a.rank, a.parity + dist.parity)
    for (payload, deltas), c in dist.terms.items():
        if payload is None:
            continue  # scalars are central
        if any(d for _, d in deltas):
            raise EngineError("derivative delta on a quadratic payload")
        field = FieldExpr(a.rank, {payload: c}, dist.root2)
        inner = super_commutator(a, field, z, W)
        shifted = {
            (p, tuple(sorted(deltas + d))): v for (p, d), v in inner.terms.items()
        }
        out = out + DistExpr(a.rank, shifted, inner.root2, inner.parity)
    return out


def linear_commutator(x: Gen, f: FieldExpr, z: int = Z) -> Dict[Gen, Fraction]:
    """[x(z), F(w)] for a single generator x: returns {g: c} for sum c g(w) delta(z-w).

    Computed from the single contractions of x against each side of the
    quadratic, with the reversed product checked for locality.
    """
    forward: Dict[Gen, Fraction] = {}
    backward: Dict[Gen, Fraction] = {}
    for (b1, b2), c in f.terms.items():
        p1, p2 = _basis_pairing(x, b1), _basis_pairing(x, b2)
        _add(forward, b2, p1 * c)
        _add(forward, b1, _swap_sign(b1, b2) * p2 * c)
        # B(w) x(z): contract b2 with x, then b1 with x (moved past b2)
        q2, q1 = _basis_pairing(b2, x), _basis_pairing(b1, x)
        _add(backward, b1, q2 * c)
        _add(backward, b2, _swap_sign(b1, b2) * q1 * c)
    s = -1 if (x.is_ghost and f.parity) else 1
    # x(z)B(w) - s B(w)x(z): singular parts must combine into one delta
    if backward != _scaled(forward, -s):
        raise EngineError("linear commutator is not local")
    return forward
