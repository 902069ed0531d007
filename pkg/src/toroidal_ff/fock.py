"""Fock-module oracle: mode operators acting on canonically ordered states.

Modes obey

    u(k) v(l) - v(l) u(k) = <u, v> delta_{k,-l},
    u(k) e(l) = e(l) u(k),
    e(k) e(l) + e(l) e(k) = delta_{k,-l},

and the module is spanned by words in the modes of index <= 0 applied to the
vacuum; strictly positive modes annihilate it. Zero modes are kept inside the
module, ordered by generator index, so ``e(0)**2`` reduces to ``1/2`` and a
bosonic zero mode moved past its partner leaves a commutator term.

Nothing here reuses the symbolic engine: quadratic fields are read as data and
their modes ``X(m) = sum_k :r(k) s(m-k):`` are applied term by term with the
three-case normal ordering.

A state is a sorted tuple of ``(k, g)`` pairs (``k <= 0``; ``g`` a generator
index, ghost last). A vector is a dict ``state -> Fraction``.
"""

from __future__ import annotations

import itertools
import random
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from gmpy2 import mpq
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from . import root_data as rd
from .ope import DistExpr, FieldExpr, Gen, Z
from .realization import LEVEL, RealizationTable, build_table

State = Tuple[Tuple[int, int], ...]
Vector = Dict[State, Fraction]

HALF = mpq(1, 2)
VACUUM: State = ()


def _num(c):
    """Plain int when integral; keeps the hot loops off Fraction arithmetic."""
    c = Fraction(c)
    return c.numerator if c.denominator == 1 else mpq(c.numerator, c.denominator)


def _acc(out: Vector, st: State, c) -> None:
    new = out.get(st, 0) + c
    if new:
        out[st] = new
    else:
        out.pop(st, None)


def add_vectors(a: Vector, b: Vector, scale=1) -> Vector:
    out = dict(a)
    get = out.get
    for st, c in b.items():
        new = get(st, 0) + scale * c
        if new:
            out[st] = new
        else:
            del out[st]
    return out


def merge_spectators(vec: Vector, spectators: State) -> Vector:
    """Reattach modes that commute with the operator that produced ``vec``."""
    if not spectators:
        return vec
    return {tuple(sorted(st + spectators)): c for st, c in vec.items()}


def scale_vector(v: Vector, c) -> Vector:
    if c == 0:
        return {}
    return {st: c * x for st, x in v.items()}


class FockSpace:
    """Mode algebra of the bosons {cbar, eps_i}, their duals and the ghost, for rank n.

    With ``central_zero`` the cbar and cbar* modes act by zero: the quotient of
    the module by its central fields.
    """

    def __init__(self, n: int, central_zero: bool = False):
        if n < 1:
            raise ValueError("rank must be >= 1")
        self.n = n
        self.central_zero = central_zero
        self.ghost = 2 * (n + 1)
        self.size = self.ghost + 1
        # generator index 2*label + starred; label 0 is cbar
        self.names = [rd.label_name(g // 2) + ("*" if g % 2 else "") for g in range(self.ghost)] + ["e"]
        self.pair = [[self._pairing(g, h) for h in range(self.size)] for g in range(self.size)]
        # the unique generator each one pairs with, or None for the central cbar, cbar*
        self.partner = [next((h for h in range(self.size) if self.pair[g][h]), None) for g in range(self.size)]
        self._zero_insert = lru_cache(maxsize=None)(self._zero_insert_impl)
        self._quad_cache: Dict[Tuple, "QuadraticMode"] = {}

    def _pairing(self, g: int, h: int) -> int:
        if g == self.ghost or h == self.ghost:
            return 1 if g == h else 0
        lg, sg = divmod(g, 2)
        lh, sh = divmod(h, 2)
        if sg == sh or lg != lh or lg == rd.CBAR:
            return 0
        return 1 if sg else -1

    def is_central(self, g: int) -> bool:
        return g != self.ghost and g // 2 == rd.CBAR

    def gen_index(self, g: Gen) -> int:
        if g.is_ghost:
            return self.ghost
        if not 0 <= g.label <= self.n:
            raise ValueError(f"generator {g} outside rank {self.n}")
        return 2 * g.label + int(g.starred)

    def render_state(self, st: State) -> str:
        if not st:
            return "|0>"
        return " ".join(f"{self.names[g]}({k})" for k, g in st) + "|0>"

    # -- single modes -------------------------------------------------

    def _zero_insert_impl(self, g: int, word: Tuple[int, ...]) -> Tuple[Tuple[int, Tuple[int, ...]], ...]:
        """u(0) applied to a canonical word of bosonic zero modes (ghost zero mode last)."""
        if not word or g <= word[0] or word[0] == self.ghost:
            return ((1, (g,) + word),)
        head = word[0]
        out = [(c, (head,) + rest) for c, rest in self._zero_insert(g, word[1:])]
        p = self.pair[g][head]
        if p:
            out.append((p, word[1:]))
        return tuple(out)

    def apply_mode_state(self, g: int, k: int, st: State) -> List[Tuple[Fraction, State]]:
        if self.central_zero and self.is_central(g):
            return []
        ghost = self.ghost
        if k > 0:
            out = []
            if g == ghost:
                sign = 1
                for p, (lvl, h) in enumerate(st):
                    if h == ghost:
                        if lvl == -k:
                            out.append((sign, st[:p] + st[p + 1:]))
                            break
                        sign = -sign
                return out
            row = self.pair[g]
            for p, (lvl, h) in enumerate(st):
                if lvl == -k and row[h]:
                    out.append((row[h], st[:p] + st[p + 1:]))
            return out
        if k < 0:
            mode = (k, g)
            if g == ghost:
                p = bisect_left(st, mode)
                if p < len(st) and st[p] == mode:
                    return []
                before = sum(1 for _, h in st[:p] if h == ghost)
                return [(-1 if before % 2 else 1, st[:p] + (mode,) + st[p:])]
            p = bisect_right(st, mode)
            return [(1, st[:p] + (mode,) + st[p:])]
        q = bisect_left(st, (0, -1))
        neg, zero = st[:q], st[q:]
        if g == ghost:
            sign = -1 if sum(1 for _, h in neg if h == ghost) % 2 else 1
            if zero and zero[-1][1] == ghost:
                return [(sign * HALF, st[:-1])]
            return [(sign, st + ((0, ghost),))]
        word = tuple(h for _, h in zero)
        return [(c, neg + tuple((0, h) for h in w)) for c, w in self._zero_insert(g, word)]

    def apply_mode(self, g, k: int, vec: Vector) -> Vector:
        if isinstance(g, Gen):
            g = self.gen_index(g)
        out: Vector = {}
        for st, c in vec.items():
            for c2, st2 in self.apply_mode_state(g, k, st):
                _acc(out, st2, c * c2)
        return out

    def apply_word_state(self, modes: Sequence[Tuple[int, int]], st: State, coef=1) -> Vector:
        """Apply modes right to left: ``modes[-1]`` acts first."""
        vec: Vector = {st: _num(coef)}
        for g, k in reversed(modes):
            if not vec:
                break
            out: Vector = {}
            for s, c in vec.items():
                for c2, s2 in self.apply_mode_state(g, k, s):
                    _acc(out, s2, c * c2)
            vec = out
        return vec

    def normalize(self, word: Sequence[Tuple[int, int]]) -> Vector:
        """Canonical expansion of ``u_1(k_1) ... u_r(k_r)|0>`` for a word of (generator, k) pairs."""
        return self.apply_word_state(word, VACUUM)

    # -- quadratic modes -----------------------------------------------

    def _two(self, first: Tuple[int, int], second: Tuple[int, int], st: State, coef, out: Vector) -> None:
        """out += coef * first second |st>, with ``second`` acting first."""
        apply = self.apply_mode_state
        g1, k1 = first
        for c2, s2 in apply(second[0], second[1], st):
            for c1, s1 in apply(g1, k1, s2):
                new = out.get(s1, 0) + coef * c2 * c1
                if new:
                    out[s1] = new
                else:
                    del out[s1]

    def normal_ordered(self, r: int, k: int, s: int, l: int, st: State, coef=1, out: Optional[Vector] = None) -> Vector:
        """:r(k) s(l): applied to a state (added into ``out`` when given)."""
        if out is None:
            out = {}
        ghost = self.ghost
        if r == ghost and s == ghost:
            if k < 0:
                self._two((r, k), (s, l), st, coef, out)
            elif k == 0:
                self._two((r, 0), (s, l), st, coef * HALF, out)
                self._two((s, l), (r, 0), st, -coef * HALF, out)
            else:
                self._two((s, l), (r, k), st, -coef, out)
        elif r == ghost or s == ghost or k < 0:
            self._two((r, k), (s, l), st, coef, out)
        elif k == 0:
            self._two((r, 0), (s, l), st, coef * HALF, out)
            self._two((s, l), (r, 0), st, coef * HALF, out)
        else:
            self._two((s, l), (r, k), st, coef, out)
        return out

    def quadratic_mode(self, field: FieldExpr, m: int) -> "QuadraticMode":
        key = (field, m)
        op = self._quad_cache.get(key)
        if op is None:
            op = QuadraticMode(self, field, m)
            self._quad_cache[key] = op
        return op

    def enumerate_basis(self, depth_cap: int, zero_mode_cap: int) -> List[State]:
        return enumerate_basis(depth_cap, zero_mode_cap, self.n, self)


def _depth(st: State) -> int:
    return -st[0][0] if st and st[0][0] < 0 else 0


class Operator:
    """Mode operator on the Fock module; ``act`` returns the rational part.

    The full operator is ``sqrt(2)**root2 * act``.
    """

    parity: int = 0
    root2: int = 0

    def act(self, vec: Vector) -> Vector:
        raise NotImplementedError

    def active(self) -> frozenset:
        """Generators whose modes may fail to super-commute with this operator."""
        return frozenset()

    def act_state(self, st: State) -> Vector:
        return self.act({st: 1})

    def __call__(self, vec: Vector) -> Vector:
        return self.act(vec)


class QuadraticMode(Operator):
    """X(m) = sum_k :r(k) s(m-k): for every term of a quadratic field."""

    def __init__(self, space: FockSpace, field: FieldExpr, m: int):
        self.space = space
        self.m = m
        self.parity = int(field.parity)
        self.root2 = field.root2
        self.terms = [
            (space.gen_index(g1), space.gen_index(g2), _num(c)) for (g1, g2), c in field.terms.items()
        ]
        gens = {g for r, s, _ in self.terms for g in (r, s)}
        self.active_set = frozenset(gens | {space.partner[g] for g in gens if space.partner[g] is not None})
        self.cache: Dict[State, Vector] = {}

    def window(self, st: State, slack: int = 0) -> range:
        d = _depth(st)
        return range(self.m - d - slack, d + slack + 1)

    def act_state(self, st: State, slack: int = 0, prune: bool = True) -> Vector:
        """X(m)|st>; ``slack`` widens the summation window and ``prune=False`` visits every k in it.

        Modes whose generator pairs with nothing in X super-commute with X(m)
        (the active set is closed under pairing, and a spectator ghost only
        occurs when X is bosonic), so the default path acts on the active
        modes alone, caches by that projection and merges the rest back.
        """
        if slack or not prune:
            return self._direct(st, slack, prune)
        active = self.active_set
        core = tuple(md for md in st if md[1] in active)
        hit = self.cache.get(core)
        if hit is None:
            hit = self._direct(core, 0, True)
            self.cache[core] = hit
        if len(core) == len(st):
            return hit
        return merge_spectators(hit, tuple(md for md in st if md[1] not in active))

    def _direct(self, st: State, slack: int, prune: bool) -> Vector:
        out: Vector = {}
        sp = self.space
        m = self.m
        present = set(st)
        partner = sp.partner
        for k in self.window(st, slack):
            l = m - k
            for r, s, c in self.terms:
                # the positive factor of :r(k) s(l): must meet its partner among the state's modes
                if prune:
                    if k > 0 and (-k, partner[r]) not in present:
                        continue
                    if k <= 0 < l and (-l, partner[s]) not in present:
                        continue
                sp.normal_ordered(r, k, s, l, st, c, out)
        return out

    def active(self) -> frozenset:
        return self.active_set

    def act(self, vec: Vector) -> Vector:
        out: Vector = {}
        get = out.get
        for st, c in vec.items():
            for st2, c2 in self.act_state(st).items():
                new = get(st2, 0) + c * c2
                if new:
                    out[st2] = new
                else:
                    del out[st2]
        return out


class Scalar(Operator):
    def __init__(self, value, root2: int = 0):
        self.value = _num(value)
        self.root2 = root2

    def act(self, vec: Vector) -> Vector:
        return scale_vector(vec, self.value)


class Combination(Operator):
    """sum c_i O_i with a common parity and sqrt(2) power."""

    def __init__(self, parts: Iterable[Tuple[Fraction, Operator]]):
        self.parts = [(_num(c), op) for c, op in parts if c != 0]
        root2s = {op.root2 for _, op in self.parts}
        parities = {op.parity for _, op in self.parts}
        if len(root2s) > 1 or len(parities) > 1:
            raise ValueError("combination mixes sqrt(2) powers or parities")
        self.root2 = root2s.pop() if root2s else 0
        self.parity = parities.pop() if parities else 0

    def active(self) -> frozenset:
        return frozenset().union(*(op.active() for _, op in self.parts))

    def act(self, vec: Vector) -> Vector:
        out: Vector = {}
        for c, op in self.parts:
            out = add_vectors(out, op.act(vec), c)
        return out


class SuperBracket(Operator):
    """[A, B] = AB - (-1)^{|A||B|} BA."""

    def __init__(self, a: Operator, b: Operator):
        self.a, self.b = a, b
        self.parity = (a.parity + b.parity) % 2
        total = a.root2 + b.root2
        self.root2 = total % 2
        self.scale = 2 ** (total // 2)
        self.sign = -1 if (a.parity and b.parity) else 1

    def active(self) -> frozenset:
        return self.a.active() | self.b.active()

    def act(self, vec: Vector) -> Vector:
        ab = self.a.act(self.b.act(vec))
        ba = self.b.act(self.a.act(vec))
        return scale_vector(add_vectors(ab, ba, -self.sign), self.scale)


def same_action(lhs: Operator, rhs: Operator, vec: Vector) -> bool:
    left, right = lhs.act(vec), rhs.act(vec)
    if not left and not right:
        return True
    return lhs.root2 == rhs.root2 and left == right


def difference(lhs: Operator, rhs: Operator, vec: Vector) -> Vector:
    left, right = lhs.act(vec), rhs.act(vec)
    if left and right and lhs.root2 != rhs.root2:
        raise ValueError("sides carry different sqrt(2) powers")
    return add_vectors(left, right, -1)


def enumerate_basis(depth_cap: int, zero_mode_cap: int, n: int, space: Optional[FockSpace] = None) -> List[State]:
    """Canonical states with sum |k| <= depth_cap and at most zero_mode_cap zero modes."""
    if depth_cap < 0 or zero_mode_cap < 0:
        raise ValueError("caps must be >= 0")
    sp = space or FockSpace(n)
    gens = [g for g in range(sp.size) if not (sp.central_zero and sp.is_central(g))]
    bosons = [g for g in gens if g != sp.ghost]

    def negative_parts(budget: int, level: int) -> Iterator[Tuple[Tuple[int, int], ...]]:
        # modes at levels -level, -(level+1), ... with total depth <= budget
        if level > budget:
            yield ()
            return
        max_count = budget // level
        for count in range(max_count + 1):
            for combo in _mode_multisets(gens, sp.ghost, count):
                used = count * level
                here = tuple((-level, g) for g in combo)
                for rest in negative_parts(budget - used, level + 1):
                    yield rest + here

    zero_parts = []
    for count in range(zero_mode_cap + 1):
        zero_parts.extend(_mode_multisets(bosons + [sp.ghost] if sp.ghost in gens else bosons, sp.ghost, count))

    states = set()
    for neg in negative_parts(depth_cap, 1):
        for z in zero_parts:
            states.add(tuple(sorted(neg)) + tuple((0, g) for g in z))
    return sorted(states, key=lambda s: (-sum(k for k, _ in s), len(s), s))


def _mode_multisets(gens: Sequence[int], ghost: int, count: int) -> List[Tuple[int, ...]]:
    return [c for c in itertools.combinations_with_replacement(sorted(gens), count) if c.count(ghost) <= 1]


def mode_component(space: FockSpace, dist: DistExpr, k: int, l: int) -> Operator:
    """(k, l) mode of a two-variable bracket: X(w) delta(z-w) -> X(k+l), c d_w delta -> c k delta_{k,-l}."""
    if dist.variables() - {Z}:
        raise ValueError("mode components are defined for two-variable brackets only")
    payload = dist.delta_payload(Z)
    parts: List[Tuple[Fraction, Operator]] = []
    if not payload.is_zero():
        parts.append((Fraction(1), space.quadratic_mode(payload, k + l)))
    c = dist.derivative_coefficient(Z)
    if c and k == -l:
        parts.append((c * k, Scalar(1, dist.root2)))
    if not parts:
        return Combination([])
    return Combination(parts)


# -- defining relations of the loop presentation -------------------------------

RELATIONS = ("central", "cartan", "root-action", "raise-lower", "nilpotence", "serre")


def nilpotence_pairs(n: int) -> List[Tuple[int, int]]:
    """Pairs whose brackets must vanish: a_ij = 0, or i = j with x_i even."""
    a = rd.cartan_matrix(n)
    return [
        (i, j)
        for i in range(n + 1)
        for j in range(n + 1)
        if a[i][j] == 0 or (i == j and rd.parity(i, n) == rd.Parity.EVEN)
    ]


def serre_pairs(n: int) -> List[Tuple[int, int, int]]:
    a = rd.cartan_matrix(n)
    return [(i, j, 1 - a[i][j]) for i in range(n + 1) for j in range(n + 1) if i != j and a[i][j] != 0]


def relation_operators(
    space: FockSpace, table: RealizationTable, rel: str, i: int, j: int, k: int, l: int, sign: int = 1
) -> Tuple[Operator, Operator]:
    """(LHS, RHS) mode operators for one relation instance with K = -1."""
    n = table.rank
    Q = space.quadratic_mode
    K = Scalar(LEVEL)
    if rel == "central":
        target = table.alpha(i) if sign == 0 else table.x(sign, i)
        return SuperBracket(K, Q(target, k)), Combination([])
    if rel == "cartan":
        lhs = SuperBracket(Q(table.alpha(i), k), Q(table.alpha(j), l))
        c = k * rd.sym_form(i, j, n) * LEVEL if k == -l else 0
        return lhs, Combination([(c, Scalar(1))])
    if rel == "root-action":
        lhs = SuperBracket(Q(table.alpha(i), k), Q(table.x(sign, j), l))
        rhs = Combination([(sign * rd.sym_form(i, j, n), Q(table.x(sign, j), k + l))])
        return lhs, rhs
    if rel == "raise-lower":
        lhs = SuperBracket(Q(table.xp(i), k), Q(table.xm(j), l))
        if i != j:
            return lhs, Combination([])
        c = Fraction(-2) / rd.sym_form(i, i, n)
        parts = [(c, Q(table.alpha(i), k + l))]
        if k == -l:
            parts.append((c * k * LEVEL, Scalar(1)))
        return lhs, Combination(parts)
    if rel == "nilpotence":
        return SuperBracket(Q(table.x(sign, i), k), Q(table.x(sign, j), l)), Combination([])
    if rel == "serre":
        a = rd.cartan_matrix(n)
        op: Operator = Q(table.x(sign, j), k)
        for _ in range(1 - a[i][j]):
            op = SuperBracket(Q(table.x(sign, i), 0), op)
        return op, Combination([])
    raise ValueError(f"unknown relation {rel!r}")


def check_mode_relation(
    space: FockSpace,
    table: RealizationTable,
    rel: str,
    i: int,
    j: int,
    k: int,
    l: int,
    state: State,
    sign: int = 1,
) -> bool:
    lhs, rhs = relation_operators(space, table, rel, i, j, k, l, sign)
    return same_action(lhs, rhs, {state: 1})


def relation_instances(n: int, window: Tuple[int, int]) -> Iterator[Tuple[str, int, int, int, int, int]]:
    """Every (rel, i, j, k, l, sign) instance with modes in the window."""
    lo, hi = window
    modes = range(lo, hi + 1)
    for i in range(n + 1):
        for k in modes:
            yield ("central", i, i, k, 0, 0)
            for s in (1, -1):
                yield ("central", i, i, k, 0, s)
    for i in range(n + 1):
        for j in range(n + 1):
            for k in modes:
                for l in modes:
                    yield ("cartan", i, j, k, l, 1)
                    yield ("root-action", i, j, k, l, 1)
                    yield ("root-action", i, j, k, l, -1)
                    yield ("raise-lower", i, j, k, l, 1)
    for i, j in nilpotence_pairs(n):
        for k in modes:
            for l in modes:
                for s in (1, -1):
                    yield ("nilpotence", i, j, k, l, s)
    for i, j, _ in serre_pairs(n):
        for k in modes:
            for s in (1, -1):
                yield ("serre", i, j, k, 0, s)


@dataclass
class SweepFailure:
    relation: str
    i: int
    j: int
    k: int
    l: int
    sign: int
    state: str
    central_only: bool

    def to_json(self) -> dict:
        return self.__dict__.copy()


@dataclass
class SweepResult:
    rank: int
    checks: int
    states: int
    failures: List[SweepFailure]
    per_relation: Dict[str, List[int]]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self, max_failures: int = 50) -> dict:
        return {
            "rank": self.rank,
            "checks": self.checks,
            "states": self.states,
            "failures": len(self.failures),
            "per_relation": {k: {"checked": v[0], "failed": v[1]} for k, v in sorted(self.per_relation.items())},
            "failure_samples": [f.to_json() for f in self.failures[:max_failures]],
        }


def _central_only(space: FockSpace, diff: Vector) -> bool:
    return all(any(space.is_central(g) for _, g in st) for st in diff)


def fock_sweep(
    n: int,
    window: Tuple[int, int] = (-2, 2),
    depth_cap: int = 3,
    zero_mode_cap: int = 2,
    central_zero: bool = False,
    relations: Optional[Iterable[str]] = None,
    sample: Optional[int] = None,
    seed: int = 0,
    table: Optional[RealizationTable] = None,
) -> SweepResult:
    """Check the defining relations on every basis state (or a seeded sample)."""
    space = FockSpace(n, central_zero=central_zero)
    table = table or build_table(n)
    states = space.enumerate_basis(depth_cap, zero_mode_cap)
    if sample is not None and sample < len(states):
        states = sorted(random.Random(seed).sample(states, sample), key=states.index)
    wanted = set(relations) if relations is not None else set(RELATIONS)
    failures: List[SweepFailure] = []
    per_rel: Dict[str, List[int]] = {}
    checks = 0
    for rel, i, j, k, l, s in relation_instances(n, window):
        if rel not in wanted:
            continue
        lhs, rhs = relation_operators(space, table, rel, i, j, k, l, s)
        active = lhs.active() | rhs.active()
        seen: Dict[State, Vector] = {}
        stats = per_rel.setdefault(rel, [0, 0])
        for st in states:
            # spectator modes super-commute with both sides, so the verdict on st is the verdict on its core
            core = tuple(md for md in st if md[1] in active)
            diff = seen.get(core)
            if diff is None:
                diff = seen[core] = difference(lhs, rhs, {core: 1})
            checks += 1
            stats[0] += 1
            if diff:
                stats[1] += 1
                failures.append(
                    SweepFailure(rel, i, j, k, l, s, space.render_state(st), _central_only(space, diff))
                )
    return SweepResult(n, checks, len(states), failures, per_rel)


# -- engine cross-checks ----------------------------------------------------------


def current_pairs(table: RealizationTable) -> List[Tuple[Tuple[str, int], Tuple[str, int]]]:
    keys = [(kind, i) for kind, i, _ in table.rows()]
    return [(a, b) for a in keys for b in keys]


def bracket_difference(space: FockSpace, a: FieldExpr, b: FieldExpr, dist: DistExpr, k: int, l: int, st: State) -> Vector:
    """[A(k), B(l)]|st> minus the (k, l) mode of the symbolic bracket applied to |st>."""
    lhs = SuperBracket(space.quadratic_mode(a, k), space.quadratic_mode(b, l))
    return difference(lhs, mode_component(space, dist, k, l), {st: 1})


@dataclass
class CrossMismatch:
    left: str
    right: str
    k: int
    l: int
    state: str

    def to_json(self) -> dict:
        return self.__dict__.copy()


@dataclass
class CrossResult:
    rank: int
    brackets: int
    checks: int
    mismatches: List[CrossMismatch]

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_json(self, max_mismatches: int = 50) -> dict:
        return {
            "rank": self.rank,
            "brackets": self.brackets,
            "checks": self.checks,
            "mismatches": len(self.mismatches),
            "mismatch_samples": [m.to_json() for m in self.mismatches[:max_mismatches]],
        }


def _name(key: Tuple[str, int]) -> str:
    kind, i = key
    return f"alpha_{i}" if kind == "alpha" else f"x{kind[1]}_{i}"


def cross_validate(
    n: int,
    samples: int = 100,
    seed: int = 0,
    window: Tuple[int, int] = (-2, 2),
    depth_cap: int = 3,
    zero_mode_cap: int = 2,
    central_zero: bool = False,
) -> CrossResult:
    """Every current-current bracket from the engine against direct mode computation.

    For each ordered pair of currents, ``samples`` seeded draws of (k, l, state)
    compare the (k, l) mode component of the symbolic result with the super
    bracket of the two mode operators on that state.
    """
    from .ope import super_commutator

    space = FockSpace(n, central_zero=central_zero)
    table = build_table(n)
    states = space.enumerate_basis(depth_cap, zero_mode_cap)
    rng = random.Random(seed)
    modes = list(range(window[0], window[1] + 1))
    pairs = current_pairs(table)
    mismatches: List[CrossMismatch] = []
    checks = 0
    for left, right in pairs:
        a, b = table.currents[left], table.currents[right]
        dist = super_commutator(a, b)
        if central_zero:
            dist = dist.modulo_center()
        for _ in range(samples):
            k, l, st = rng.choice(modes), rng.choice(modes), rng.choice(states)
            checks += 1
            if bracket_difference(space, a, b, dist, k, l, st):
                mismatches.append(CrossMismatch(_name(left), _name(right), k, l, space.render_state(st)))
    return CrossResult(n, len(pairs), checks, mismatches)


def confirm_bracket(
    n: int,
    a: FieldExpr,
    b: FieldExpr,
    dist: DistExpr,
    window: Tuple[int, int] = (-2, 2),
    depth_cap: int = 3,
    zero_mode_cap: int = 2,
    central_zero: bool = False,
) -> Tuple[int, List[Tuple[int, int, str]]]:
    """Check a symbolic bracket's mode components on every basis state; returns (checks, mismatches)."""
    space = FockSpace(n, central_zero=central_zero)
    states = space.enumerate_basis(depth_cap, zero_mode_cap)
    modes = range(window[0], window[1] + 1)
    bad: List[Tuple[int, int, str]] = []
    checks = 0
    for k in modes:
        for l in modes:
            lhs = SuperBracket(space.quadratic_mode(a, k), space.quadratic_mode(b, l))
            rhs = mode_component(space, dist, k, l)
            active = lhs.active() | rhs.active()
            seen: Dict[State, bool] = {}
            for st in states:
                core = tuple(md for md in st if md[1] in active)
                ok = seen.get(core)
                if ok is None:
                    ok = seen[core] = not difference(lhs, rhs, {core: 1})
                checks += 1
                if not ok:
                    bad.append((k, l, space.render_state(st)))
    return checks, bad
