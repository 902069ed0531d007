"""Current table of the boson + ghost realization and its relation verifier.

Every check computes a super-commutator with :mod:`toroidal_ff.ope`, subtracts
the expected right-hand side and tests the difference for exact zero.

``center`` selects the module the identities are tested on:

* ``"retain"`` keeps the central ``cbar``/``cbar*`` fields as genuine operators
  (the Fock module V itself);
* ``"quotient"`` works on V modulo the central fields, where every ``cbar``
  and ``cbar*`` mode acts by zero.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import root_data as rd
from .ope import (
    GHOST,
    Boson,
    DistExpr,
    FieldExpr,
    Gen,
    W,
    Z,
    commute_into_dist,
    expand_bilinear,
    quad,
    super_commutator,
)

LEVEL = Fraction(-1)
CENTER_MODES = ("retain", "quotient")

PASS, FAIL, RECORDED = "pass", "fail", "recorded"


@dataclass(frozen=True)
class RealizationTable:
    rank: int
    currents: Dict[Tuple[str, int], FieldExpr]

    def xp(self, i: int) -> FieldExpr:
        return self.currents[("x+", i)]

    def xm(self, i: int) -> FieldExpr:
        return self.currents[("x-", i)]

    def x(self, sign: int, i: int) -> FieldExpr:
        return self.xp(i) if sign > 0 else self.xm(i)

    def alpha(self, i: int) -> FieldExpr:
        return self.currents[("alpha", i)]

    def rows(self) -> List[Tuple[str, int, FieldExpr]]:
        order = {"x+": 0, "x-": 1, "alpha": 2}
        return [(k, i, f) for (k, i), f in sorted(self.currents.items(), key=lambda t: (t[0][1], order[t[0][0]]))]


def build_table(n: int) -> RealizationTable:
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"rank must be an integer >= 1, got {n!r}")
    b = Boson(rd.beta(n))
    bs = b.star()
    half = Fraction(1, 2)
    cur: Dict[Tuple[str, int], FieldExpr] = {
        ("x+", 0): quad(n, bs, bs, half),
        ("x-", 0): quad(n, b, b, half),
        ("alpha", 0): quad(n, bs, b, -2),
    }
    for i in range(1, n):
        ei, ei1 = Gen(i), Gen(i + 1)
        cur[("x+", i)] = quad(n, ei, Gen(i + 1, True))
        cur[("x-", i)] = quad(n, ei1, Gen(i, True), -1)
        cur[("alpha", i)] = quad(n, ei, Gen(i, True)) - quad(n, ei1, Gen(i + 1, True))
    en = Gen(n)
    cur[("x+", n)] = quad(n, en, GHOST, 1, root2=1)
    cur[("x-", n)] = quad(n, Gen(n, True), GHOST, -1, root2=1)
    cur[("alpha", n)] = quad(n, en, Gen(n, True))
    return RealizationTable(n, cur)


@dataclass
class Entry:
    relation: str
    indices: Tuple
    status: str
    witness: Optional[str] = None
    value: Optional[str] = None
    note: Optional[str] = None

    def to_json(self) -> dict:
        out = {"relation": self.relation, "indices": list(self.indices), "status": self.status}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.value is not None:
            out["value"] = self.value
        if self.note is not None:
            out["note"] = self.note
        return out


@dataclass
class VerificationReport:
    rank: int
    center: str = "retain"
    entries: List[Entry] = field(default_factory=list)
    timing: Dict[str, float] = field(default_factory=dict)

    def extend(self, other: "VerificationReport") -> None:
        self.entries.extend(other.entries)
        self.timing.update(other.timing)

    @property
    def summary(self) -> Dict[str, int]:
        counts = {PASS: 0, FAIL: 0, RECORDED: 0}
        for e in self.entries:
            counts[e.status] += 1
        return counts

    @property
    def ok(self) -> bool:
        return all(e.status != FAIL for e in self.entries)

    def failures(self) -> List[Entry]:
        return [e for e in self.entries if e.status == FAIL]

    def find(self, relation: str, indices: Tuple) -> Entry:
        for e in self.entries:
            if e.relation == relation and tuple(e.indices) == tuple(indices):
                return e
        raise KeyError((relation, indices))

    def payload(self) -> dict:
        entries = sorted(self.entries, key=lambda e: (e.relation, [str(x) for x in e.indices]))
        return {
            "rank": self.rank,
            "center": self.center,
            "summary": self.summary,
            "entries": [e.to_json() for e in entries],
        }

    def to_json(self) -> dict:
        return {"schema": 1, "payload": self.payload(), "timing": dict(self.timing)}

    def to_text(self) -> str:
        lines = [f"rank {self.rank}  center={self.center}"]
        for e in sorted(self.entries, key=lambda e: (e.relation, [str(x) for x in e.indices])):
            idx = ",".join(str(x) for x in e.indices)
            line = f"  {e.relation:<10} ({idx:<14}) {e.status}"
            if e.value is not None:
                line += f"  value: {e.value}"
            if e.witness is not None:
                line += f"\n      witness: {e.witness}"
            if e.note:
                line += f"\n      note: {e.note}"
            lines.append(line)
        s = self.summary
        lines.append(f"summary: {s[PASS]} pass, {s[FAIL]} fail, {s[RECORDED]} recorded")
        return "\n".join(lines)


def _check_center(center: str) -> None:
    if center not in CENTER_MODES:
        raise ValueError(f"center must be one of {CENTER_MODES}, got {center!r}")


def _judge(relation: str, indices: Tuple, diff: DistExpr, center: str) -> Entry:
    reduced = diff.modulo_center() if center == "quotient" else diff
    if reduced.is_zero():
        return Entry(relation, indices, PASS)
    note = None
    if center == "retain" and diff.modulo_center().is_zero():
        note = "difference lies entirely in the central cbar/cbar* fields"
    return Entry(relation, indices, FAIL, witness=reduced.render(), note=note)


def _table(n_or_table) -> RealizationTable:
    return n_or_table if isinstance(n_or_table, RealizationTable) else build_table(n_or_table)


def verify_central(n_or_table) -> VerificationReport:
    """K is realized as the scalar -1, hence central; recorded structurally."""
    t = _table(n_or_table)
    rep = VerificationReport(t.rank)
    ok = isinstance(LEVEL, Fraction)
    rep.entries.append(Entry("central", (), PASS if ok else FAIL, note="K acts as the scalar -1"))
    return rep


def verify_cartan_currents(n_or_table, center: str = "retain") -> VerificationReport:
    """[alpha_i(z), alpha_j(w)] = (alpha_i|alpha_j) K d_w delta(z-w) with K = -1."""
    _check_center(center)
    t = _table(n_or_table)
    n = t.rank
    rep = VerificationReport(n, center)
    start = time.perf_counter()
    for i in range(n + 1):
        for j in range(n + 1):
            lhs = super_commutator(t.alpha(i), t.alpha(j))
            rhs = DistExpr.derivative(n, rd.sym_form(i, j, n) * LEVEL)
            rep.entries.append(_judge("cartan", (i, j), lhs - rhs, center))
    rep.timing["cartan"] = time.perf_counter() - start
    return rep


def verify_root_action(n_or_table, center: str = "retain") -> VerificationReport:
    """[alpha_i(z), x_j^±(w)] = ±(alpha_i|alpha_j) x_j^±(w) delta(z-w)."""
    _check_center(center)
    t = _table(n_or_table)
    n = t.rank
    rep = VerificationReport(n, center)
    start = time.perf_counter()
    for i in range(n + 1):
        for j in range(n + 1):
            for sign in (1, -1):
                xj = t.x(sign, j)
                lhs = super_commutator(t.alpha(i), xj)
                rhs = DistExpr.from_field(xj, coef=sign * rd.sym_form(i, j, n))
                rep.entries.append(_judge("root-action", (i, j, _sgn(sign)), lhs - rhs, center))
    rep.timing["root-action"] = time.perf_counter() - start
    return rep


def expected_ef(t: RealizationTable, i: int, j: int) -> DistExpr:
    n = t.rank
    if i != j:
        return DistExpr.zero(n, t.xp(i).parity + t.xm(j).parity)
    c = Fraction(-2) / rd.sym_form(i, i, n)
    return DistExpr.from_field(t.alpha(i), coef=c) + DistExpr.derivative(n, c * LEVEL)


def verify_ef(n_or_table, center: str = "retain") -> VerificationReport:
    """[x_i^+(z), x_j^-(w)] = -delta_ij 2/(alpha_i|alpha_i) {alpha_i(w) delta + K d_w delta}."""
    _check_center(center)
    t = _table(n_or_table)
    n = t.rank
    rep = VerificationReport(n, center)
    start = time.perf_counter()
    for i in range(n + 1):
        for j in range(n + 1):
            lhs = super_commutator(t.xp(i), t.xm(j))
            rep.entries.append(_judge("raise-lower", (i, j), lhs - expected_ef(t, i, j), center))
    rep.timing["raise-lower"] = time.perf_counter() - start
    return rep


def _sgn(sign: int) -> str:
    return "+" if sign > 0 else "-"


def serre_nest(t: RealizationTable, i: int, j: int, sign: int, length: int) -> DistExpr:
    """(prod_{k=1..length} ad x_i^±(z_k)) x_j^±(w), innermost bracket at z_1."""
    d = super_commutator(t.x(sign, i), t.x(sign, j), Z, W)
    for k in range(2, length + 1):
        d = commute_into_dist(t.x(sign, i), d, k)
    return d


def odd_diagonal_expected(t: RealizationTable, sign: int) -> DistExpr:
    """Computed value of [x_n^±(z), x_n^±(w)]: 2 :eps_n eps_n:(w) delta (resp. starred)."""
    n = t.rank
    g = Gen(n, sign < 0)
    return DistExpr.from_field(quad(n, g, g, 2))


def verify_nilpotence_and_serre(n_or_table, center: str = "retain") -> VerificationReport:
    _check_center(center)
    t = _table(n_or_table)
    n = t.rank
    a = rd.cartan_matrix(n)
    rep = VerificationReport(n, center)
    start = time.perf_counter()
    for sign in (1, -1):
        for i in range(n + 1):
            for j in range(n + 1):
                if a[i][j] == 0 or (i == j and rd.parity(i, n) == rd.Parity.EVEN):
                    lhs = super_commutator(t.x(sign, i), t.x(sign, j))
                    rep.entries.append(_judge("nilpotence", (i, j, _sgn(sign)), lhs, center))
    rep.timing["nilpotence"] = time.perf_counter() - start
    start = time.perf_counter()
    for sign in (1, -1):
        for i in range(n + 1):
            for j in range(n + 1):
                if i != j and a[i][j] != 0:
                    length = 1 - a[i][j]
                    lhs = serre_nest(t, i, j, sign, length)
                    rep.entries.append(_judge("serre", (i, j, _sgn(sign), length), lhs, center))
    rep.timing["serre"] = time.perf_counter() - start
    for sign in (1, -1):
        value = super_commutator(t.x(sign, n), t.x(sign, n))
        expected = odd_diagonal_expected(t, sign)
        status = RECORDED if value == expected else FAIL
        rep.entries.append(
            Entry(
                "odd-diagonal",
                (n, n, _sgn(sign)),
                status,
                value=value.render(),
                note="odd diagonal bracket is nonzero; recorded, not asserted zero",
            )
        )
    return rep


class LevelError(ValueError):
    pass


def extract_level(n_or_table, pairs: Optional[Iterable[Tuple[int, int]]] = None) -> Fraction:
    """The unique K with [alpha_i, alpha_j] = (alpha_i|alpha_j) K d_w delta for all pairs."""
    t = _table(n_or_table)
    n = t.rank
    if pairs is None:
        pairs = [(i, j) for i in range(n + 1) for j in range(n + 1)]
    level: Optional[Fraction] = None
    for i, j in pairs:
        d = super_commutator(t.alpha(i), t.alpha(j))
        coef = d.derivative_coefficient()
        form = rd.sym_form(i, j, n)
        if form == 0:
            if coef != 0:
                raise LevelError(f"orthogonal pair ({i},{j}) has central term {coef}")
            continue
        k = coef / form
        if level is not None and k != level:
            raise LevelError(f"inconsistent level: {level} vs {k} at ({i},{j})")
        level = k
    if level is None:
        raise LevelError("underdetermined: no pair with nonzero (alpha_i|alpha_j)")
    return level


def verify_all(n: int, center: str = "retain") -> VerificationReport:
    _check_center(center)
    t = build_table(n)
    rep = VerificationReport(n, center)
    rep.extend(verify_central(t))
    for step in (verify_cartan_currents, verify_root_action, verify_ef, verify_nilpotence_and_serre):
        rep.extend(step(t, center))
    start = time.perf_counter()
    try:
        k = extract_level(t)
        rep.entries.append(Entry("level", (), PASS if k == LEVEL else FAIL, value=str(k)))
    except LevelError as exc:
        rep.entries.append(Entry("level", (), FAIL, note=str(exc)))
    rep.timing["level"] = time.perf_counter() - start
    return rep
