"""Command-line entry point: ``toroidal-ff {cartan,table,ope,fock,cross}``.

Exit status is 0 when every asserted check passes, 1 when a check fails and
2 for usage errors. JSON reports carry ``"schema": 1`` and keep wall-clock
timing in a separate ``timing`` field so that the ``payload`` subtree is
byte-identical across runs with the same configuration.
"""

from __future__ import annotations

import json
import re
import sys
import time
from dataclasses import dataclass
from typing import Optional, Tuple

import click

from . import root_data as rd
from .fock import confirm_bracket, cross_validate, fock_sweep
from .realization import CENTER_MODES, build_table, odd_diagonal_expected, verify_all
from .ope import super_commutator

SCHEMA = 1
_WINDOW = re.compile(r"^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$")


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    rank: int = 2
    window: Tuple[int, int] = (-2, 2)
    depth_cap: int = 3
    zero_mode_cap: int = 2
    format: str = "text"
    seed: int = 0
    sample: Optional[int] = None
    center: str = "retain"
    out: Optional[str] = None

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be >= 1")
        if self.window[0] > self.window[1]:
            raise ValueError("k_min must not exceed k_max")
        if self.depth_cap < 0 or self.zero_mode_cap < 0:
            raise ValueError("caps must be >= 0")
        if self.center not in CENTER_MODES:
            raise ValueError(f"center must be one of {CENTER_MODES}")


def parse_window(text: str) -> Tuple[int, int]:
    m = _WINDOW.match(text)
    if not m:
        raise ValueError(f"mode window must look like -2..2, got {text!r}")
    lo, hi = int(m.group(1)), int(m.group(2))
    if lo > hi:
        raise ValueError(f"empty mode window {text!r}")
    return lo, hi


class WindowType(click.ParamType):
    name = "KMIN..KMAX"

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            return parse_window(value)
        except ValueError as exc:
            self.fail(str(exc), param, ctx)


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True)


def _envelope(payload: dict, timing: dict) -> dict:
    return {"schema": SCHEMA, "payload": payload, "timing": timing}


def _cartan(cfg: RunConfig) -> Tuple[bool, dict, str]:
    data = rd.root_datum(cfg.rank).to_json()
    lines = [f"B(0,{cfg.rank})^(1) Cartan matrix:"]
    lines += ["  " + " ".join(f"{a:>3}" for a in row) for row in data["cartan_matrix"]]
    lines.append("d:       " + ", ".join(data["d"]))
    lines.append("parity:  " + ", ".join(data["parity"]))
    lines.append("roots:   " + "; ".join(f"alpha_{i} = {a}" for i, a in enumerate(data["simple_roots"])))
    lines.append(f"delta:   {data['delta']}")
    return True, data, "\n".join(lines)


def _table(cfg: RunConfig) -> Tuple[bool, dict, str]:
    t = build_table(cfg.rank)
    names = {"x+": "x+_{i}", "x-": "x-_{i}", "alpha": "alpha_{i}"}
    rows = [(names[kind].format(i=i), f.render("z")) for kind, i, f in t.rows()]
    payload = {"rank": cfg.rank, "level": "-1", "currents": [{"name": a, "field": b} for a, b in rows]}
    width = max(len(a) for a, _ in rows)
    lines = [f"{a:<{width}}  {b}" for a, b in rows] + ["K = -1"]
    return True, payload, "\n".join(lines)


def _ope(cfg: RunConfig) -> Tuple[bool, dict, str, dict]:
    rep = verify_all(cfg.rank, cfg.center)
    doc = rep.to_json()
    return rep.ok, doc["payload"], rep.to_text(), doc["timing"]


def _fock(cfg: RunConfig) -> Tuple[bool, dict, str]:
    res = fock_sweep(
        cfg.rank,
        window=cfg.window,
        depth_cap=cfg.depth_cap,
        zero_mode_cap=cfg.zero_mode_cap,
        central_zero=cfg.center == "quotient",
        sample=cfg.sample,
        seed=cfg.seed,
    )
    payload = res.to_json()
    payload.update({"window": list(cfg.window), "depth_cap": cfg.depth_cap, "zero_mode_cap": cfg.zero_mode_cap, "center": cfg.center})
    lines = [
        f"rank {cfg.rank}  center={cfg.center}  window {cfg.window[0]}..{cfg.window[1]}  "
        f"depth<={cfg.depth_cap}  zero modes<={cfg.zero_mode_cap}  states={res.states}"
    ]
    for rel, (checked, failed) in sorted(res.per_relation.items()):
        lines.append(f"  relation {rel:<6} checked {checked:>9}  failed {failed:>8}")
    for f in res.failures[:20]:
        tag = "  (central fields only)" if f.central_only else ""
        lines.append(f"  FAIL rel {f.relation} i={f.i} j={f.j} k={f.k} l={f.l} sign={f.sign:+d} on {f.state}{tag}")
    if len(res.failures) > 20:
        lines.append(f"  ... {len(res.failures) - 20} more failures")
    lines.append(f"summary: {res.checks} checks, {len(res.failures)} failures")
    return res.ok, payload, "\n".join(lines)


def _cross(cfg: RunConfig) -> Tuple[bool, dict, str]:
    quotient = cfg.center == "quotient"
    res = cross_validate(
        cfg.rank,
        samples=cfg.sample or 100,
        seed=cfg.seed,
        window=cfg.window,
        depth_cap=cfg.depth_cap,
        zero_mode_cap=cfg.zero_mode_cap,
        central_zero=quotient,
    )
    t = build_table(cfg.rank)
    odd = []
    for sign in (1, -1):
        f = t.x(sign, cfg.rank)
        dist = super_commutator(f, f)
        checks, bad = confirm_bracket(cfg.rank, f, f, dist, cfg.window, cfg.depth_cap, cfg.zero_mode_cap, quotient)
        odd.append(
            {
                "sign": sign,
                "value": dist.render(),
                "matches_recorded": dist == odd_diagonal_expected(t, sign),
                "checks": checks,
                "mismatches": len(bad),
            }
        )
    payload = {"center": cfg.center, "brackets": res.to_json(), "odd_diagonal": odd}
    ok = res.ok and all(o["mismatches"] == 0 and o["matches_recorded"] for o in odd)
    lines = [f"rank {cfg.rank}  center={cfg.center}: {res.brackets} brackets, {res.checks} sampled checks, {len(res.mismatches)} mismatches"]
    for m in res.mismatches[:20]:
        lines.append(f"  MISMATCH [{m.left}, {m.right}] k={m.k} l={m.l} on {m.state}")
    for o in odd:
        s = "+" if o["sign"] > 0 else "-"
        lines.append(f"  [x{s}_{cfg.rank}, x{s}_{cfg.rank}] = {o['value']}  ({o['checks']} mode checks, {o['mismatches']} mismatches)")
    lines.append("summary: " + ("agree" if ok else "disagree"))
    return ok, payload, "\n".join(lines)


def run(cfg: RunConfig) -> Tuple[int, str]:
    """Execute one subcommand; returns (exit status, rendered report)."""
    start = time.perf_counter()
    if cfg.subcommand == "ope":
        ok, payload, text, timing = _ope(cfg)
    else:
        handler = {"cartan": _cartan, "table": _table, "fock": _fock, "cross": _cross}[cfg.subcommand]
        ok, payload, text = handler(cfg)
        timing = {}
    timing = dict(timing, total=time.perf_counter() - start)
    if cfg.format == "json":
        rendered = _dump(_envelope(payload, timing))
    else:
        rendered = text
    return (0 if ok else 1), rendered


def _emit(cfg: RunConfig) -> None:
    status, rendered = run(cfg)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(rendered + "\n")
    else:
        click.echo(rendered)
    sys.exit(status)


def _common(f):
    options = [
        click.option("--rank", "-n", type=click.IntRange(min=1), default=2, show_default=True, help="Rank n of B(0,n)."),
        click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True),
        click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None, help="Write the report here."),
    ]
    for opt in reversed(options):
        f = opt(f)
    return f


def _sweep_options(f):
    options = [
        click.option("--modes", type=WindowType(), default="-2..2", show_default=True, help="Mode window k_min..k_max."),
        click.option("--depth", type=click.IntRange(min=0), default=3, show_default=True, help="Depth cap for basis states."),
        click.option("--zero-modes", type=click.IntRange(min=0), default=2, show_default=True, help="Zero-mode cap."),
        click.option("--seed", type=int, default=0, show_default=True),
        click.option("--sample", type=click.IntRange(min=1), default=None, help="Random subset size (fock) or draws per bracket (cross)."),
        click.option("--center", type=click.Choice(CENTER_MODES), default="retain", show_default=True),
    ]
    for opt in reversed(options):
        f = opt(f)
    return f


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main():
    """Free-field realization of the toroidal superalgebra of type B(0,n) at level -1."""


@main.command()
@_common
def cartan(rank, fmt, out):
    """Print the Cartan matrix, symmetrizer, parities and null root."""
    _emit(RunConfig("cartan", rank=rank, format=fmt, out=out))


@main.command()
@_common
def table(rank, fmt, out):
    """Print the realized currents."""
    _emit(RunConfig("table", rank=rank, format=fmt, out=out))


@main.command()
@_common
@click.option("--center", type=click.Choice(CENTER_MODES), default="retain", show_default=True)
def ope(rank, fmt, out, center):
    """Run the symbolic relation suite."""
    _emit(RunConfig("ope", rank=rank, format=fmt, out=out, center=center))


@main.command()
@_common
@_sweep_options
def fock(rank, fmt, out, modes, depth, zero_modes, seed, sample, center):
    """Check the defining relations mode by mode on Fock basis states."""
    _emit(RunConfig("fock", rank, modes, depth, zero_modes, fmt, seed, sample, center, out))


@main.command()
@_common
@_sweep_options
def cross(rank, fmt, out, modes, depth, zero_modes, seed, sample, center):
    """Compare symbolic brackets with direct mode computation."""
    _emit(RunConfig("cross", rank, modes, depth, zero_modes, fmt, seed, sample, center, out))


if __name__ == "__main__":  # pragma: no cover
    main()
