"""Batch front end: parameter sweeps, invariant tables, verification suites.

Subcommands
-----------
``rho``
    One row per sampled parameter package: the two boundary units, the
    zero set, the attached weight list, and the canonical form.
``xj``
    One row per (package, subset): the extension-class invariant, the
    Frobenius unit, and the product law against the complement subset.
``verify``
    Verification suites (``oracle``, ``roundtrip``, ``stickelberger``,
    ``appendix``).  The process exits 0 exactly when every row passes.
``stickelberger``
    Certification table for quadratic-free character sums over a field
    grid: valuation, leading unit, certified flag.
``ktype``
    Finite-group type-reduction reports (``central``, ``split``,
    ``unramified``, ``ramified``, ``quaternion``).  Size-cap violations
    are reported as skipped rows with a reason, never as failures.

Output contract
---------------
Rows are emitted either as structured text (space-separated ``key=value``
fields, the default) or tab-separated with a leading ``#`` header line.
Every row carries the full input tuple that produced it, so any row can
be re-run in isolation.  Output is byte-identical for identical
configuration and seed; rows are ordered by input tuple regardless of
worker scheduling.
"""

from __future__ import annotations

import argparse
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import modrep
from . import pseries as ps
from . import rhobar as rb
from . import sdiv
from ._mutations import HOOKS, inject
from .errors import (
    BadInput,
    ConductorMismatch,
    FieldTooLarge,
    GroupTooLarge,
    IdentityFailed,
    PreconditionViolated,
)
from .ffield import make_field
from .jacobi import admissible_exponents, certify

__all__ = ["RunConfig", "build_parser", "main",
           "cmd_rho", "cmd_xj", "cmd_verify", "cmd_stickelberger", "cmd_ktype"]

SUITES = ("oracle", "roundtrip", "stickelberger", "appendix")
KTYPE_FAMILIES = ("central", "split", "unramified", "ramified", "quaternion")

# exceptions that mark a row as out of scope for the configured sizes,
# rather than as a failure
_SKIP_ERRORS = (GroupTooLarge, FieldTooLarge, PreconditionViolated,
                ConductorMismatch, BadInput)


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class RunConfig:
    """Fully determines one batch run, including all randomness."""

    command: str
    p_list: tuple[int, ...]
    f_list: tuple[int, ...]
    r_fixed: tuple[int, ...] | None
    trials: int
    seed: int
    zero_prob: float
    precision: int | None
    depth: int | None
    suite: str
    opt_in_large: bool
    fmt: str
    out: str | None
    jobs: int
    inject_hook: str | None

    def cells(self) -> list[tuple[int, int]]:
        return [(p, f) for p in self.p_list for f in self.f_list]


def _parse_int_list(text: str, what: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(tok) for tok in text.split(",") if tok != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"{what} must be comma-separated integers")
    if not vals:
        raise argparse.ArgumentTypeError(f"{what} must be nonempty")
    return vals


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gl2local",
        description="Exact local invariants: tables and verification suites.",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("rho", "table of sampled parameter packages"),
        ("xj", "table of extension-class invariants per subset"),
        ("verify", "run verification suites; exit 0 iff all rows pass"),
        ("stickelberger", "character-sum certification table"),
        ("ktype", "finite-group type-reduction reports"),
    ):
        sp = sub.add_parser(name, help=doc)
        sp.add_argument("--p", default="5,7", help="comma-separated primes")
        sp.add_argument("--f", default="1,2",
                        help="comma-separated extension degrees")
        sp.add_argument("--r", default=None,
                        help="fixed digit vector for all trials "
                             "(comma-separated; default: random per trial)")
        sp.add_argument("--trials", type=int, default=6,
                        help="random packages per (p, f) cell")
        sp.add_argument("--seed", type=int, default=20260815)
        sp.add_argument("--zero-prob", type=float, default=0.25,
                        dest="zero_prob",
                        help="probability that each extension coordinate "
                             "is sampled as zero")
        sp.add_argument("--precision", type=int, default=None,
                        help="working precision override for lifted data")
        sp.add_argument("--depth", type=int, default=None,
                        help="model depth (verify) or conductor exponent "
                             "(ktype)")
        sp.add_argument("--suite", default="all",
                        help="verify: oracle|roundtrip|stickelberger|"
                             "appendix|all; ktype: central|split|unramified|"
                             "ramified|quaternion|all")
        sp.add_argument("--opt-in-large", action="store_true",
                        dest="opt_in_large",
                        help="enable decomposition above the default size cap")
        sp.add_argument("--format", choices=("text", "tsv"), default="text",
                        dest="fmt")
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--jobs", type=int, default=1,
                        help="worker threads for independent grid cells")
        sp.add_argument("--inject", default=None, help=argparse.SUPPRESS)
    return ap


def _config(ns: argparse.Namespace, ap: argparse.ArgumentParser) -> RunConfig:
    try:
        p_list = _parse_int_list(ns.p, "--p")
        f_list = _parse_int_list(ns.f, "--f")
        r_fixed = None if ns.r is None else _parse_int_list(ns.r, "--r")
    except argparse.ArgumentTypeError as exc:
        ap.error(str(exc))
    for p in p_list:
        if not _is_prime(p) or p == 2:
            ap.error(f"--p entries must be odd primes, got {p}")
    for f in f_list:
        if f < 1:
            ap.error(f"--f entries must be positive, got {f}")
    if r_fixed is not None:
        if len(f_list) != 1 or len(r_fixed) != f_list[0]:
            ap.error("--r must have exactly f digits (and a single --f value)")
        for p in p_list:
            if any(not 0 <= d <= p - 3 for d in r_fixed):
                ap.error(f"--r digits must lie in [0, {p - 3}] for p={p}")
            if set(r_fixed) in ({0}, {p - 3}):
                ap.error("--r is a forbidden constant digit vector")
    if not 0.0 <= ns.zero_prob <= 1.0:
        ap.error("--zero-prob must lie in [0, 1]")
    if ns.trials < 1:
        ap.error("--trials must be positive")
    if ns.command == "verify" and ns.suite not in SUITES + ("all",):
        ap.error(f"unknown suite {ns.suite!r}; choose from "
                 f"{', '.join(SUITES + ('all',))}")
    if ns.command == "ktype" and ns.suite not in KTYPE_FAMILIES + ("all",):
        ap.error(f"unknown family {ns.suite!r}; choose from "
                 f"{', '.join(KTYPE_FAMILIES + ('all',))}")
    if ns.inject is not None and ns.inject not in HOOKS:
        ap.error(f"unknown injection hook {ns.inject!r}")
    return RunConfig(
        command=ns.command, p_list=p_list, f_list=f_list, r_fixed=r_fixed,
        trials=ns.trials, seed=ns.seed, zero_prob=ns.zero_prob,
        precision=ns.precision, depth=ns.depth, suite=ns.suite,
        opt_in_large=ns.opt_in_large, fmt=ns.fmt, out=ns.out, jobs=ns.jobs,
        inject_hook=ns.inject,
    )


# ---------------------------------------------------------------------------
# sampling, rendering, scheduling


def _cell_rng(cfg: RunConfig, p: int, f: int, tag: str) -> random.Random:
    return random.Random(f"{cfg.seed}:{p}:{f}:{tag}")


def _sample_cell(cfg: RunConfig, p: int, f: int, tag: str) -> list:
    """Seeded draw of ``cfg.trials`` packages for one grid cell."""
    rng = _cell_rng(cfg, p, f, tag)
    out = []
    for _ in range(cfg.trials):
        pattern = frozenset(i for i in range(f) if rng.random() < cfg.zero_prob)
        rho = rb.random_rho(p, f, rng, zero_pattern=pattern)
        if cfg.r_fixed is not None:
            rho = rb.GenericRho(p, f, cfg.r_fixed, rho.alpha, rho.beta,
                                rho.x, rho.theta_exp)
        out.append(rho)
    return out


def _csv(seq) -> str:
    return ",".join(str(v) for v in seq)


def _encs(seq) -> str:
    return ",".join(str(v.enc) for v in seq)


def _subset_text(J, f: int) -> str:
    return str(rb.subset_mask(J, f))


def _weight_text(wt) -> str:
    return ".".join(map(str, wt.s)) + "t" + str(wt.twist)


def _canon_text(rho) -> str:
    can = rb.canonical_form(rho)
    return (f"r:{_csv(can.r)};a:{_encs(can.alpha)};b:{_encs(can.beta)};"
            f"x:{_encs(can.x)};t:{can.theta_exp}")


def _package_fields(rho) -> dict:
    return {
        "p": rho.p, "f": rho.f, "r": _csv(rho.r),
        "alpha": _encs(rho.alpha), "beta": _encs(rho.beta),
        "x": _encs(rho.x), "theta": rho.theta_exp,
    }


class Table:
    """Ordered rows with a fixed column set; missing cells render as '-'."""

    def __init__(self, columns):
        self.columns = tuple(columns)
        self.rows: list[dict] = []

    def add(self, fields: dict) -> None:
        # values stay single-token so text rows parse as key=value fields
        self.rows.append({k: str(v).replace(" ", "_")
                          for k, v in fields.items()})

    def render(self, fmt: str) -> str:
        lines = []
        if fmt == "tsv":
            lines.append("#" + "\t".join(self.columns))
            for row in self.rows:
                lines.append("\t".join(row.get(c, "-") for c in self.columns))
        else:
            for row in self.rows:
                lines.append(" ".join(f"{c}={row[c]}"
                                      for c in self.columns if c in row))
        return "\n".join(lines)


def _write(cfg: RunConfig, chunks: list[str]) -> None:
    text = "\n".join(chunk for chunk in chunks if chunk) + "\n"
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _pmap(cfg: RunConfig, fn, items: list) -> list:
    """Run ``fn`` over ``items`` in a pool; results keep the input order."""
    if cfg.jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


# ---------------------------------------------------------------------------
# rho / xj tables


def cmd_rho(cfg: RunConfig) -> int:
    table = Table(("p", "f", "r", "alpha", "beta", "x", "theta", "zeros",
                   "lambda", "mu", "nweights", "weights", "canonical"))
    for p, f in cfg.cells():
        for rho in _sample_cell(cfg, p, f, "rho"):
            weights = sorted(rb.serre_weights(rho),
                             key=lambda wt: (wt.s, wt.twist))
            row = _package_fields(rho)
            row.update({
                "zeros": _csv(sorted(rho.zero_set)) or "-",
                "lambda": rho.unit_empty.enc,
                "mu": rho.unit_full.enc,
                "nweights": len(weights),
                "weights": "|".join(_weight_text(wt) for wt in weights),
                "canonical": _canon_text(rho),
            })
            table.add(row)
    _write(cfg, [table.render(cfg.fmt)])
    return 0


def cmd_xj(cfg: RunConfig) -> int:
    table = Table(("p", "f", "r", "alpha", "beta", "x", "theta", "J",
                   "xJ", "frobenius_unit", "product", "status"))
    failures = 0
    for p, f in cfg.cells():
        for rho in _sample_cell(cfg, p, f, "xj"):
            det = rho.det_unit
            for J in sorted(rho.subsets(), key=lambda s: rb.subset_mask(s, f)):
                row = _package_fields(rho)
                row["J"] = _subset_text(J, f)
                try:
                    xj = rb.series_parameter(rho, J)
                except PreconditionViolated:
                    row["status"] = "skipped"
                    table.add(row)
                    continue
                row["xJ"] = xj.enc
                row["frobenius_unit"] = rb.frobenius_unit(rho, J).enc
                try:
                    other = rb.series_parameter(rho, rb.complement(J, f))
                except PreconditionViolated:
                    row["product"] = "-"
                else:
                    if xj * other == det:
                        row["product"] = "ok"
                    else:
                        row["product"] = "FAIL"
                        failures += 1
                row["status"] = "ok"
                table.add(row)
    _write(cfg, [table.render(cfg.fmt)])
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# verification suites


def _proper_admissible(rho) -> list:
    return [J for J in sorted(rho.subsets(),
                              key=lambda s: rb.subset_mask(s, rho.f))
            if 0 < len(J) < rho.f
            and not (rho.zero_set & rb.frontier(J, rho.f))]


def _descent_admissible(rho) -> list:
    return [J for J in sorted(rho.subsets(),
                              key=lambda s: rb.subset_mask(s, rho.f))
            if not (rho.zero_set & rb.frontier(J, rho.f))]


def _suite_oracle(cfg: RunConfig) -> tuple[Table, int]:
    table = Table(("suite", "kind", "p", "f", "r", "alpha", "beta", "x",
                   "theta", "J", "depth", "flag", "status"))
    depth = cfg.depth if cfg.depth is not None else 3
    failures = 0
    tasks = []
    for p, f in cfg.cells():
        for rho in _sample_cell(cfg, p, f, "oracle"):
            for J in _proper_admissible(rho):
                tasks.append(("extract", rho, J))
            for J in (frozenset(), frozenset(range(f))):
                tasks.append(("boundary", rho, J))

    def run(task):
        kind, rho, J = task
        if kind == "extract":
            rep = ps.verify_extraction(rho, J, depth=depth,
                                       precision=cfg.precision)
            return rep.flag
        try:
            rep = ps.boundary_identities(
                ps.PSParams(rho, J, depth=depth, precision=cfg.precision))
        except IdentityFailed:
            return "boundary-mismatch"
        return "match" if rep.identity_holds and rep.reduction_matches \
            else "boundary-mismatch"

    for task, flag in zip(tasks, _pmap(cfg, run, tasks)):
        kind, rho, J = task
        row = _package_fields(rho)
        row.update({"suite": "oracle", "kind": kind,
                    "J": _subset_text(J, rho.f), "depth": depth,
                    "flag": flag,
                    "status": "pass" if flag == "match" else "FAIL"})
        if flag != "match":
            failures += 1
        table.add(row)
    return table, failures


def _suite_roundtrip(cfg: RunConfig) -> tuple[Table, int]:
    table = Table(("suite", "kind", "p", "f", "r", "alpha", "beta", "x",
                   "theta", "J", "detail", "status"))
    failures = 0
    for p, f in cfg.cells():
        for rho in _sample_cell(cfg, p, f, "roundtrip"):
            want = rb.canonical_form(rho)
            rows = []
            for J in _descent_admissible(rho):
                m = sdiv.from_rho(rho, J, precision=cfg.precision)
                ok_shape, msg = sdiv.validate_type_J(m)
                back = rb.canonical_form(sdiv.to_fontaine_laffaille(m))
                ok_canon = back == want
                rows.append(("canonical", J, "-" if ok_canon else "mismatch",
                             ok_canon and ok_shape))
                chi = rb.reduction_subchar(rho, J)
                target = (rho.theta_exp + sum((rho.r[i] + 1) * p ** i
                                              for i in range(f))) % rho.qm1
                ok_sub = chi.exp == target and chi.unram == rho.unit_empty
                rows.append(("subchar", J, f"exp={chi.exp}", ok_sub))
            for J in _descent_admissible(rho):
                try:
                    prod = rb.series_parameter(rho, J) * \
                        rb.series_parameter(rho, rb.complement(J, f))
                except PreconditionViolated:
                    continue
                rows.append(("product", J, f"det={rho.det_unit.enc}",
                             prod == rho.det_unit))
            rng = _cell_rng(cfg, p, f, "reparam")
            for _ in range(3):
                u = [rho.coeff.random_unit(rng) for _ in range(f)]
                v = [rho.coeff.random_unit(rng) for _ in range(f)]
                moved = rb.reparametrize(rho, u, v)
                ok = (moved.unit_empty == rho.unit_empty
                      and moved.unit_full == rho.unit_full
                      and moved.zero_set == rho.zero_set
                      and rb.serre_weights(moved) == rb.serre_weights(rho)
                      and rb.canonical_form(moved) == want)
                rows.append(("reparam", None, "-", ok))
            for kind, J, detail, ok in rows:
                row = _package_fields(rho)
                row.update({"suite": "roundtrip", "kind": kind,
                            "J": "-" if J is None else _subset_text(J, f),
                            "detail": detail,
                            "status": "pass" if ok else "FAIL"})
                if not ok:
                    failures += 1
                table.add(row)
    return table, failures


def _stickelberger_rows(cfg: RunConfig, suite: bool) -> tuple[Table, int]:
    cols = ("p", "f", "q", "a", "b", "a_digits", "b_digits",
            "valuation", "unit", "certified", "status")
    table = Table((("suite",) if suite else ()) + cols)
    failures = 0
    seen = set()
    for p, f in cfg.cells():
        q = p ** f
        if q in seen:
            continue
        seen.add(q)
        field = make_field(p, f)
        pairs = list(admissible_exponents(field))
        if len(pairs) > 4000:
            rng = _cell_rng(cfg, p, f, "stickelberger")
            pairs = sorted(rng.sample(pairs, 1000))

        def run(pair):
            return certify(field, pair[0], pair[1], precision=cfg.precision)

        for res in _pmap(cfg, run, pairs):
            digits = [[(e // p ** i) % p for i in range(f)]
                      for e in (res.a, res.b)]
            row = {"p": p, "f": f, "q": q, "a": res.a, "b": res.b,
                   "a_digits": _csv(digits[0]), "b_digits": _csv(digits[1]),
                   "valuation": res.valuation, "unit": res.unit.enc,
                   "certified": res.certified,
                   "status": "pass" if res.certified else "FAIL"}
            if suite:
                row["suite"] = "stickelberger"
            if not res.certified:
                failures += 1
            table.add(row)
    return table, failures


def _appendix_plan(cfg: RunConfig) -> list[tuple[str, str, object]]:
    large = cfg.opt_in_large
    plan = []
    for q in (5, 7, 9):
        plan.append(("central", f"q={q},exponent=1",
                     lambda q=q: modrep.verify_central_type_sum(q, 1)))
    plan.append(("central", "q=25 exponent=1",
                 lambda: modrep.verify_central_type_sum(25, 1,
                                                        allow_large=large)))
    for p in (3, 5):
        plan.append(("split", f"p={p},level=1",
                     lambda p=p: modrep.verify_split_type_reduction(p, 1, 1, 0)))
        plan.append(("split", f"p={p},level=2",
                     lambda p=p: modrep.verify_split_type_reduction(
                         p, 2, (1, 1), (0, 0))))
    for q in (5, 7, 9):
        plan.append(("unramified", f"q={q},m=1",
                     lambda q=q: modrep.verify_unramified_quadratic_type(q, 1, 1)))
    for p in (3, 5):
        plan.append(("unramified", f"p={p},m=2",
                     lambda p=p: modrep.verify_unramified_quadratic_type(
                         p, 2, (1, make_field(p, 2).gen.enc))))
    for p in (3, 5):
        plan.append(("ramified", f"p={p},m=1",
                     lambda p=p: modrep.verify_ramified_quadratic_type(p, 1, 1)))
    for q in (5, 7, 9, 25):
        plan.append(("quaternion", f"q={q}",
                     lambda q=q: modrep.quaternion_report(q)))
    return plan


def _suite_appendix(cfg: RunConfig) -> tuple[Table, int]:
    table = Table(("suite", "family", "params", "checks", "partial",
                   "notes", "status"))
    failures = 0
    plan = _appendix_plan(cfg)
    reports = _pmap(cfg, lambda item: item[2](), plan)
    for (family, params, _), rep in zip(plan, reports):
        ok = rep.passed
        if not ok:
            failures += 1
        table.add({
            "suite": "appendix", "family": family, "params": params,
            "checks": sum(len(t.rows) for t in rep.tables) + len(rep.checks),
            "partial": "yes" if rep.partial else "no",
            "notes": ";".join(rep.notes) or "-",
            "status": "pass" if ok else "FAIL",
        })
    return table, failures


def cmd_verify(cfg: RunConfig) -> int:
    chosen = SUITES if cfg.suite == "all" else (cfg.suite,)
    chunks, total = [], 0
    for suite in chosen:
        if suite == "oracle":
            table, bad = _suite_oracle(cfg)
        elif suite == "roundtrip":
            table, bad = _suite_roundtrip(cfg)
        elif suite == "stickelberger":
            table, bad = _stickelberger_rows(cfg, suite=True)
        else:
            table, bad = _suite_appendix(cfg)
        chunks.append(table.render(cfg.fmt))
        total += bad
    chunks.append(f"summary suites={_csv(chosen)} failures={total} "
                  f"result={'pass' if total == 0 else 'FAIL'}")
    _write(cfg, chunks)
    return 1 if total else 0


def cmd_stickelberger(cfg: RunConfig) -> int:
    table, failures = _stickelberger_rows(cfg, suite=False)
    _write(cfg, [table.render(cfg.fmt)])
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# finite-group type reductions


def _ktype_plan(cfg: RunConfig) -> list[tuple[str, str, object]]:
    families = KTYPE_FAMILIES if cfg.suite == "all" else (cfg.suite,)
    large = cfg.opt_in_large
    plan = []
    for family in families:
        if family == "central":
            for p, f in cfg.cells():
                q = p ** f
                plan.append(("central", f"q={q},exponent=1",
                             lambda q=q: modrep.verify_central_type_sum(
                                 q, 1, allow_large=large)))
        elif family == "split":
            levels = (cfg.depth,) if cfg.depth is not None else (1, 2)
            for p in cfg.p_list:
                for lvl in levels:
                    args = ((1, 0) if lvl < 2 else ((1, 1), (0, 0)))
                    plan.append(("split", f"p={p},level={lvl}",
                                 lambda p=p, lvl=lvl, args=args:
                                 modrep.verify_split_type_reduction(
                                     p, lvl, *args)))
        elif family == "unramified":
            depths = (cfg.depth,) if cfg.depth is not None else (1, 2)
            for p, f in cfg.cells():
                q = p ** f
                for m in depths:
                    if m == 2:
                        xi = (1, make_field(p, 2).gen.enc)
                        plan.append(("unramified", f"q={q},m=2",
                                     lambda q=q, xi=xi:
                                     modrep.verify_unramified_quadratic_type(
                                         q, 2, xi)))
                    else:
                        plan.append(("unramified", f"q={q},m={m}",
                                     lambda q=q, m=m:
                                     modrep.verify_unramified_quadratic_type(
                                         q, m, 1, allow_large=large)))
        elif family == "ramified":
            depths = (cfg.depth,) if cfg.depth is not None else (1, 2)
            for p in cfg.p_list:
                for m in depths:
                    plan.append(("ramified", f"p={p},m={m}",
                                 lambda p=p, m=m:
                                 modrep.verify_ramified_quadratic_type(p, m, 1)))
        else:
            for p, f in cfg.cells():
                q = p ** f
                plan.append(("quaternion", f"q={q}",
                             lambda q=q: modrep.quaternion_report(q)))
    return plan


def cmd_ktype(cfg: RunConfig) -> int:
    table = Table(("family", "params", "checks", "partial", "notes", "status"))
    failures = 0
    plan = _ktype_plan(cfg)

    def run(item):
        try:
            return item[2]()
        except _SKIP_ERRORS as exc:
            return exc

    for (family, params, _), rep in zip(plan, _pmap(cfg, run, plan)):
        row = {"family": family, "params": params}
        if isinstance(rep, Exception):
            row.update({"status": "skipped",
                        "notes": f"{type(rep).__name__}: {rep}"})
        else:
            if not rep.passed:
                failures += 1
            row.update({
                "checks": sum(len(t.rows) for t in rep.tables) + len(rep.checks),
                "partial": "yes" if rep.partial else "no",
                "notes": ";".join(rep.notes) or "-",
                "status": "pass" if rep.passed else "FAIL",
            })
        table.add(row)
    _write(cfg, [table.render(cfg.fmt),
                 f"summary failures={failures} "
                 f"result={'pass' if failures == 0 else 'FAIL'}"])
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# entry point


def main(argv=None) -> int:
    ap = build_parser()
    cfg = _config(ap.parse_args(argv), ap)
    runner = {"rho": cmd_rho, "xj": cmd_xj, "verify": cmd_verify,
              "stickelberger": cmd_stickelberger, "ktype": cmd_ktype}[cfg.command]
    try:
        if cfg.inject_hook is not None:
            with inject(cfg.inject_hook):
                return runner(cfg)
        return runner(cfg)
    except BadInput as exc:
        print(f"gl2local {cfg.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
