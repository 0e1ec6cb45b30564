"""Command-line front end: ``isotomo <command> --d D [options]``."""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import sys

import numpy as np

from . import serialize, tomo
from .mass_cover import cover_for
from .phase_space import enumerate_isotropic_lines, line_count
from .weyl import WeylBasis
from .zmod import factorize

EXIT_OK = 0
EXIT_ERROR = 2
EXIT_VERIFY = 3

COMMANDS = ("lines", "mass", "design", "reduce", "simulate", "verify", "report")


class VerificationFailure(Exception):
    pass


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="isotomo", description=__doc__)
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--d", type=int, help="system dimension")
    p.add_argument("--basis", choices=("zd", "gf"), default="gf")
    p.add_argument("--reduce", action="store_true", help="apply club reduction")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--tolerance", type=float, default=1e-9,
                   help="pass threshold for simulate (Frobenius error)")
    p.add_argument("--deterministic", action="store_true",
                   help="omit the timestamp so output is byte-identical across runs")
    p.add_argument("--suite", default="all", help="verify: module name or 'all'")
    p.add_argument("--no-matrices", action="store_true",
                   help="design: leave matrices out of the document")
    p.add_argument("--out", help="write output to this path instead of stdout")
    return p


def _need_d(cfg, low=2, high=36):
    if cfg.d is None:
        raise ValueError(f"--d is required for {cfg.command}")
    if not low <= cfg.d <= high:
        raise ValueError(f"--d must be in [{low}, {high}]")
    if cfg.trials < 1:
        raise ValueError("--trials must be >= 1")
    return cfg.d


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _scalars_csv(doc) -> str:
    rows = [(k, v) for k, v in doc.items() if not isinstance(v, (list, dict))]
    return _csv(rows, ["key", "value"])


def _text(doc) -> str:
    return "".join(f"{k}: {v}\n" for k, v in doc.items() if not isinstance(v, (list, dict)))


def _stamp(doc, cfg):
    if not cfg.deterministic:
        doc["generated_at"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    return doc


def cmd_lines(cfg):
    d = _need_d(cfg)
    lines = enumerate_isotropic_lines(d)
    if cfg.format == "csv":
        rows = [(i, d, L.cyclic, L.faithful, len(L), " ".join(f"{m}:{n}" for m, n in L.generators))
                for i, L in enumerate(lines)]
        return _csv(rows, ["index", "d", "cyclic", "faithful", "points", "generators"])
    if cfg.format == "text":
        out = [f"d={d}: {len(lines)} isotropic lines (formula {line_count(d)})\n"]
        for i, L in enumerate(lines):
            kind = "cyclic" if L.cyclic else "non-cyclic"
            out.append(f"{i:3d} {kind:10s} gens={list(L.generators)} points={list(L.points)}\n")
        return "".join(out)
    return serialize.dumps([L.to_json() for L in lines])


def cmd_mass(cfg):
    d = _need_d(cfg)
    cover = cover_for(WeylBasis(cfg.basis, d))
    doc = cover.to_json()
    if cfg.format == "csv":
        rows = [(i, len(m), m.to_json().get("a", m.to_json().get("line"))) for i, m in enumerate(cover.masses)]
        return _csv(rows, ["index", "size", "source"])
    if cfg.format == "text":
        return f"d={d} basis={cfg.basis} delta={cover.delta} exact={cover.exact}\n"
    return serialize.dumps(doc)


def cmd_design(cfg, force_reduce=False):
    d = _need_d(cfg)
    design = tomo.build_design(d, cfg.basis, reduce=cfg.reduce or force_reduce)
    doc = serialize.design_json(design, seed=cfg.seed, matrices=not cfg.no_matrices)
    doc = _stamp(doc, cfg)
    if cfg.format == "csv":
        return _scalars_csv(doc)
    if cfg.format == "text":
        return _text(doc)
    return serialize.dumps(doc)


def cmd_reduce(cfg):
    d = _need_d(cfg)
    design = tomo.build_design(d, cfg.basis, reduce=True)
    clubs = [
        {"members": c.members, "g": len(c.members), "tau": c.constraint.tau,
         "T": sum(r > 1 for r in c.constraint.ranks), "size": c.design.size}
        for c in design.clubs
    ]
    doc = {"d": d, "basis": cfg.basis, "delta": design.delta,
           "unreduced_size": design.unreduced_size, "size": design.size,
           "bound": design.bound, "complete": design.reduced.complete,
           "rank": design.reduced.completeness_rank, "clubs": clubs}
    doc = _stamp(doc, cfg)
    if cfg.format == "csv":
        rows = [(i, c["g"], c["tau"], c["T"], c["size"]) for i, c in enumerate(clubs)]
        return _csv(rows, ["club", "g", "tau", "T", "size"])
    if cfg.format == "text":
        return _text(doc)
    return serialize.dumps(doc)


def cmd_simulate(cfg):
    d = _need_d(cfg)
    design = tomo.build_design(d, cfg.basis, reduce=cfg.reduce)
    projs = design.reduced.kept_projections()
    rng = np.random.default_rng(cfg.seed)
    fact = factorize(d)
    rows = []
    for trial in range(cfg.trials):
        rho = tomo.random_density(d, rng)
        probs = tomo.simulate_probabilities(rho, projs)
        est = tomo.reconstruct_linear(probs, projs, d)
        err = float(np.linalg.norm(est - rho))
        ie_err = None
        if cfg.basis == "gf":
            ie = tomo.reconstruct_inclusion_exclusion(tomo.field_probabilities(rho, fact), fact)
            ie_err = float(np.linalg.norm(ie - rho))
        rows.append({"trial": trial, "linear_error": err, "inclusion_exclusion_error": ie_err})
    worst = max(max(r["linear_error"], r["inclusion_exclusion_error"] or 0.0) for r in rows)
    doc = _stamp({"d": d, "basis": cfg.basis, "seed": cfg.seed, "size": design.size,
                  "tolerance": cfg.tolerance, "max_error": worst,
                  "passed": worst <= cfg.tolerance, "trials": rows}, cfg)
    if cfg.format == "csv":
        text = _csv([(r["trial"], r["linear_error"], r["inclusion_exclusion_error"]) for r in rows],
                    ["trial", "linear_error", "inclusion_exclusion_error"])
    elif cfg.format == "text":
        text = "".join(f"trial {r['trial']}: {r['linear_error']:.3e}\n" for r in rows)
        text += f"max error {worst:.3e} ({'pass' if worst <= cfg.tolerance else 'FAIL'})\n"
    else:
        text = serialize.dumps(doc)
    if worst > cfg.tolerance:
        raise VerificationFailure(text)
    return text


def cmd_verify(cfg):
    from .verify import run_suite

    results = run_suite(cfg.suite, stop_on_failure=True)
    ok = all(r.passed for r in results)
    if cfg.format == "json":
        text = serialize.dumps(_stamp({"suite": cfg.suite, "passed": ok,
                                       "checks": [r._asdict() for r in results]}, cfg))
    elif cfg.format == "csv":
        text = _csv([(r.name, r.passed, r.seconds, r.detail) for r in results],
                    ["check", "passed", "seconds", "detail"])
    else:
        text = "".join(f"{'PASS' if r.passed else 'FAIL'} {r.name} {r.detail}\n" for r in results)
    if not ok:
        raise VerificationFailure(text)
    return text


def cmd_report(cfg):
    d = _need_d(cfg)
    fact = factorize(d)
    doc = {"d": d, "factors": [list(f) for f in fact.factors], "isotropic_lines": line_count(d)}
    for basis in ("zd", "gf"):
        design = tomo.build_design(d, basis, reduce=True)
        doc[basis] = {"delta": design.delta, "unreduced_size": design.unreduced_size,
                      "size": design.size, "bound": design.bound,
                      "complete": design.reduced.complete}
    doc = _stamp(doc, cfg)
    if cfg.format == "json":
        return serialize.dumps(doc)
    rows = [(b, doc[b]["delta"], doc[b]["unreduced_size"], doc[b]["size"], doc[b]["bound"])
            for b in ("zd", "gf")]
    if cfg.format == "csv":
        return _csv(rows, ["basis", "delta", "unreduced_size", "size", "bound"])
    head = f"d={d} factors={fact.factors} isotropic lines={doc['isotropic_lines']}\n"
    return head + "".join(f"{b}: delta={de} unreduced={u} reduced={s} bound={bd}\n"
                          for b, de, u, s, bd in rows)


HANDLERS = {
    "lines": cmd_lines,
    "mass": cmd_mass,
    "design": cmd_design,
    "reduce": cmd_reduce,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "report": cmd_report,
}


def _emit(text, cfg, stream):
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stream.write(text)


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        cfg = build_parser().parse_args(argv)
    except UsageError as exc:
        stdout.write(serialize.dumps({"error": "UsageError", "message": str(exc), "command": None}))
        return EXIT_ERROR
    try:
        text = HANDLERS[cfg.command](cfg)
    except VerificationFailure as exc:
        _emit(str(exc), cfg, stdout)
        return EXIT_VERIFY
    except (ValueError, KeyError) as exc:
        doc = {"error": type(exc).__name__, "message": str(exc), "command": cfg.command}
        _emit(serialize.dumps(doc), cfg, stdout)
        return EXIT_ERROR
    _emit(text, cfg, stdout)
    return EXIT_OK


def main():  # pragma: no cover
    sys.exit(run())
