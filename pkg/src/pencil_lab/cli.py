"""Command-line driver: every check as a subcommand with JSON or CSV output.

Exit codes: 0 all checks pass, 1 some check failed, 2 invalid input,
3 input beyond the desk-scale envelope (override with --force).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .errors import FixtureDegenerate, InvalidInput, NoBasePoint, PencilLabError, ReducibleCurve, SizeGuard
from .fano import (
    even_profile_sets,
    expected_even_class_size,
    expected_odd_class_size,
    geometric_genus,
    partition_by_profile,
    regular_setup,
)
from .fixtures import DEFAULT_Q, fixture_names, get_fixture
from .grouplaw import DEFAULT_SAMPLES, SAMPLE_SEED, TorsorModel, verify_group_shadow, verify_two_actions
from .quadrics import Pencil, classify
from .reduction import (
    d_lift,
    d_reduce,
    d_target_dims,
    descended_pencil,
    expected_delta_fiber,
    expected_f_fiber,
    f_lifts,
    f_reduce,
    full_delta,
    terminal_even_solver,
)
from .stab import Flavor, build_stab, orbit_report

log = logging.getLogger("pencil_lab")

MAX_N = 7
MAX_Q = 2401

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_SIZE = 0, 1, 2, 3


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    pencil_file: str | None = None
    fixture: str | None = None
    q: int | None = None
    seed: int = SAMPLE_SEED
    samples: int = DEFAULT_SAMPLES
    fmt: str = "json"
    force: bool = False


@dataclass
class Outcome:
    """A report plus the table view used for CSV output."""

    report: dict
    columns: list[str]
    rows: list[list]
    passed: bool = True


def load_pencil(cfg: ExperimentConfig) -> Pencil:
    if (cfg.pencil_file is None) == (cfg.fixture is None):
        raise InvalidInput("give exactly one of --pencil and --fixture")
    if cfg.fixture is not None:
        p = get_fixture(cfg.fixture).pencil(cfg.q or DEFAULT_Q)
    else:
        try:
            data = json.loads(Path(cfg.pencil_file).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidInput(f"cannot read pencil JSON: {exc}") from exc
        p = Pencil.from_json(data)
        if cfg.q is not None and cfg.q != p.field.q:
            raise InvalidInput(f"--q {cfg.q} disagrees with the pencil's field F_{p.field.q}")
    if not cfg.force and (p.N > MAX_N or p.field.q > MAX_Q):
        raise SizeGuard(f"N={p.N}, q={p.field.q} exceeds N <= {MAX_N}, q <= {MAX_Q}; pass --force")
    return p


def source_label(cfg: ExperimentConfig) -> str:
    return cfg.fixture if cfg.fixture is not None else Path(cfg.pencil_file).name


# -- commands -----------------------------------------------------------------


def cmd_classify(cfg: ExperimentConfig) -> Outcome:
    """Report the pencil tag, f and whether its discriminant is a square."""
    p = load_pencil(cfg)
    cls = classify(p)
    report = {"source": source_label(cfg), "N": p.N, "q": p.field.q, **cls.to_json()}
    return Outcome(report, ["tag", "disc_square", "f"], [[cls.tag.value, cls.disc_square, " ".join(map(str, cls.f.coeffs))]])


def cmd_count(cfg: ExperimentConfig) -> Outcome:
    """Profile class sizes against 2^r / 2^a; even pencils count X and -X separately."""
    p = load_pencil(cfg)
    rows = []
    if p.is_odd:
        for key, cls in partition_by_profile(p).items():
            expected = expected_odd_class_size(key)
            rows.append([str(key), len(cls), expected, len(cls) == expected])
        extra = {}
    else:
        sets = even_profile_sets(p)
        for key, cls in sets.starred.items():
            expected = expected_even_class_size(key, signed=True)
            rows.append([str(key), 2 * len(cls), expected, 2 * len(cls) == expected])
        extra = {
            "distinct": {str(k): len(v) for k, v in sets.starred.items()},
            "excluded": {str(k): len(v) for k, v in sets.excluded.items()},
        }
    passed = all(r[3] for r in rows)
    report = {
        "source": source_label(cfg),
        "N": p.N,
        "q": p.field.q,
        "signed": not p.is_odd,
        "rows": [dict(zip(["profile", "count", "expected", "pass"], r)) for r in rows],
        **extra,
        "pass": passed,
    }
    return Outcome(report, ["profile", "count", "expected", "pass"], rows, passed)


def _check(name: str, ok: bool, trials: int, **extra) -> dict:
    return {"check": name, "pass": bool(ok), "trials": trials, **extra}


def _orbit_checks(p: Pencil, skipped: list[str]) -> list[dict]:
    """Each profile class is one stabilizer orbit with point stabilizers of order 2^a."""
    out: list[dict] = []
    wp, T, ed = regular_setup(p)
    if p.is_odd:
        G = build_stab(T, ed, wp.q1, Flavor.PO)
        classes = {str(k): (k, {fp.x for fp in v}) for k, v in partition_by_profile(p).items()}
    else:
        if geometric_genus(ed.mults) < 0:
            skipped.append("orbits: every root has even multiplicity")
            return out
        sets = even_profile_sets(p)
        if not sets.rulings_rational:
            log.warning("skipping orbit checks: Q1 is not split, rulings are not rational")
            skipped.append("orbits: Q1 is not split")
            return out
        G = build_stab(T, ed, wp.q1, Flavor.PSO)
        classes = {}
        for ruling in (0, 1):
            for k, v in sets.by_ruling[ruling].items():
                classes[f"{k} ruling {ruling}"] = (k, {fp.x for fp in v})
    for label, (key, members) in classes.items():
        rep = orbit_report(G, members)
        orders = set(rep.stabilizer_orders.values())
        ok = len(rep.orbits) == 1 and orders == {2**key.a}
        out.append(_check(f"orbit {label}", ok, len(members), stabilizer_orders=sorted(orders)))
    return out


def cmd_verify(cfg: ExperimentConfig) -> Outcome:
    """Run the group-action and torsor consistency checks on sampled divisors."""
    p = load_pencil(cfg)
    checks: list[dict] = []
    skipped: list[str] = []
    checks.extend(_orbit_checks(p, skipped))
    if not p.is_odd:
        try:
            model = TorsorModel(p)
        except ReducibleCurve as exc:
            skipped.append(f"divisor action: {exc}")
            model = None
        if model is not None:
            checks.extend(verify_group_shadow(model, cfg.samples, cfg.seed))
            for kind in ("ruling", "weierstrass"):
                root = None
                if kind == "weierstrass" and cfg.fixture is not None:
                    root = get_fixture(cfg.fixture).weierstrass_root
                try:
                    base = model.distinguished_point(kind, root)
                    if not model.f2_infty(base):
                        raise NoBasePoint(f"two-torsion set of {base} is empty over F_{p.field.q}")
                    checks.extend(verify_two_actions(model, kind, root))
                except NoBasePoint as exc:
                    log.warning("skipping %s two-actions check: %s", kind, exc)
                    skipped.append(f"two-actions {kind}: {exc}")
            if any(m >= 2 for m in model.ed.mults):
                rep = full_delta(p)
                checks.append(_check("full delta", rep.holds, len(rep.steps), **rep.to_json()))
    passed = all(c["pass"] for c in checks)
    report = {"source": source_label(cfg), "N": p.N, "q": p.field.q, "checks": checks, "skipped": skipped, "pass": passed}
    rows = [[c["check"], c["pass"], c["trials"]] for c in checks]
    return Outcome(report, ["check", "pass", "trials"], rows, passed)


def _reduce_odd(p: Pencil) -> list[dict]:
    wp, T, ed = regular_setup(p)
    out = []
    parts = partition_by_profile(p)
    for key, cls in parts.items():
        members = [fp.x for fp in cls]
        for i, (alpha, m) in enumerate(ed.roots):
            if key.dims[i] >= 1:
                images = {}
                inverse_ok = True
                for X in members:
                    step, Xb = d_reduce(wp.q1, T, X, alpha)
                    images[Xb] = X
                    inverse_ok &= d_lift(step, Xb) == X and step.check()
                pb = descended_pencil(step.descent)
                _, _, edb = regular_setup(pb)
                want = d_target_dims(ed.alphas, key.dims, alpha, edb.alphas)
                target = {fp.x for k, c in partition_by_profile(pb).items() if k.dims == want for fp in c}
                ok = inverse_ok and len(images) == len(members) and set(images) == target
                out.append(_check(f"d_reduce {key} at {alpha}", ok, len(members)))
            if key.total == 0 and m >= 2:
                fibers: dict = {}
                for X in members:
                    step, Xb = f_reduce(wp.q1, T, X, alpha)
                    fibers.setdefault(Xb, set()).add(X)
                pb = descended_pencil(step.descent)
                zero = {fp.x for k, c in partition_by_profile(pb).items() if k.total == 0 for fp in c}
                sizes = sorted({len(v) for v in fibers.values()})
                ok = (
                    set(fibers) == zero
                    and sizes == [expected_f_fiber(m)]
                    and all(f_lifts(step, Xb) == v for Xb, v in fibers.items())
                )
                out.append(_check(f"f_reduce {key} at {alpha}", ok, len(members), fiber_sizes=sizes))
    return out


def _reduce_even(p: Pencil) -> list[dict]:
    out = []
    wp, T, ed = regular_setup(p)
    if p.N == 4 and any(m >= 2 for m in ed.mults):
        try:
            sol = terminal_even_solver(p)
        except FixtureDegenerate as exc:
            out.append(_check("terminal solver", False, 0, error=str(exc)))
        else:
            starred = {fp.x for v in even_profile_sets(p).starred.values() for fp in v}
            ok = sol.subspaces == starred and len(sol.coefficient_tuples) == 2 * len(starred)
            out.append(
                _check(
                    "terminal solver",
                    ok,
                    len(sol.coefficient_tuples),
                    solutions=len(sol.coefficient_tuples),
                    distinct=len(sol.subspaces),
                )
            )
    if geometric_genus(ed.mults) >= 0 and any(m >= 2 for m in ed.mults):
        rep = full_delta(p)
        for s in rep.steps:
            want = expected_delta_fiber(wp.field.q, s.multiplicity, s.split)
            out.append(
                _check(
                    f"delta fiber {s.kind} at {s.alpha}",
                    s.parametrized and s.fiber_size == want,
                    s.size_F,
                    fiber_size=s.fiber_size,
                    expected=want,
                    split=s.split,
                )
            )
        out.append(_check("full delta", rep.holds, len(rep.steps), **rep.to_json()))
    return out


def cmd_reduce(cfg: ExperimentConfig) -> Outcome:
    """Step through d/f reductions and check fibre sizes down to the terminal case."""
    p = load_pencil(cfg)
    checks = _reduce_odd(p) if p.is_odd else _reduce_even(p)
    passed = all(c["pass"] for c in checks)
    report = {"source": source_label(cfg), "N": p.N, "q": p.field.q, "checks": checks, "pass": passed}
    rows = [[c["check"], c["pass"], c["trials"]] for c in checks]
    return Outcome(report, ["check", "pass", "trials"], rows, passed)


def cmd_fixtures(cfg: ExperimentConfig) -> Outcome:
    """List the named fixtures with their root shape."""
    rows = []
    for name in fixture_names():
        fx = get_fixture(name)
        shape = "" if fx.shape is None else "".join(map(str, fx.shape))
        rows.append([name, shape, fx.description])
    report = {"fixtures": [dict(zip(["name", "shape", "description"], r)) for r in rows]}
    return Outcome(report, ["name", "shape", "description"], rows)


COMMANDS: dict[str, Callable[[ExperimentConfig], Outcome]] = {
    "classify": cmd_classify,
    "count": cmd_count,
    "verify": cmd_verify,
    "reduce": cmd_reduce,
    "fixtures": cmd_fixtures,
}


# -- plumbing -----------------------------------------------------------------


def render(outcome: Outcome, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(outcome.report, indent=2, default=str) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(outcome.columns)
    writer.writerows(outcome.rows)
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pencil-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sp = sub.add_parser(name, help=(fn.__doc__ or name).splitlines()[0])
        if name != "fixtures":
            src = sp.add_mutually_exclusive_group(required=True)
            src.add_argument("--pencil", dest="pencil_file", help="JSON file with field, A1, A2")
            src.add_argument("--fixture", help="named fixture (see the fixtures command)")
            sp.add_argument("--q", type=int, default=None, help="field size for fixtures")
            sp.add_argument("--seed", type=int, default=SAMPLE_SEED)
            sp.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
            sp.add_argument("--force", action="store_true", help="allow inputs beyond N <= 7, q <= 2401")
        sp.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    return ExperimentConfig(
        command=args.command,
        pencil_file=getattr(args, "pencil_file", None),
        fixture=getattr(args, "fixture", None),
        q=getattr(args, "q", None),
        seed=getattr(args, "seed", SAMPLE_SEED),
        samples=getattr(args, "samples", DEFAULT_SAMPLES),
        fmt=args.fmt,
        force=getattr(args, "force", False),
    )


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    cfg = config_from_args(build_parser().parse_args(argv))
    if cfg.samples < 0:
        print("error: --samples must be >= 0", file=sys.stderr)
        return EXIT_INVALID
    try:
        outcome = COMMANDS[cfg.command](cfg)
    except SizeGuard as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except FixtureDegenerate as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except PencilLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    sys.stdout.write(render(outcome, cfg.fmt))
    return EXIT_OK if outcome.passed else EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
