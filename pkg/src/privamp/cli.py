"""Command-line front end: bounds, exponent curves, second-order and equivocation checks, audits."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from decimal import Decimal, localcontext

import click
import numpy as np

from .asymptotics import EXPONENTS, exponent_curve, second_order, second_order_finite
from .bounds import CRITERIA, CSV_HEADER, METHODS, bound_equivocation, bound_renyi2, compute_bound
from .dist import JointSubDistribution
from .entropy import cond_entropy
from .errors import PrivampError
from .field import field_spec
from .hashing import family_audit, make_family
from .verify import run_suite

NATS_FIELDS = {"Rprime", "R", "limit", "per_symbol", "H", "rate"}


class InputError(click.ClickException):
    exit_code = 2


def load_distribution(path: str) -> JointSubDistribution:
    """Parse {alphabetA, alphabetE, mass (row-major), normalized} into a distribution."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from exc
    for key in ("alphabetA", "alphabetE", "mass"):
        if key not in doc:
            raise InputError(f"{path}: missing field '{key}'")
    labels_A, labels_E = list(doc["alphabetA"]), list(doc["alphabetE"])
    try:
        mass = np.asarray(doc["mass"], dtype=float).ravel()
    except (TypeError, ValueError) as exc:
        raise InputError(f"{path}: field 'mass' must be numeric") from exc
    if mass.size != len(labels_A) * len(labels_E):
        raise InputError(
            f"{path}: field 'mass' has {mass.size} entries, expected |A|*|E| = {len(labels_A) * len(labels_E)}"
        )
    if doc.get("normalized", False) and abs(mass.sum() - 1) > 1e-9:
        raise InputError(f"{path}: field 'normalized' is true but mass sums to {mass.sum()!r}")
    try:
        return JointSubDistribution(mass.reshape(len(labels_A), len(labels_E)), tuple(labels_A), tuple(labels_E))
    except PrivampError as exc:
        raise InputError(f"{path}: field 'mass': {exc}") from exc


def floor_exp(x: float) -> int:
    """floor(e^x) as an exact integer, also beyond the float range."""
    with localcontext() as ctx:
        ctx.prec = int(abs(x) / 2.3) + 30
        return int(Decimal(x).exp())


def _scale(record: dict, bits: bool, extra=()) -> dict:
    if not bits:
        return record
    out = dict(record)
    for k in NATS_FIELDS.union(extra):
        v = out.get(k)
        if isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v):
            out[k] = v / math.log(2)
    out["units"] = "bits"
    return out


def _emit_json(obj) -> None:
    click.echo(json.dumps(obj, indent=2, allow_nan=False, default=_json_default))


def _json_default(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(type(x).__name__)


def _finite(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _emit_csv(header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if v is None else repr(v) if isinstance(v, float) else v for v in r])
    click.echo(buf.getvalue(), nl=False)


@click.group()
@click.option("--bits", is_flag=True, help="Report entropy-valued outputs in bits instead of nats.")
@click.pass_context
def main(ctx, bits):
    """Privacy-amplification security bounds, exponents and verification."""
    ctx.obj = {"bits": bits}


def _guard(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except PrivampError as exc:
        raise InputError(str(exc)) from exc


@main.command()
@click.option("--dist", "dist_path", required=True, type=click.Path(dir_okay=False))
@click.option("--M", "M", required=True, type=click.IntRange(min=2))
@click.option("--eps", required=True, type=float)
@click.option("--criterion", required=True, type=click.Choice(CRITERIA))
@click.option("--method", required=True, type=click.Choice(METHODS))
@click.option("--s", "s", type=float, default=None, help="Fix s for the renyi2 method instead of optimizing.")
@click.option("--iid", "n", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.pass_context
def bounds(ctx, dist_path, M, eps, criterion, method, s, n, fmt):
    """Evaluate one security bound and print the BoundReport."""
    P = load_distribution(dist_path)
    if s is not None and method == "renyi2":
        rep = _guard(bound_renyi2, P, M, eps, criterion, s, n=n)
    else:
        rep = _guard(compute_bound, P, M, eps, criterion, method, n=n)
    extra = {"value", "lower_bound", "smoothing_value"} if criterion == "Iprime" else set()
    record = _scale(rep.to_dict(), ctx.obj["bits"], extra)
    if fmt == "json":
        _emit_json(record)
    else:
        _emit_csv(CSV_HEADER, [tuple(_finite(record[k]) for k in CSV_HEADER)])


def _parse_grid(spec: str) -> np.ndarray:
    try:
        a, b, steps = spec.split(":")
        return np.linspace(float(a), float(b), int(steps))
    except ValueError as exc:
        raise InputError(f"--r-grid must look like a:b:steps, got {spec!r}") from exc


@main.command()
@click.option("--dist", "dist_path", required=True, type=click.Path(dir_okay=False))
@click.option("--r-grid", "grid", required=True, help="a:b:steps in nats per symbol.")
@click.option("--which", default="all", type=click.Choice(("all",) + EXPONENTS), show_default=True)
@click.pass_context
def exponents(ctx, dist_path, grid, which):
    """Sample exponent curves R -> e(R) and print them as CSV."""
    P = load_distribution(dist_path)
    names = EXPONENTS if which == "all" else (which,)
    scale = 1 / math.log(2) if ctx.obj["bits"] else 1.0
    rows = []
    for name in names:
        curve = _guard(exponent_curve, P, _parse_grid(grid), name)
        rows += [(name, R * scale, v * scale, _finite(opt)) for R, v, opt in curve.samples]
    _emit_csv(("which", "R", "value", "optimizer"), rows)


@main.command("second-order")
@click.option("--dist", "dist_path", required=True, type=click.Path(dir_okay=False))
@click.option("--R", "R", required=True, type=float, help="Second-order rate in nats.")
@click.option("--n-list", default="25,100,400", show_default=True)
@click.option("--poly", type=float, default=None, help="P(n) multiplier; defaults to n.")
@click.pass_context
def second_order_cmd(ctx, dist_path, R, n_list, poly):
    """Finite-n tail expression and bound against the limit 2 Phi(R / sqrt V)."""
    P = load_distribution(dist_path)
    try:
        ns = [int(x) for x in n_list.split(",")]
    except ValueError as exc:
        raise InputError(f"--n-list must be comma-separated integers, got {n_list!r}") from exc
    limit = _guard(second_order, P, R)
    rows = []
    for n in ns:
        r = _guard(second_order_finite, P, R, n, poly)
        rows.append((n, r["Rprime"], r["tail_term"], r["bound"], limit))
    if ctx.obj["bits"]:
        rows = [(n, rp / math.log(2), t, b, lim) for n, rp, t, b, lim in rows]
    _emit_csv(("n", "Rprime", "tail_term", "bound", "limit"), rows)


@main.command()
@click.option("--dist", "dist_path", required=True, type=click.Path(dir_okay=False))
@click.option("--R", "R", required=True, type=float, help="Key rate in nats per symbol.")
@click.option("--n", "n", required=True, type=click.IntRange(min=1))
@click.option("--eps", default=1.0, show_default=True, type=float)
@click.pass_context
def equivocation(ctx, dist_path, R, n, eps):
    """Equivocation-grade bound at M = floor(e^{nR}) against the limit R - H(A|E)."""
    P = load_distribution(dist_path)
    M = max(2, floor_exp(n * R))
    rep = _guard(bound_equivocation, P, M, eps, n=n)
    H = cond_entropy(P)
    record = {
        "n": n,
        "R": R,
        "log_M": math.log(M),
        "bound": rep.value,
        "per_symbol": rep.value / n,
        "limit": max(R - H, 0.0),
        "Rprime": _finite(rep.Rprime),
    }
    _emit_json(_scale(record, ctx.obj["bits"], {"bound", "log_M"}))


@main.command("family-audit")
@click.option("--kind", required=True, type=click.Choice(["full-random", "toeplitz", "modified-toeplitz"]))
@click.option("--q", "q", required=True, type=int)
@click.option("--n", "n", required=True, type=click.IntRange(min=1))
@click.option("--m", "m", required=True, type=click.IntRange(min=1))
@click.option("--surjective-only", is_flag=True, help="Condition the family on its full-rank members.")
def family_audit_cmd(kind, q, n, m, surjective_only):
    """Enumerate a hash family and report both epsilons and the kernel ensemble's bias."""
    spec = _guard(field_spec, q)
    fam = _guard(make_family, kind.replace("-", "_"), spec, n, m, surjective_only=surjective_only)
    audit = family_audit(fam)
    audit["non_surjective_members"] = len(fam.non_surjective())
    _emit_json(audit)


@main.command()
@click.option("--corpus", required=True, type=click.Choice(["builtin", "random"]))
@click.option("--seed", type=int, default=None)
@click.option("--count", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the full report here.")
def verify(corpus, seed, count, out):
    """Run the verification corpus; exit 0 when every check passes, 1 otherwise."""
    if corpus == "random" and seed is None:
        raise InputError("--seed is required for the random corpus")
    report = run_suite(corpus, seed=seed, count=count)
    summary = {k: report[k] for k in ("corpus", "seed", "count", "failed", "failed_ids", "passed")}
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, allow_nan=False)
            fh.write("\n")
    _emit_json(summary)
    sys.exit(0 if report["passed"] else 1)


if __name__ == "__main__":
    main()
