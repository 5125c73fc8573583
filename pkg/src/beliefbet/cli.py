"""Command line front end: transform tables, price gambles, audit models,
and score transaction ledgers, all through JSON documents.

Exit codes: 0 success (for ``audit``: the model passed), 1 the audit found
the model not belief-consistent, 2 malformed input (schema violations,
space mismatches), 3 endpoint axiom violation on a belief table.

Documents use one schema per role; subsets are keyed by comma-joined
labels in canonical space order (empty string for the empty set), and all
subset listings are emitted in ascending mask order.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from datetime import datetime, timezone
from typing import Any, Sequence

import numpy as np

from . import __version__
from .audit import (
    AuditReport,
    SamplePlan,
    TransactionLedger,
    ViolationCertificate,
    belief_consistency_audit,
    exposure_profile,
    sure_loss_exposure,
)
from .errors import EndpointViolationError, BeliefBetError, SchemaError, SpaceMismatchError
from .previsions import (
    ChoquetModel,
    Gamble,
    LinearModel,
    LowerEnvelopeModel,
    PriceModel,
    buy,
    induced_set_function,
    sell,
)
from .setfn import (
    DEFAULT_TOL,
    EXACT_TOL,
    MassFunction,
    OutcomeSpace,
    SetFunction,
    belief_to_mass,
    make_space,
    mass_to_belief,
    mobius_transform,
)

_MODEL_KINDS = ("linear", "choquet", "lower_envelope")


# ---------------------------------------------------------------- loading


def _load_document(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: top level must be an object")
    return doc


def _digest(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _space_from(doc: dict) -> OutcomeSpace:
    labels = doc.get("space")
    if not isinstance(labels, list) or not labels:
        raise SchemaError("field 'space' must be a nonempty list of labels")
    for lab in labels:
        if not isinstance(lab, str) or not lab:
            raise SchemaError(f"outcome labels must be nonempty strings, got {lab!r}")
        if "," in lab:
            raise SchemaError(f"outcome labels cannot contain commas: {lab!r}")
    try:
        return make_space(labels)
    except BeliefBetError as exc:
        raise SchemaError(str(exc)) from exc


def subset_key(space: OutcomeSpace, mask: int) -> str:
    """Comma-joined labels in canonical order; empty string for the empty set."""
    return ",".join(space.members(mask))


def parse_subset_key(space: OutcomeSpace, key: str) -> int:
    if key == "":
        return 0
    names = key.split(",")
    if len(set(names)) != len(names):
        raise SchemaError(f"subset key repeats a label: {key!r}")
    try:
        return space.mask_of(names)
    except KeyError as exc:
        raise SchemaError(f"subset key {key!r}: {exc.args[0]}") from exc


def _number(value: Any, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{what} must be a number, got {value!r}")
    return float(value)


def _vector(value: Any, what: str) -> list[float]:
    if not isinstance(value, list):
        raise SchemaError(f"{what} must be a list of numbers")
    return [_number(v, what) for v in value]


def _mass_from(doc: dict, space: OutcomeSpace) -> MassFunction:
    payload = doc.get("mass")
    if not isinstance(payload, dict) or not payload:
        raise SchemaError("field 'mass' must be a nonempty object of subset keys to weights")
    weights: dict[int, float] = {}
    for key, value in payload.items():
        if not isinstance(key, str):
            raise SchemaError(f"subset keys must be strings, got {key!r}")
        mask = parse_subset_key(space, key)
        if mask in weights:
            raise SchemaError(f"subset {key!r} listed twice")
        weights[mask] = _number(value, f"mass[{key!r}]")
    try:
        return MassFunction(space, weights)
    except BeliefBetError as exc:
        raise SchemaError(str(exc)) from exc


def _set_function_from(doc: dict, space: OutcomeSpace) -> SetFunction:
    payload = doc.get("values")
    if not isinstance(payload, dict):
        raise SchemaError("field 'values' must be an object of subset keys to numbers")
    values = np.zeros(space.size)
    seen = set()
    for key, value in payload.items():
        if not isinstance(key, str):
            raise SchemaError(f"subset keys must be strings, got {key!r}")
        mask = parse_subset_key(space, key)
        if mask in seen:
            raise SchemaError(f"subset {key!r} listed twice")
        seen.add(mask)
        values[mask] = _number(value, f"values[{key!r}]")
    if len(seen) != space.size:
        raise SchemaError(
            f"'values' must cover all {space.size} subsets, got {len(seen)}"
        )
    try:
        return SetFunction(space, values)
    except BeliefBetError as exc:
        raise SchemaError(str(exc)) from exc


def _model_from(doc: dict) -> PriceModel:
    space = _space_from(doc)
    kind = doc.get("kind")
    try:
        if kind == "linear":
            return LinearModel(space, np.array(_vector(doc.get("prob"), "prob")))
        if kind == "choquet":
            return ChoquetModel(_mass_from(doc, space))
        if kind == "lower_envelope":
            rows = doc.get("rows")
            if not isinstance(rows, list) or not rows:
                raise SchemaError("field 'rows' must be a nonempty list of probability vectors")
            return LowerEnvelopeModel(
                space, np.array([_vector(r, "row") for r in rows])
            )
    except SchemaError:
        raise
    except BeliefBetError as exc:
        raise SchemaError(str(exc)) from exc
    raise SchemaError(f"model kind must be one of {_MODEL_KINDS}, got {kind!r}")


def _gambles_from(doc: dict) -> tuple[OutcomeSpace, list[tuple[str, Gamble]]]:
    space = _space_from(doc)
    payload = doc.get("gambles")
    if not isinstance(payload, list) or not payload:
        raise SchemaError("field 'gambles' must be a nonempty list")
    out = []
    for i, entry in enumerate(payload):
        if not isinstance(entry, dict):
            raise SchemaError("each gamble must be an object with a 'payoff' field")
        name = entry.get("name", f"g{i + 1}")
        if not isinstance(name, str):
            raise SchemaError(f"gamble name must be a string, got {name!r}")
        payoff = _vector(entry.get("payoff"), f"payoff of {name}")
        try:
            out.append((name, Gamble(space, np.array(payoff))))
        except BeliefBetError as exc:
            raise SchemaError(str(exc)) from exc
    return space, out


def _ledger_from(doc: dict) -> tuple[OutcomeSpace, TransactionLedger]:
    space = _space_from(doc)

    def side(field: str) -> tuple[tuple[Gamble, float], ...]:
        payload = doc.get(field, [])
        if not isinstance(payload, list):
            raise SchemaError(f"field {field!r} must be a list")
        out = []
        for entry in payload:
            if not isinstance(entry, dict) or "payoff" not in entry or "price" not in entry:
                raise SchemaError(f"each {field} entry needs 'payoff' and 'price' fields")
            payoff = _vector(entry["payoff"], f"{field} payoff")
            price = _number(entry["price"], f"{field} price")
            try:
                out.append((Gamble(space, np.array(payoff)), price))
            except BeliefBetError as exc:
                raise SchemaError(str(exc)) from exc
        return tuple(out)

    try:
        return space, TransactionLedger(side("buys"), side("sells"))
    except BeliefBetError as exc:
        raise SchemaError(str(exc)) from exc


# ------------------------------------------------------------- rendering


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _machine(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _gamble_doc(g: Gamble) -> dict:
    return {"payoff": [float(v) for v in g.payoff]}


def _describe_gamble(space: OutcomeSpace, g: Gamble) -> str:
    """Indicator-aware rendering: 1_{a,b} and w*1_{a,b} stay readable."""
    nonzero = np.flatnonzero(g.payoff != 0.0)
    distinct = set(float(v) for v in g.payoff[nonzero])
    if len(distinct) == 1 and nonzero.size:
        w = distinct.pop()
        mask = 0
        for i in nonzero:
            mask |= 1 << int(i)
        body = "{" + subset_key(space, mask) + "}"
        return f"1_{body}" if w == 1.0 else f"{_fmt(w)}*1_{body}"
    if not nonzero.size:
        return "0"
    return "(" + ", ".join(_fmt(v) for v in g.payoff) + ")"


def _certificate_doc(space: OutcomeSpace, cert: ViolationCertificate) -> dict:
    doc: dict[str, Any] = {
        "kind": cert.kind,
        "buy_gap": cert.buy_gap,
        "xs": [_gamble_doc(g) for g in cert.xs],
        "ys": [_gamble_doc(g) for g in cert.ys],
    }
    if cert.kind == "negative_mass":
        doc["subset"] = subset_key(space, cert.witness.subset)
        doc["mass"] = cert.witness.mass
    else:
        doc["gamble"] = _gamble_doc(cert.witness.gamble)
        doc["model_price"] = cert.witness.model_price
        doc["choquet_price"] = cert.witness.choquet_price
    return doc


def _certificate_lines(space: OutcomeSpace, cert: ViolationCertificate) -> list[str]:
    lines = [f"certificate ({cert.kind}):"]
    if cert.kind == "negative_mass":
        lines.append(
            f"  subset {{{subset_key(space, cert.witness.subset)}}} "
            f"carries weight {_fmt(cert.witness.mass)}"
        )
    else:
        lines.append(
            f"  gamble {_describe_gamble(space, cert.witness.gamble)}: "
            f"model price {_fmt(cert.witness.model_price)}, "
            f"choquet price {_fmt(cert.witness.choquet_price)}"
        )
    lines.append("  xs: " + ", ".join(_describe_gamble(space, g) for g in cert.xs))
    lines.append("  ys: " + ", ".join(_describe_gamble(space, g) for g in cert.ys))
    lines.append(f"  buy gap: {_fmt(cert.buy_gap)}")
    return lines


def _mass_doc(mass: MassFunction) -> dict:
    return {subset_key(mass.space, m): w for m, w in mass.weights.items()}


# -------------------------------------------------------------- commands


def _cmd_transform(args: argparse.Namespace) -> int:
    doc = _load_document(args.input)
    space = _space_from(doc)
    kind = doc.get("kind")
    if args.to == "belief":
        if kind == "mass" or kind == "choquet":
            mass = _mass_from(doc, space)
        else:
            raise SchemaError(
                f"direction 'belief' needs a mass or choquet document, got kind {kind!r}"
            )
        bel = mass_to_belief(mass)
        out_doc = {
            "space": list(space.labels),
            "kind": "belief",
            "values": {subset_key(space, m): float(bel.values[m]) for m in range(space.size)},
        }
        if args.format == "machine":
            _emit(_machine(out_doc), args.out)
        else:
            lines = [
                f"{{{subset_key(space, m)}}}: {_fmt(bel.values[m])}" for m in range(space.size)
            ]
            _emit("\n".join(lines) + "\n", args.out)
        return 0

    if kind == "belief":
        table = _set_function_from(doc, space)
    elif kind in _MODEL_KINDS:
        table = induced_set_function(_model_from(doc))
    else:
        raise SchemaError(
            f"direction 'mass' needs a belief table or model document, got kind {kind!r}"
        )
    result = belief_to_mass(table, tol=args.tol)
    mob = mobius_transform(table.values)
    if isinstance(result, MassFunction):
        if args.format == "machine":
            out_doc = {
                "space": list(space.labels),
                "kind": "mass",
                "mass": _mass_doc(result),
            }
            _emit(_machine(out_doc), args.out)
        else:
            lines = [
                f"{{{subset_key(space, m)}}}: {_fmt(w)}" for m, w in result.weights.items()
            ]
            _emit("\n".join(lines) + "\n", args.out)
        return 0
    negatives = dict(result.entries)
    visible = [m for m in range(space.size) if abs(mob[m]) > EXACT_TOL]
    if args.format == "machine":
        out_doc = {
            "space": list(space.labels),
            "kind": "negative_mass_report",
            "mobius": {subset_key(space, m): float(mob[m]) for m in visible},
            "negative": {subset_key(space, m): v for m, v in result.entries},
        }
        _emit(_machine(out_doc), args.out)
    else:
        lines = []
        for m in visible:
            flag = "  NEGATIVE" if m in negatives else ""
            lines.append(f"{{{subset_key(space, m)}}}: {_fmt(mob[m])}{flag}")
        lines.append(f"{len(negatives)} subset(s) carry negative weight; not a belief function")
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_price(args: argparse.Namespace) -> int:
    pm = _model_from(_load_document(args.model))
    space, gambles = _gambles_from(_load_document(args.gambles))
    if space != pm.space:
        raise SchemaError("model and gamble documents use different spaces")
    rows = [(name, buy(pm, g), sell(pm, g)) for name, g in gambles]
    if args.format == "machine":
        out_doc = {
            "space": list(space.labels),
            "prices": [{"name": n, "buy": b, "sell": s} for n, b, s in rows],
        }
        _emit(_machine(out_doc), args.out)
    else:
        lines = [f"{n}: buy={_fmt(b)} sell={_fmt(s)}" for n, b, s in rows]
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def _probe_doc(report: AuditReport) -> dict:
    return {
        name: {
            "worst_slack": probe.worst_slack,
            "checked": probe.checked,
            "passed": probe.passed,
        }
        for name, probe in report.coherence.probes.items()
    }


def _report_doc(args: argparse.Namespace, report: AuditReport) -> dict:
    space = report.space
    doc: dict[str, Any] = {
        "tool": {"name": "beliefbet", "version": __version__},
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "input": {"path": args.model, "sha256": _digest(args.model)},
        "space": list(space.labels),
        "model_kind": report.model_kind,
        "plan": {
            "num_samples": report.plan.num_samples,
            "payoff_range": list(report.plan.payoff_range),
            "seed": report.plan.seed,
            "num_ledgers": report.plan.num_ledgers,
        },
        "tolerances": report.tolerances,
        "coherence_probes": _probe_doc(report),
        "sure_loss_worst": report.sure_loss_worst,
        "is_probability": report.is_probability,
        "probability_witness": (
            None
            if report.probability_witness is None
            else [subset_key(space, m) for m in report.probability_witness]
        ),
        "is_belief_consistent": report.is_belief_consistent,
    }
    if isinstance(report.induced_mass, MassFunction):
        doc["induced_mass"] = _mass_doc(report.induced_mass)
    else:
        doc["induced_mass"] = None
        doc["negative_mass"] = {
            subset_key(space, m): v for m, v in report.induced_mass.entries
        }
    doc["certificate"] = (
        None
        if report.certificate is None
        else _certificate_doc(space, report.certificate)
    )
    doc["certificate_verified"] = report.certificate_verified
    return doc


def _report_lines(report: AuditReport) -> list[str]:
    space = report.space
    lines = [
        f"model: {report.model_kind} on {{{','.join(space.labels)}}}",
        f"seed {report.plan.seed}, {report.plan.num_samples} samples, tol {_fmt(report.tolerances['tol'])}",
    ]
    for name, probe in report.coherence.probes.items():
        status = "ok" if probe.passed == probe.checked else "FAIL"
        lines.append(
            f"coherence {name}: worst slack {_fmt(probe.worst_slack)} "
            f"({probe.passed}/{probe.checked}) {status}"
        )
    if report.sure_loss_worst is not None:
        lines.append(f"sure-loss worst exposure: {_fmt(report.sure_loss_worst)}")
    lines.append(f"prices additive (probability): {report.is_probability}")
    if report.probability_witness is not None:
        a, b = report.probability_witness
        lines.append(
            f"  additivity fails on {{{subset_key(space, a)}}} and {{{subset_key(space, b)}}}"
        )
    if report.is_belief_consistent:
        mass = report.induced_mass
        lines.append("VERDICT: belief-consistent")
        lines.append("recovered mass:")
        for m, w in mass.weights.items():
            lines.append(f"  {{{subset_key(space, m)}}}: {_fmt(w)}")
    else:
        lines.append("VERDICT: NOT belief-consistent")
        lines.extend(_certificate_lines(space, report.certificate))
        lines.append(f"certificate verified: {report.certificate_verified}")
    return lines


def _cmd_audit(args: argparse.Namespace) -> int:
    pm = _model_from(_load_document(args.model))
    plan = SamplePlan(num_samples=args.samples, seed=args.seed)
    report = belief_consistency_audit(pm, plan, tol=args.tol)
    if args.format == "machine":
        _emit(_machine(_report_doc(args, report)), args.out)
    else:
        _emit("\n".join(_report_lines(report)) + "\n", args.out)
    return 0 if report.is_belief_consistent else 1


def _cmd_dutchbook(args: argparse.Namespace) -> int:
    pm = _model_from(_load_document(args.model))
    space, ledger = _ledger_from(_load_document(args.ledger))
    if space != pm.space:
        raise SchemaError("model and ledger documents use different spaces")
    profile = exposure_profile(ledger)
    exposure = sure_loss_exposure(pm, ledger)
    best = int(np.argmax(profile))
    dutch = exposure < -args.tol
    if args.format == "machine":
        out_doc = {
            "space": list(space.labels),
            "exposure": exposure,
            "best_outcome": space.labels[best],
            "profile": {space.labels[i]: float(profile[i]) for i in range(space.n)},
            "dutch_book": bool(dutch),
        }
        _emit(_machine(out_doc), args.out)
    else:
        lines = [f"exposure: {_fmt(exposure)} (best outcome: {space.labels[best]})"]
        if dutch:
            lines.append("*** DUTCH BOOK: these prices lose at every outcome ***")
        _emit("\n".join(lines) + "\n", args.out)
    return 0


# ------------------------------------------------------------------ main


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("human", "machine"), default="human")
    parser.add_argument("--out", default=None, help="write output to this file")
    parser.add_argument("--tol", type=float, default=DEFAULT_TOL)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beliefbet",
        description="Price gambles against epistemic uncertainty models and audit their consistency.",
    )
    parser.add_argument("--version", action="version", version=f"beliefbet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transform", help="convert between mass and belief tables")
    p.add_argument("input", help="mass, belief table, or model document")
    p.add_argument("--to", choices=("belief", "mass"), required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_transform)

    p = sub.add_parser("price", help="buy and sell prices of gambles under a model")
    p.add_argument("model")
    p.add_argument("gambles")
    _add_common(p)
    p.set_defaults(func=_cmd_price)

    p = sub.add_parser("audit", help="full consistency audit of a model")
    p.add_argument("model")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=256)
    _add_common(p)
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("dutchbook", help="net exposure of a ledger at quoted prices")
    p.add_argument("model")
    p.add_argument("ledger")
    _add_common(p)
    p.set_defaults(func=_cmd_dutchbook)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"beliefbet: schema error: {exc}", file=sys.stderr)
        return 2
    except EndpointViolationError as exc:
        print(f"beliefbet: endpoint axiom violation: {exc}", file=sys.stderr)
        return 3
    except SpaceMismatchError as exc:
        print(f"beliefbet: {exc}", file=sys.stderr)
        return 2
    except BeliefBetError as exc:
        print(f"beliefbet: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
