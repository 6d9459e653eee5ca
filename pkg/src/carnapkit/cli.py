"""Command-line surface: updating, audits, elicitation, weights, simulation.

One binary with subcommands. All randomness flows from --seed, every
artifact embeds the resolved configuration (JSON) or gets a .config.json
sidecar (CSV/SVG), and identical inputs with the same seed produce
byte-identical outputs.

Exit codes: 0 success, 2 schema error, 3 domain error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from .core import (
    CarnapkitError,
    DiseaseSpace,
    DomainError,
    Evidence,
    NumericalError,
    SchemaError,
    evidence_from_json,
    interval_from_json,
    space_from_json,
)
from .carnap import (
    CarnapModel,
    check_disjoint_causality,
    check_exchangeability,
    check_positive_relatedness,
    check_utility_stability,
    identify,
    update,
)
from .agents import UrnAgent, agent_from_json
from .nonadditive import (
    CapacityTable,
    StreamSpec,
    WeightingFamily,
    debias,
    degeneracy_experiment,
    fit_w,
    nonadditivity_flags,
)
from .tradeoff import (
    TradeoffRecord,
    detect_tradeoff_inconsistency,
    elicit_standard_sequence,
    probe_tradeoff_records,
    tradeoff_pairs,
    utility_from_sequence,
)
from .utility import utility_to_json
from . import svg

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_DOMAIN = 3
EXIT_NUMERICAL = 4


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise SchemaError(f"input file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON in {path}: {exc}") from exc


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _config_of(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _write_json(path: Path, payload: dict, args) -> None:
    payload = {"config": _config_of(args), **payload}
    path.write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"wrote {path}")


def _write_sidecar(path: Path, args) -> None:
    sidecar = path.with_suffix(path.suffix + ".config.json")
    sidecar.write_text(
        json.dumps(_config_of(args), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def _write_text(path: Path, text: str, args) -> None:
    path.write_text(text, encoding="utf-8")
    _write_sidecar(path, args)
    print(f"wrote {path}")


def _space_of(obj, fallback_size: int | None = None) -> DiseaseSpace:
    if isinstance(obj, dict) and "diseases" in obj:
        return space_from_json(obj)
    if fallback_size is None:
        raise SchemaError('input needs a "diseases" array')
    return DiseaseSpace(tuple(f"d{i + 1}" for i in range(fallback_size)))


# --- subcommands ---------------------------------------------------------------


def cmd_update(args) -> int:
    raw_model = _load_json(args.model)
    model = CarnapModel.from_json(raw_model)
    space = _space_of(raw_model, fallback_size=model.size)
    evidence = evidence_from_json(_load_json(args.evidence), space)
    report = update(model, evidence)
    out = _out_dir(args)
    _write_json(
        out / "update.json",
        {
            **report.to_json(),
            "diseases": list(space.labels),
            # the posterior is itself a usable prior with the strength bumped
            "prior": list(report.posterior),
            "lambda": model.lam + evidence.total,
            "horizon": model.horizon,
        },
        args,
    )
    if args.format == "csv":
        lines = ["disease,prior,count,posterior"]
        for label, p0, n, p in zip(
            space.labels, model.prior, report.counts, report.posterior
        ):
            lines.append(f"{label},{p0!r},{n:g},{p!r}")
        _write_text(out / "update.csv", "\n".join(lines) + "\n", args)
    return EXIT_OK


def _random_evidence(rng: random.Random, agent, max_len: int) -> Evidence:
    space = agent.space
    if isinstance(agent, UrnAgent):
        remaining = list(agent.tickets)
        length = rng.randrange(0, max_len + 1)
        obs = []
        for _ in range(length):
            open_idx = [i for i, r in enumerate(remaining) if r > 1]
            if len(open_idx) < 2:
                break
            i = rng.choice(open_idx)
            remaining[i] -= 1
            obs.append(space.labels[i])
        return Evidence(space, tuple(obs))
    length = rng.randrange(0, max_len + 1)
    return Evidence(
        space, tuple(rng.choice(space.labels) for _ in range(length))
    )


def run_axiom_audit(
    agent, probes: int, seed: int, horizon: int, tol: float | None = None
) -> dict:
    """Seeded randomized audit of the four updating conditions."""
    from .carnap import CE_TOL

    tol = CE_TOL if tol is None else tol
    rng = random.Random(seed)
    space = agent.space
    model_horizon = getattr(getattr(agent, "model", None), "horizon", horizon)
    max_len = max(0, min(horizon, model_horizon) - 2)
    max_len = min(max_len, 6)

    audit: dict = {}

    witnesses = []
    for _ in range(probes):
        evidence = _random_evidence(rng, agent, max_len)
        disease = rng.choice(space.labels)
        if isinstance(agent, UrnAgent):
            counts = dict(zip(space.labels, evidence.counts()))
            open_labels = [
                d
                for d, k in zip(space.labels, agent.tickets)
                if k - counts[d] >= 1
            ]
            if not open_labels:
                continue
            disease = rng.choice(open_labels)
        ok = check_positive_relatedness(agent, evidence, disease, tol=tol)
        if not ok:
            witnesses.append(
                {"evidence": list(evidence.observations), "disease": disease}
            )
    audit["positive_relatedness"] = {
        "pass": not witnesses,
        "probes": probes,
        "witnesses": witnesses,
    }

    witnesses = []
    for _ in range(probes):
        evidence = _random_evidence(rng, agent, max_len)
        pair = tuple(rng.sample(space.labels, 2))
        res = check_exchangeability(agent, evidence, pair, tol=tol)
        if not res.passed:
            witnesses.append(
                {
                    "evidence": list(evidence.observations),
                    "pair": list(pair),
                    "y": res.y,
                    "y_prime": res.y_prime,
                }
            )
    audit["exchangeability"] = {
        "pass": not witnesses,
        "probes": probes,
        "witnesses": witnesses,
    }

    if space.size < 3:
        audit["disjoint_causality"] = {"pass": None, "status": "inapplicable"}
    else:
        witnesses = []
        for _ in range(probes):
            evidence = _random_evidence(rng, agent, max_len)
            triple = tuple(rng.sample(space.labels, 3))
            res = check_disjoint_causality(agent, evidence, triple, tol=tol)
            if not res.passed:
                witnesses.append(
                    {
                        "evidence": list(evidence.observations),
                        "triple": list(triple),
                        "x": res.x,
                        "x_prime": res.x_prime,
                    }
                )
        audit["disjoint_causality"] = {
            "pass": not witnesses,
            "probes": probes,
            "witnesses": witnesses,
        }

    witnesses = []
    stability_probes = max(1, probes // 5)
    for _ in range(stability_probes):
        ev_a = _random_evidence(rng, agent, max_len)
        ev_b = _random_evidence(rng, agent, max_len)
        if not check_utility_stability(agent, ev_a, ev_b):
            witnesses.append(
                {
                    "evidence_a": list(ev_a.observations),
                    "evidence_b": list(ev_b.observations),
                }
            )
    audit["utility_stability"] = {
        "pass": not witnesses,
        "probes": stability_probes,
        "witnesses": witnesses,
    }
    return audit


def cmd_axioms(args) -> int:
    agent = agent_from_json(_load_json(args.agent))
    audit = run_axiom_audit(
        agent, args.probes, args.seed, args.horizon, tol=args.tol
    )
    _write_json(_out_dir(args) / "axioms.json", {"audit": audit}, args)
    return EXIT_OK


def cmd_identify(args) -> int:
    agent = agent_from_json(_load_json(args.agent))
    result = identify(agent)
    _write_json(_out_dir(args) / "identify.json", result.to_json(), args)
    return EXIT_OK


def cmd_elicit(args) -> int:
    agent = agent_from_json(_load_json(args.agent))
    space = agent.space
    event = space.event(args.event.split(","))
    evidence = Evidence(space, tuple(args.evidence.split(",")) if args.evidence else ())
    seq = elicit_standard_sequence(
        agent, event, (args.gauge_low, args.gauge_high), args.start, args.steps,
        evidence,
    )
    curve = utility_from_sequence(seq)
    out = _out_dir(args)
    _write_json(
        out / "elicit.json",
        {
            "points": list(seq.points),
            "gauges": list(seq.gauges),
            "event": sorted(event.members, key=space.index),
            "utility": utility_to_json(curve),
        },
        args,
    )
    chart = svg.line_chart(
        [("elicited utility", curve.xs, curve.us)],
        "Standard-sequence utility",
        "outcome",
        "utility",
    )
    _write_text(out / "elicit.svg", chart, args)
    return EXIT_OK


def cmd_consistency(args) -> int:
    payload = _load_json(args.input)
    if isinstance(payload, dict) and "kind" in payload:
        agent = agent_from_json(payload)
        records = probe_tradeoff_records(agent, levels=args.levels)
        pairs = tradeoff_pairs(records, agent=agent)
    elif isinstance(payload, dict) and "records" in payload:
        space = space_from_json(payload)
        interval = interval_from_json(payload.get("interval"))
        from .core import act_from_json, event_from_json

        records = []
        for row in payload["records"]:
            records.append(
                TradeoffRecord(
                    alpha=float(row["alpha"]),
                    beta=float(row["beta"]),
                    gamma=float(row["gamma"]),
                    delta=float(row["delta"]),
                    event=event_from_json(row["event"], space),
                    f=act_from_json(row["f"], space, interval),
                    g=act_from_json(row["g"], space, interval),
                    evidence=evidence_from_json(row.get("evidence"), space),
                )
            )
        pairs = tradeoff_pairs(records)
    else:
        raise SchemaError('consistency input needs either "kind" or "records"')
    violations = detect_tradeoff_inconsistency(
        pairs, **({} if args.tol is None else {"tol": args.tol})
    )
    _write_json(
        _out_dir(args) / "consistency.json",
        {"pairs": len(pairs), "violations": violations},
        args,
    )
    return EXIT_OK


def cmd_weights(args) -> int:
    payload = _load_json(args.input)
    if not isinstance(payload, dict) or "samples" not in payload:
        raise SchemaError('weights input needs {"samples": [[p, W], ...]}')
    family = str(payload.get("family", args.family))
    fit = fit_w([(row[0], row[1]) for row in payload["samples"]], family)
    out = _out_dir(args)
    _write_json(
        out / "weights.json",
        {
            "fit": fit.weighting.to_json(),
            "residual": fit.residual,
            "constrained": fit.constrained,
        },
        args,
    )
    grid = [k / 200 for k in range(201)]
    chart = svg.line_chart(
        [
            ("fitted w", grid, [fit.weighting(p) for p in grid]),
            ("diagonal", (0.0, 1.0), (0.0, 1.0)),
            (
                "samples",
                [row[0] for row in payload["samples"]],
                [row[1] for row in payload["samples"]],
            ),
        ],
        "Probability weighting",
        "probability",
        "decision weight",
    )
    _write_text(out / "weights.svg", chart, args)
    return EXIT_OK


def cmd_debias(args) -> int:
    payload = _load_json(args.input)
    table = CapacityTable.from_json(payload)
    if "weighting" in payload:
        weighting = WeightingFamily.from_json(payload["weighting"])
    elif args.weighting:
        weighting = WeightingFamily.from_json(json.loads(args.weighting))
    else:
        raise SchemaError("no weighting given (input field or --weighting)")
    corrected = debias(table, weighting)
    _write_json(
        _out_dir(args) / "debias.json",
        {
            "phi": corrected.to_json(),
            "weighting": weighting.to_json(),
            "flags": nonadditivity_flags(table),
            "monotonicity_violations": table.monotonicity_violations(),
        },
        args,
    )
    return EXIT_OK


def cmd_simulate(args) -> int:
    payload = _load_json(args.input)
    space = _space_of(payload)
    stream = StreamSpec(tuple(payload["q"]), float(payload["support"]))
    steps = int(payload.get("steps", 200))
    lam = float(payload.get("lambda", 1.0))
    weighting = (
        WeightingFamily.from_json(payload["weighting"])
        if "weighting" in payload
        else WeightingFamily.tk(0.61)
    )
    runs = int(payload.get("runs", 1))
    out = _out_dir(args)
    finals = []
    for run in range(runs):
        seed = args.seed + run
        result = degeneracy_experiment(space, stream, steps, seed, lam, weighting)
        path = out / f"trajectory_seed{seed}.csv"
        with open(path, "w", encoding="utf-8") as fh:
            result.write_csv(fh)
        _write_sidecar(path, args)
        print(f"wrote {path}")
        finals.append(
            {
                "seed": seed,
                "bel": result.final("bel"),
                "carnap": result.final("carnap"),
                "phi": result.final("phi"),
                "conflict_steps": result.conflicts,
            }
        )
        if run == 0:
            steps_axis = list(range(steps + 1))
            series = []
            for label in space.labels:
                series.append(
                    (f"bel {label}", steps_axis, result.series("bel", label))
                )
            for label in space.labels:
                series.append(
                    (f"p {label}", steps_axis, result.series("carnap", label))
                )
            chart = svg.line_chart(
                series,
                "Iterated combination vs additive updating",
                "step",
                "value",
            )
            _write_text(out / "trajectory.svg", chart, args)
    _write_json(out / "simulate.json", {"finals": finals}, args)
    return EXIT_OK


# --- entry point -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="carnapkit",
        description="Inductive updating, preference audits, and weight debiasing.",
    )
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--tol", type=float, default=None, help="override tolerance")
    parser.add_argument(
        "--format", choices=("json", "csv"), default="csv", help="extra output format"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("update", help="apply the mixing rule to evidence")
    p.add_argument("model", help="model JSON: prior, lambda, horizon")
    p.add_argument("evidence", help="evidence JSON: array of labels")
    p.set_defaults(func=cmd_update)

    p = sub.add_parser("axioms", help="audit the updating conditions of an agent")
    p.add_argument("agent", help="agent JSON")
    p.add_argument("--probes", type=int, default=20)
    p.add_argument("--horizon", type=int, default=10)
    p.set_defaults(func=cmd_axioms)

    p = sub.add_parser("identify", help="recover lambda and the prior from preferences")
    p.add_argument("agent", help="agent JSON")
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("elicit", help="elicit a standard sequence and utility curve")
    p.add_argument("agent", help="agent JSON")
    p.add_argument("--event", required=True, help="comma-separated member labels")
    p.add_argument("--gauge-low", type=float, default=0.0)
    p.add_argument("--gauge-high", type=float, required=True)
    p.add_argument("--start", type=float, default=0.0)
    p.add_argument("--steps", type=int, default=6)
    p.add_argument("--evidence", default="", help="comma-separated labels")
    p.set_defaults(func=cmd_elicit)

    p = sub.add_parser("consistency", help="hunt for tradeoff contradictions")
    p.add_argument("input", help="agent JSON or {records: [...]} JSON")
    p.add_argument("--levels", type=int, default=8)
    p.set_defaults(func=cmd_consistency)

    p = sub.add_parser("weights", help="fit a probability weighting function")
    p.add_argument("input", help='JSON with "samples": [[p, W], ...]')
    p.add_argument("--family", default="tk")
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("debias", help="correct decision weights for the distortion")
    p.add_argument("input", help="capacity table JSON")
    p.add_argument("--weighting", default=None, help='JSON, e.g. {"family":"tk",...}')
    p.set_defaults(func=cmd_debias)

    p = sub.add_parser("simulate", help="run the iterated-updating contrast")
    p.add_argument("input", help="stream spec JSON: diseases, q, support, steps")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except CarnapkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
