"""Command-line surface: simulate -> analyze -> estimate -> compare ->
history -> report.

Exit codes: 0 success; 2 input or validation error; 3 a requested metric
lacks required hardware-spec fields; 4 an actionability alert fired (report
only), so CI can gate on energy regressions.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import compare as cmp
from . import energy as en
from . import files, model as mdl, report as rpt, store as st, workload as wl
from .simulate import InputMode, SimulationConfig, run_inference

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_MISSING_SPEC = 3
EXIT_ALERT = 4

STORE_ENV_VAR = "SPIKEMETER_STORE"

EXTRA_METRICS = (
    "power_density",
    "energy_per_sop",
    "energy_area_fom",
    "estimated_battery_life",
    "inferences_per_battery_cycle",
)


def _dump(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _emit_metrics(rows: list[dict], fmt: str) -> None:
    if fmt == "jsonl":
        for row in rows:
            print(_dump({"record": "metric", **row}))
    else:
        for row in rows:
            unit = f" {row['unit']}" if row.get("unit") else ""
            note = f"  # {row['note']}" if row.get("note") else ""
            print(f"{row['key']} = {row['value']:.12g}{unit} [{row['provenance']}]{note}")


def _static_metrics(m: mdl.ModelDescriptor) -> dict[str, float]:
    params = mdl.count_parameters(m)
    out = {
        "parameters": float(params.total),
        "parameters_trainable": float(params.trainable),
        "parameters_non_trainable": float(params.non_trainable),
        "memory_footprint": float(mdl.memory_footprint(m)),
    }
    try:
        out["connection_sparsity"] = mdl.connection_sparsity(m)
    except mdl.ModelValidationError:
        pass  # input-only model has no connections
    return out


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def cmd_simulate(args: argparse.Namespace) -> int:
    m = mdl.load_model(args.model)
    workload = files.load_workload(args.workload)
    timesteps = args.timesteps
    if workload.timesteps is not None:
        if timesteps is not None and timesteps != workload.timesteps:
            raise files.WorkloadFileError(
                f"--timesteps {timesteps} conflicts with workload file "
                f"({workload.timesteps})"
            )
        timesteps = workload.timesteps
    if timesteps is None:
        raise files.WorkloadFileError("rates workloads need --timesteps")
    config = SimulationConfig(
        timesteps=timesteps,
        seed=args.seed,
        input_mode=InputMode.RATE if workload.kind == "rates" else InputMode.DIRECT,
        timestep_duration=args.timestep_duration,
    )
    train = files.prepare_input(workload, config)
    trace = run_inference(m, train, config)
    trace.static_metrics = _static_metrics(m)

    ops = wl.effective_synops(trace)
    mem = wl.memory_accesses(ops)
    sparsity = wl.activation_sparsity(trace, threshold=args.sparsity_threshold)

    rows = [
        {"key": "acs", "value": float(ops.acs), "unit": "ops", "provenance": "computed"},
        {"key": "macs", "value": float(ops.macs), "unit": "ops", "provenance": "computed"},
        {"key": "effective_synops", "value": float(ops.total_sops), "unit": "ops",
         "provenance": "computed"},
        {"key": "membrane_updates", "value": float(ops.membrane_updates_effective),
         "unit": "updates", "provenance": "computed"},
        {"key": "membrane_updates_dense", "value": float(ops.membrane_updates_dense),
         "unit": "updates", "provenance": "computed"},
        {"key": "memory_reads", "value": float(mem.reads), "unit": "accesses",
         "provenance": "computed"},
        {"key": "memory_writes", "value": float(mem.writes), "unit": "accesses",
         "provenance": "computed"},
        {"key": "activation_sparsity", "value": sparsity.activation_sparsity, "unit": "ratio",
         "provenance": "computed"},
        {"key": "duration", "value": trace.duration, "unit": "s", "provenance": "computed"},
    ]
    _emit_metrics(rows, args.format)
    if sparsity.alert:
        if args.format == "jsonl":
            print(_dump({"record": "note", "text": sparsity.alert}))
        else:
            print(f"note: {sparsity.alert}")
    if args.trace_out:
        files.save_trace(trace, args.trace_out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


def cmd_analyze(args: argparse.Namespace) -> int:
    m = mdl.load_model(args.model)
    values = _static_metrics(m)
    units = {
        "parameters": "count",
        "parameters_trainable": "count",
        "parameters_non_trainable": "count",
        "memory_footprint": "bytes",
        "connection_sparsity": "ratio",
    }
    rows = [
        {"key": key, "value": value, "unit": units[key], "provenance": "computed"}
        for key, value in values.items()
    ]
    _emit_metrics(rows, args.format)
    if args.record:
        store = _require_store(args)
        for key in ("parameters_trainable", "parameters_non_trainable"):
            st.register_metric(store, key, unit="count")
        st.record_snapshot(
            store,
            st.MetricSnapshot(
                model_name=m.name,
                version=args.version or m.version,
                values=values,
                timestamp=args.timestamp,
            ),
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# estimate
# ---------------------------------------------------------------------------


def _load_counts(path: str) -> tuple[wl.OpCounts, int, float | None]:
    raw = json.loads(open(path).read())
    ops = wl.OpCounts(
        macs=int(raw.get("macs", 0)),
        acs=int(raw.get("acs", 0)),
        membrane_updates_effective=int(raw.get("membrane_updates_effective", 0)),
        membrane_updates_dense=int(
            raw.get("membrane_updates_dense", raw.get("membrane_updates_effective", 0))
        ),
        leak_macs=int(raw.get("leak_macs", 0)),
    )
    return ops, int(raw.get("crossings", 0)), raw.get("duration")


def cmd_estimate(args: argparse.Namespace) -> int:
    spec = en.load_hardware_spec(args.hwspec)
    trace = None
    if args.trace:
        trace = files.load_trace(args.trace)
        ops = wl.effective_synops(trace)
        crossings = trace.total_crossings
        duration = trace.duration
    else:
        ops, crossings, file_duration = _load_counts(args.counts)
        duration = args.duration if args.duration is not None else file_duration
        if duration is None:
            raise ValueError("--counts input needs --duration (or a duration field)")
    include_leak = not args.exclude_leak_macs
    mem = wl.memory_accesses(ops, include_leak_macs=include_leak)
    breakdown = en.estimate_energy(ops, mem, spec, duration, crossings=crossings)
    power = en.average_power(breakdown)
    edp = cmp.energy_delay_product(breakdown.total, duration)

    rows = [
        {"key": "synop_energy", "value": breakdown.model.synop_energy, "unit": "J",
         "provenance": "estimated"},
        {"key": "membrane_energy", "value": breakdown.model.membrane_energy, "unit": "J",
         "provenance": "estimated"},
        {"key": "memory_energy", "value": breakdown.model.memory_energy, "unit": "J",
         "provenance": "estimated"},
        {"key": "model_total", "value": breakdown.model.model_total, "unit": "J",
         "provenance": "estimated"},
        {"key": "static_energy", "value": breakdown.overhead.static_energy, "unit": "J",
         "provenance": "estimated"},
        {"key": "adc_energy", "value": breakdown.overhead.adc_energy, "unit": "J",
         "provenance": "estimated"},
        {"key": "tx_energy", "value": breakdown.overhead.tx_energy, "unit": "J",
         "provenance": "estimated"},
        {"key": "overhead_total", "value": breakdown.overhead.overhead_total, "unit": "J",
         "provenance": "estimated"},
        {"key": "energy_per_inference", "value": breakdown.total, "unit": "J",
         "provenance": "estimated"},
        {"key": "average_power", "value": power, "unit": "W", "provenance": "estimated"},
        {"key": "energy_delay_product", "value": edp, "unit": "J*s",
         "provenance": "estimated"},
    ]

    requested = EXTRA_METRICS if args.metrics == "auto" else tuple(
        name.strip() for name in args.metrics.split(",") if name.strip()
    )
    unknown = set(requested) - set(EXTRA_METRICS)
    if unknown:
        raise ValueError(f"unknown metrics requested: {sorted(unknown)}")
    optional_values: dict[str, float] = {}
    for name in requested:
        try:
            if name == "power_density":
                density = en.power_density(power, spec)
                optional_values[name] = density.mw_per_cm2
                rows.append(
                    {"key": name, "value": density.mw_per_cm2, "unit": "mW/cm^2",
                     "provenance": "estimated",
                     "note": ("VIOLATION of limit" if density.violation else "within limit")
                     + f" {density.limit_mw_per_cm2:g} mW/cm^2"}
                )
            elif name == "energy_per_sop":
                if trace is None or ops.total_sops == 0:
                    raise en.MissingSpecError(
                        "energy_per_sop needs a trace with at least one synaptic op"
                    )
                sop = en.energy_per_sop(
                    breakdown, ops, trace, spec, include_leak_macs=include_leak
                )
                optional_values[name] = sop.average_pj_per_sop
                rows.append(
                    {"key": name, "value": sop.average_pj_per_sop, "unit": "pJ/SOP",
                     "provenance": "estimated"}
                )
                rows.append(
                    {"key": "peak_window_power", "value": sop.peak_window_power_w,
                     "unit": "W", "provenance": "estimated",
                     "note": "hottest single-timestep window"}
                )
            elif name == "energy_area_fom":
                fom = en.energy_area_fom(power, spec)
                optional_values[name] = fom.value
                rows.append(
                    {"key": name, "value": fom.value, "unit": fom.unit,
                     "provenance": "estimated",
                     "note": f"assumed formula: {fom.formula}"}
                )
            elif name == "estimated_battery_life":
                life = cmp.estimated_battery_life(power, spec)
                optional_values[name] = life.years
                rows.append(
                    {"key": name, "value": life.years, "unit": "years",
                     "provenance": "estimated",
                     "note": ("meets" if life.meets_10y else "MISSES")
                     + f" {life.target_years:g}-year target"}
                )
            elif name == "inferences_per_battery_cycle":
                budget = cmp.inferences_per_battery_cycle(
                    breakdown.total, spec, inference_rate_hz=args.inference_rate
                )
                optional_values[name] = float(budget.idealized)
                note = ""
                if budget.duty_cycled is not None:
                    note = f"duty-cycled at {args.inference_rate:g} Hz: {budget.duty_cycled}"
                rows.append(
                    {"key": name, "value": float(budget.idealized), "unit": "inferences",
                     "provenance": "estimated", "note": note}
                )
        except en.MissingSpecError:
            if args.metrics != "auto":
                raise
    _emit_metrics(rows, args.format)

    if args.record:
        store = _require_store(args)
        model_name = args.model_name or (trace.model_name if trace else "")
        version = args.version or (trace.model_version if trace else "")
        if not model_name or not version:
            raise ValueError("--record needs --model-name/--version (or a trace that carries them)")
        values: dict[str, float] = {}
        provenance: dict[str, str] = {}
        if trace is not None:
            for key, value in trace.static_metrics.items():
                values[key] = value
                provenance[key] = "computed"
            sparsity = wl.activation_sparsity(trace)
            values["activation_sparsity"] = sparsity.activation_sparsity
            provenance["activation_sparsity"] = "computed"
        values["effective_synops"] = float(ops.total_sops)
        values["membrane_updates"] = float(ops.membrane_updates_effective)
        values["memory_accesses"] = float(mem.total)
        values["energy_per_inference"] = breakdown.total
        values["energy_delay_product"] = edp
        values["execution_time"] = duration
        values.update(optional_values)
        for key in ("effective_synops", "membrane_updates", "memory_accesses"):
            provenance[key] = "computed"
        provenance["execution_time"] = "computed"
        for key in optional_values:
            provenance[key] = "estimated"
        provenance["energy_per_inference"] = "estimated"
        provenance["energy_delay_product"] = "estimated"
        for key in ("execution_time", "parameters_trainable", "parameters_non_trainable"):
            if key in values:
                st.register_metric(store, key, unit="s" if key == "execution_time" else "count")
        st.record_snapshot(
            store,
            st.MetricSnapshot(
                model_name=model_name,
                version=version,
                values=values,
                provenance=provenance,
                accuracy=args.accuracy,
                timestamp=args.timestamp,
            ),
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------


def _measurement_from_store(data: st.StoreData, model: str, version: str) -> cmp.VersionMeasurement:
    record = next((r for r in data.history(model) if r.version == version), None)
    if record is None:
        raise ValueError(f"version {version!r} not found for model {model!r} in store")
    energy = st._pick_value(record.values.get("energy_per_inference", {}), None, None)
    duration = st._pick_value(record.values.get("execution_time", {}), None, None)
    if energy is None or duration is None:
        raise ValueError(
            f"version {version!r} lacks energy_per_inference or execution_time values"
        )
    return cmp.VersionMeasurement(
        version=version, energy=energy, time=duration, accuracy=record.accuracy
    )


def cmd_compare(args: argparse.Namespace) -> int:
    if args.old is not None or args.new is not None:
        if not (args.old and args.new):
            raise ValueError("--old and --new must be given together")
        data = st.read_store(_require_store(args))
        old = _measurement_from_store(data, args.model, args.old)
        new = _measurement_from_store(data, args.model, args.new)
    else:
        if args.old_energy is None or args.old_time is None or \
                args.new_energy is None or args.new_time is None:
            raise ValueError(
                "inline comparison needs --old-energy/--old-time/--new-energy/--new-time"
            )
        old = cmp.VersionMeasurement(
            args.old_version, args.old_energy, args.old_time, args.old_accuracy
        )
        new = cmp.VersionMeasurement(
            args.new_version, args.new_energy, args.new_time, args.new_accuracy
        )

    s = cmp.speedup(old, new, as_published=args.as_published)
    g = cmp.greenup(old, new, as_published=args.as_published)
    p = cmp.powerup(s, g)
    orientation = "new/old (as published)" if args.as_published else "old/new (>1 improves)"
    rows = [
        {"key": "speedup", "value": s, "unit": "ratio", "provenance": "computed",
         "note": f"orientation {orientation}"},
        {"key": "greenup", "value": g, "unit": "ratio", "provenance": "estimated",
         "note": f"orientation {orientation}"},
        {"key": "powerup", "value": p, "unit": "ratio", "provenance": "estimated",
         "note": "(>1 means more average power)" if not args.as_published else ""},
        {"key": "energy_delay_product_old", "unit": "J*s", "provenance": "estimated",
         "value": cmp.energy_delay_product(old.energy, old.time)},
        {"key": "energy_delay_product_new", "unit": "J*s", "provenance": "estimated",
         "value": cmp.energy_delay_product(new.energy, new.time)},
    ]
    if old.accuracy is not None and new.accuracy is not None:
        tradeoff = cmp.accuracy_energy_tradeoff(old, new)
        rows.append(
            {"key": "efficiency_ratio_old", "value": tradeoff.efficiency_ratio_old,
             "unit": "accuracy/J", "provenance": "estimated"}
        )
        rows.append(
            {"key": "efficiency_ratio_new", "value": tradeoff.efficiency_ratio_new,
             "unit": "accuracy/J", "provenance": "estimated"}
        )
        if tradeoff.marginal_energy_cost is not None:
            rows.append(
                {"key": "marginal_energy_cost", "value": tradeoff.marginal_energy_cost,
                 "unit": "J per accuracy point", "provenance": "estimated"}
            )
        elif tradeoff.accuracy_regressed:
            rows.append(
                {"key": "accuracy_regressed", "value": 1.0, "unit": "",
                 "provenance": "computed", "note": "accuracy went down"}
            )
        else:
            rows.append(
                {"key": "accuracy_unchanged", "value": 1.0, "unit": "",
                 "provenance": "computed"}
            )
    _emit_metrics(rows, args.format)
    return EXIT_OK


# ---------------------------------------------------------------------------
# history / report
# ---------------------------------------------------------------------------


def cmd_history(args: argparse.Namespace) -> int:
    trend = st.trend_report(
        _require_store(args), args.model, args.metric, provenance=args.provenance
    )
    if args.format == "jsonl":
        print(
            _dump(
                {
                    "record": "trend",
                    "metric": trend.metric,
                    "unit": trend.unit,
                    "direction": trend.direction.value,
                    "series": [[v, x] for v, x in trend.series],
                    "deltas": [
                        {"from": d.from_version, "to": d.to_version,
                         "absolute": d.absolute, "percent": d.percent}
                        for d in trend.deltas
                    ],
                }
            )
        )
    else:
        series = " -> ".join(f"{v}={x:.12g}" for v, x in trend.series)
        print(f"{trend.metric} [{trend.unit}]: {series}")
        for d in trend.deltas:
            pct = f"{d.percent:+.2f}%" if d.percent is not None else "n/a"
            print(f"  {d.from_version} -> {d.to_version}: {d.absolute:+.12g} ({pct})")
        print(f"direction: {trend.direction.value}")
    return EXIT_OK


def _parse_limit_overrides(text: str | None) -> tuple[st.AlertRule, ...]:
    kwargs = {}
    if text:
        mapping = {
            "sparsity": "sparsity_threshold",
            "power_density": "power_density_limit",
            "battery_years": "battery_target_years",
        }
        for part in text.split(","):
            if not part.strip():
                continue
            key, _, value = part.partition("=")
            key = key.strip()
            if key not in mapping:
                raise ValueError(
                    f"unknown limit override {key!r}; expected one of {sorted(mapping)}"
                )
            kwargs[mapping[key]] = float(value)
    return st.default_alert_rules(**kwargs)


def cmd_report(args: argparse.Namespace) -> int:
    rules = _parse_limit_overrides(args.limit_overrides)
    doc = rpt.build_report(_require_store(args), args.model, rules)
    sys.stdout.write(rpt.RENDERERS[args.format](doc))
    return EXIT_ALERT if doc.alerts.violated else EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _require_store(args: argparse.Namespace) -> str:
    store = args.store or os.environ.get(STORE_ENV_VAR)
    if not store:
        raise ValueError(f"no store given (use --store or ${STORE_ENV_VAR})")
    return store


def _add_store_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--store", help=f"trend store path (default ${STORE_ENV_VAR})")


def _add_format_arg(p: argparse.ArgumentParser, choices=("text", "jsonl")) -> None:
    p.add_argument("--format", choices=choices, default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spikemeter",
        description="Energy metrics for spiking neural network workloads",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run an inference and print workload metrics")
    p.add_argument("--model", required=True)
    p.add_argument("--workload", required=True)
    p.add_argument("--timesteps", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timestep-duration", type=float, default=1e-3, help="seconds")
    p.add_argument("--sparsity-threshold", type=float, default=0.60)
    p.add_argument("--trace-out", help="write the full trace to this file")
    _add_format_arg(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="static model metrics")
    p.add_argument("--model", required=True)
    _add_format_arg(p)
    _add_store_arg(p)
    p.add_argument("--record", action="store_true", help="record a snapshot")
    p.add_argument("--version", help="snapshot version (default: model version)")
    p.add_argument("--timestamp", type=float, help="snapshot timestamp override")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("estimate", help="estimate energy from a trace or counts")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--trace")
    src.add_argument("--counts", help="JSON op-counts file (for learning passes etc.)")
    p.add_argument("--hwspec", required=True)
    p.add_argument("--duration", type=float, help="seconds (counts input)")
    p.add_argument(
        "--metrics",
        default="auto",
        help="comma list of extras to require, or 'auto' "
        f"(choices: {', '.join(EXTRA_METRICS)})",
    )
    p.add_argument("--exclude-leak-macs", action="store_true",
                   help="derive memory traffic from synaptic ops only")
    p.add_argument("--inference-rate", type=float,
                   help="Hz, enables the duty-cycled battery budget")
    _add_format_arg(p)
    _add_store_arg(p)
    p.add_argument("--record", action="store_true")
    p.add_argument("--model-name")
    p.add_argument("--version")
    p.add_argument("--accuracy", type=float)
    p.add_argument("--timestamp", type=float)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("compare", help="speedup/greenup/powerup between versions")
    _add_store_arg(p)
    p.add_argument("--model")
    p.add_argument("--old", help="old version in the store")
    p.add_argument("--new", help="new version in the store")
    p.add_argument("--old-energy", type=float)
    p.add_argument("--old-time", type=float)
    p.add_argument("--old-accuracy", type=float)
    p.add_argument("--old-version", default="old")
    p.add_argument("--new-energy", type=float)
    p.add_argument("--new-time", type=float)
    p.add_argument("--new-accuracy", type=float)
    p.add_argument("--new-version", default="new")
    p.add_argument("--as-published", action="store_true",
                   help="report new/old ratios instead of old/new")
    _add_format_arg(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("history", help="trend of one metric across versions")
    _add_store_arg(p)
    p.add_argument("--model", required=True)
    p.add_argument("--metric", required=True)
    p.add_argument("--provenance", choices=[pr.value for pr in st.PROVENANCE_ORDER])
    _add_format_arg(p)
    p.set_defaults(func=cmd_history)

    p = sub.add_parser("report", help="full metric report with alerts")
    _add_store_arg(p)
    p.add_argument("--model", required=True)
    p.add_argument("--limit-overrides",
                   help="e.g. sparsity=0.5,power_density=20,battery_years=5")
    _add_format_arg(p, choices=("text", "jsonl", "csv", "markdown"))
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except en.MissingSpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_SPEC
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
