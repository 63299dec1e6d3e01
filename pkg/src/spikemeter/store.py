"""Append-only store of versioned metric snapshots, with trend reports and
actionability alerts.

The store is a newline-delimited JSON file: one fully written record per
line, never mutated, so histories stay diff-friendly and a reader never
sees half a record.  Three record kinds exist::

    {"kind": "snapshot", "model": ..., "version": ..., "timestamp": ...,
     "values": {...}, "provenance": {...}, "accuracy": ..., "notes": ...}
    {"kind": "ingest", "model": ..., "version": ..., "timestamp": ...,
     "metric": ..., "value": ..., "provenance": ..., "notes": ...}
    {"kind": "register", "name": ..., "unit": ..., "polarity": ..., "description": ...}

Snapshot versions are unique per model; re-recording a version is rejected
rather than overwritten so trend history stays trustworthy.  Ingest records
attach externally obtained values (a power-meter reading, a training log)
to a version without touching what was already recorded -- the same metric
may then carry both an estimated and an ingested value, distinguishable by
provenance.  Writers must be serialized by the caller; concurrent readers
are fine.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .catalog import MetricDescriptor, Polarity, Provenance, find_metric

PROVENANCE_ORDER = (Provenance.COMPUTED, Provenance.ESTIMATED, Provenance.INGESTED)


class StoreError(ValueError):
    """Raised on unreadable or malformed store files."""


class DuplicateVersionError(StoreError):
    """Raised when a snapshot version already exists for the model."""


class UnknownMetricError(StoreError):
    """Raised for metric names neither built in nor registered."""


class InsufficientHistoryError(StoreError):
    """Raised when a trend needs more snapshots than the store holds."""


class Direction(str, Enum):
    IMPROVING = "improving"
    DEGRADING = "degrading"
    FLAT = "flat"


@dataclass(frozen=True)
class MetricSnapshot:
    model_name: str
    version: str
    values: dict[str, float]
    timestamp: float | None = None
    accuracy: float | None = None
    provenance: dict[str, str] = field(default_factory=dict)
    notes: str = ""

    def __post_init__(self) -> None:
        if not self.model_name or not self.version:
            raise StoreError("snapshot needs a model name and a version")
        if self.accuracy is not None and not (0.0 <= self.accuracy <= 1.0):
            raise StoreError("accuracy must lie in [0, 1]")
        for key, value in self.values.items():
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise StoreError(f"value for {key!r} must be a finite number")


@dataclass(frozen=True)
class CustomMetric:
    name: str
    unit: str = ""
    polarity: Polarity = Polarity.HIGHER_IS_WORSE
    description: str = ""


@dataclass(frozen=True)
class VersionRecord:
    """Merged view of one model version: values keyed metric -> provenance."""

    version: str
    timestamp: float
    values: dict[str, dict[str, float]]
    accuracy: float | None
    notes: str


@dataclass
class StoreData:
    registered: dict[str, CustomMetric] = field(default_factory=dict)
    models: dict[str, list[VersionRecord]] = field(default_factory=dict)

    def history(self, model: str) -> list[VersionRecord]:
        return self.models.get(model, [])


def _parse_line(line: str, lineno: int) -> dict:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise StoreError(f"store line {lineno} is not valid JSON: {exc}") from exc
    if not isinstance(record, dict) or "kind" not in record:
        raise StoreError(f"store line {lineno} is not a record object")
    return record


def read_store(path: str | Path) -> StoreData:
    """Parse the whole store.  A final line without a newline terminator is
    treated as an interrupted write and skipped."""
    data = StoreData()
    path = Path(path)
    if not path.exists():
        return data
    try:
        text = path.read_text()
    except OSError as exc:
        raise StoreError(f"cannot read store {path}: {exc}") from exc
    complete = text.endswith("\n")
    lines = text.splitlines()
    if not complete and lines:
        lines = lines[:-1]
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        record = _parse_line(line, lineno)
        kind = record["kind"]
        if kind == "register":
            name = record["name"]
            data.registered[name] = CustomMetric(
                name=name,
                unit=record.get("unit", ""),
                polarity=Polarity(record.get("polarity", Polarity.HIGHER_IS_WORSE.value)),
                description=record.get("description", ""),
            )
        elif kind == "snapshot":
            model = record["model"]
            values = {
                key: {record.get("provenance", {}).get(key, Provenance.COMPUTED.value): val}
                for key, val in record["values"].items()
            }
            data.models.setdefault(model, []).append(
                VersionRecord(
                    version=record["version"],
                    timestamp=float(record["timestamp"]),
                    values=values,
                    accuracy=record.get("accuracy"),
                    notes=record.get("notes", ""),
                )
            )
        elif kind == "ingest":
            model = record["model"]
            history = data.models.setdefault(model, [])
            target = next((r for r in history if r.version == record["version"]), None)
            if target is None:
                target = VersionRecord(
                    version=record["version"],
                    timestamp=float(record["timestamp"]),
                    values={},
                    accuracy=None,
                    notes="",
                )
                history.append(target)
            target.values.setdefault(record["metric"], {})[record["provenance"]] = record[
                "value"
            ]
        else:
            raise StoreError(f"store line {lineno}: unknown record kind {kind!r}")
    return data


def _append(path: str | Path, record: dict) -> None:
    line = json.dumps(record, sort_keys=True)
    with open(path, "a") as handle:
        handle.write(line + "\n")
        handle.flush()


def _known_metric(name: str, data: StoreData) -> bool:
    return find_metric(name) is not None or name in data.registered


def register_metric(
    store: str | Path,
    name: str,
    *,
    unit: str = "",
    polarity: Polarity = Polarity.HIGHER_IS_WORSE,
    description: str = "",
) -> None:
    """Declare a custom metric so snapshots and ingests may carry it."""
    if find_metric(name) is not None:
        return  # built-ins need no registration
    existing = read_store(store).registered.get(name)
    if existing is not None and (existing.unit, existing.polarity, existing.description) == (
        unit, polarity, description,
    ):
        return  # identical registration already on file
    _append(
        store,
        {
            "kind": "register",
            "name": name,
            "unit": unit,
            "polarity": polarity.value,
            "description": description,
        },
    )


def record_snapshot(store: str | Path, snapshot: MetricSnapshot) -> None:
    """Append a snapshot; duplicate (model, version) pairs are rejected."""
    data = read_store(store)
    for record in data.history(snapshot.model_name):
        if record.version == snapshot.version:
            raise DuplicateVersionError(
                f"version {snapshot.version!r} already recorded for model "
                f"{snapshot.model_name!r}"
            )
    unknown = [key for key in snapshot.values if not _known_metric(key, data)]
    if unknown:
        raise UnknownMetricError(
            f"unknown metrics {sorted(unknown)}; register them first"
        )
    provenance = dict(snapshot.provenance)
    for key in snapshot.values:
        if key not in provenance:
            descriptor = find_metric(key)
            provenance[key] = (
                descriptor.provenance_class.value if descriptor else Provenance.INGESTED.value
            )
    _append(
        store,
        {
            "kind": "snapshot",
            "model": snapshot.model_name,
            "version": snapshot.version,
            "timestamp": snapshot.timestamp if snapshot.timestamp is not None else time.time(),
            "values": snapshot.values,
            "provenance": provenance,
            "accuracy": snapshot.accuracy,
            "notes": snapshot.notes,
        },
    )


def record_external_metric(
    store: str | Path,
    model: str,
    version: str,
    metric: str,
    value: float,
    provenance: str = Provenance.INGESTED.value,
    *,
    timestamp: float | None = None,
    notes: str = "",
) -> None:
    """Attach an externally obtained value (measurement, training log) to a
    version.  The provenance tag travels with the value into every report."""
    Provenance(provenance)  # validates
    data = read_store(store)
    if not _known_metric(metric, data):
        raise UnknownMetricError(f"unknown metric {metric!r}; register it first")
    if not isinstance(value, (int, float)) or not math.isfinite(value):
        raise StoreError("ingested value must be a finite number")
    _append(
        store,
        {
            "kind": "ingest",
            "model": model,
            "version": version,
            "timestamp": timestamp if timestamp is not None else time.time(),
            "metric": metric,
            "value": value,
            "provenance": provenance,
            "notes": notes,
        },
    )


def _pick_value(
    by_provenance: dict[str, float],
    descriptor: MetricDescriptor | None,
    requested: str | None,
) -> float | None:
    if requested is not None:
        return by_provenance.get(requested)
    if descriptor is not None:
        preferred = by_provenance.get(descriptor.provenance_class.value)
        if preferred is not None:
            return preferred
    for provenance in PROVENANCE_ORDER:
        if provenance.value in by_provenance:
            return by_provenance[provenance.value]
    return None


@dataclass(frozen=True)
class TrendDelta:
    from_version: str
    to_version: str
    absolute: float
    percent: float | None  # None when the earlier value is zero


@dataclass(frozen=True)
class TrendReport:
    metric: str
    unit: str
    polarity: Polarity
    series: tuple[tuple[str, float], ...]
    deltas: tuple[TrendDelta, ...]
    direction: Direction


def _metric_meta(name: str, data: StoreData) -> tuple[str, Polarity]:
    descriptor = find_metric(name)
    if descriptor is not None:
        return descriptor.unit, descriptor.polarity
    if name in data.registered:
        custom = data.registered[name]
        return custom.unit, custom.polarity
    raise UnknownMetricError(f"unknown metric {name!r}")


def trend_report(
    store: str | Path, model: str, metric: str, *, provenance: str | None = None
) -> TrendReport:
    """Series of a metric across the model's versions, in recording order,
    with deltas and a polarity-aware overall direction."""
    data = read_store(store)
    descriptor = find_metric(metric)
    key = descriptor.key if descriptor is not None else metric
    unit, polarity = _metric_meta(key, data)
    series: list[tuple[str, float]] = []
    for record in data.history(model):
        if key in record.values:
            value = _pick_value(record.values[key], descriptor, provenance)
            if value is not None:
                series.append((record.version, float(value)))
    if len(series) < 2:
        raise InsufficientHistoryError(
            f"metric {key!r} needs at least 2 snapshots for model {model!r}, "
            f"found {len(series)}"
        )
    deltas = []
    for (v0, x0), (v1, x1) in zip(series, series[1:]):
        percent = None if x0 == 0 else (x1 - x0) / x0 * 100.0
        deltas.append(TrendDelta(v0, v1, x1 - x0, percent))
    first, last = series[0][1], series[-1][1]
    if last == first:
        direction = Direction.FLAT
    else:
        increased = last > first
        worse = polarity is Polarity.HIGHER_IS_WORSE
        direction = Direction.DEGRADING if increased == worse else Direction.IMPROVING
    return TrendReport(
        metric=key,
        unit=unit,
        polarity=polarity,
        series=tuple(series),
        deltas=tuple(deltas),
        direction=direction,
    )


# ---------------------------------------------------------------------------
# Actionability alerts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AlertRule:
    metric: str
    comparison: str  # "below" | "above": the violating side, strict
    threshold: float
    rationale: str
    unit: str = ""


@dataclass(frozen=True)
class Alert:
    metric: str
    value: float
    threshold: float
    comparison: str
    rationale: str
    unit: str = ""

    def message(self) -> str:
        relation = "<" if self.comparison == "below" else ">"
        return (
            f"{self.metric} = {self.value:g}{(' ' + self.unit) if self.unit else ''} "
            f"{relation} {self.threshold:g}: {self.rationale}"
        )


@dataclass(frozen=True)
class AlertReport:
    alerts: tuple[Alert, ...]
    skipped: tuple[str, ...]  # rules whose metric the snapshot lacks

    @property
    def violated(self) -> bool:
        return bool(self.alerts)


def default_alert_rules(
    *,
    sparsity_threshold: float = 0.60,
    power_density_limit: float = 10.0,
    battery_target_years: float = 10.0,
) -> tuple[AlertRule, ...]:
    return (
        AlertRule(
            metric="activation_sparsity",
            comparison="below",
            threshold=sparsity_threshold,
            unit="",
            rationale=(
                f"sparsity below {sparsity_threshold:.0%} means the network fires too "
                "densely to exploit event-driven hardware; rework the model"
            ),
        ),
        AlertRule(
            metric="power_density",
            comparison="above",
            threshold=power_density_limit,
            unit="mW/cm^2",
            rationale=(
                f"power density above {power_density_limit:g} mW/cm^2 exceeds the safety "
                "envelope applied to RF-emitting implantable devices"
            ),
        ),
        AlertRule(
            metric="estimated_battery_life",
            comparison="below",
            threshold=battery_target_years,
            unit="years",
            rationale=(
                f"implanted batteries must last at least {battery_target_years:g} years "
                "to keep replacement surgeries rare"
            ),
        ),
    )


def evaluate_alerts(
    snapshot: MetricSnapshot, rules: tuple[AlertRule, ...] | None = None
) -> AlertReport:
    """One alert per violated rule; rules whose metric is absent are skipped
    and listed, never treated as violations."""
    if rules is None:
        rules = default_alert_rules()
    alerts = []
    skipped = []
    for rule in rules:
        value = snapshot.values.get(rule.metric)
        if value is None:
            skipped.append(rule.metric)
            continue
        violated = value < rule.threshold if rule.comparison == "below" else value > rule.threshold
        if violated:
            alerts.append(
                Alert(
                    metric=rule.metric,
                    value=float(value),
                    threshold=rule.threshold,
                    comparison=rule.comparison,
                    rationale=rule.rationale,
                    unit=rule.unit,
                )
            )
    return AlertReport(alerts=tuple(alerts), skipped=tuple(skipped))
