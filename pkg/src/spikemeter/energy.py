"""Spec-driven energy estimation.

Turns op counts plus a hardware cost specification into an energy breakdown
split between costs the SNN model is responsible for (synaptic ops,
membrane updates, memory traffic) and device overhead the model merely
rides along with (standby leakage, ADC sampling, radio transmission).  The
hardware-side metrics -- energy per inference, pJ/SOP, power density,
energy-area figure of merit -- all derive from that breakdown and carry an
"estimated" provenance tag to keep them distinguishable from measured
values.

Hardware spec file: a flat JSON object.  Energies are joules, powers watts,
areas cm^2, frequencies Hz; ``power_density_limit`` is mW/cm^2.  Unknown
keys are rejected outright so a misspelled coefficient cannot silently
default to zero.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .simulate import WorkloadTrace
from .workload import (
    READS_PER_AC,
    READS_PER_MAC,
    WRITES_PER_AC,
    WRITES_PER_MAC,
    MemoryAccessCounts,
    OpCounts,
)

PROVENANCE_ESTIMATED = "estimated"

# Default safety limit on power delivery for implantable applications
# (the RF-exposure figure used for medical devices), mW/cm^2.
DEFAULT_POWER_DENSITY_LIMIT = 10.0

JOULES_PER_MAH_VOLT = 3.6  # 1 mAh = 3.6 coulombs


class HardwareSpecError(ValueError):
    """Raised when a hardware spec file or value is invalid."""


class MissingSpecError(ValueError):
    """Raised when a requested metric needs a spec field that is absent."""


class MembraneCountMode(str, Enum):
    EFFECTIVE = "effective"  # updates only where state changed
    DENSE = "dense"  # hardware refreshes every neuron every cycle


@dataclass(frozen=True)
class BatterySpec:
    capacity_joules: float | None = None
    capacity_mah: float | None = None
    nominal_voltage: float | None = None
    usable_fraction: float = 1.0

    def __post_init__(self) -> None:
        if self.capacity_joules is None and (
            self.capacity_mah is None or self.nominal_voltage is None
        ):
            raise HardwareSpecError(
                "battery needs capacity_joules or both capacity_mah and nominal_voltage"
            )
        for name in ("capacity_joules", "capacity_mah", "nominal_voltage"):
            val = getattr(self, name)
            if val is not None and (not math.isfinite(val) or val < 0):
                raise HardwareSpecError(f"battery {name} must be finite and >= 0")
        if not (0.0 < self.usable_fraction <= 1.0):
            raise HardwareSpecError("usable_fraction must be in (0, 1]")

    @property
    def usable_joules(self) -> float:
        if self.capacity_joules is not None:
            total = self.capacity_joules
        else:
            total = self.capacity_mah * JOULES_PER_MAH_VOLT * self.nominal_voltage
        return total * self.usable_fraction


@dataclass(frozen=True)
class HardwareSpec:
    """Per-operation energy costs and device overhead figures."""

    name: str = ""
    e_mac: float = 0.0  # J per multiply-accumulate
    e_ac: float = 0.0  # J per accumulate
    e_read: float = 0.0  # J per memory read
    e_write: float = 0.0  # J per memory write
    e_membrane_update: float = 0.0  # J per membrane update
    e_layer_crossing: float = 0.0  # J per event forwarded between layers
    membrane_count_mode: MembraneCountMode = MembraneCountMode.EFFECTIVE
    static_power: float = 0.0  # W standby leakage
    adc_energy_per_sample: float = 0.0  # J
    adc_samples_per_inference: int = 0
    tx_energy_per_bit: float = 0.0  # J
    tx_bits_per_inference: int = 0
    chip_area: float | None = None  # cm^2
    channels: int | None = None
    sampling_frequency: float | None = None  # Hz
    power_density_limit: float = DEFAULT_POWER_DENSITY_LIMIT  # mW/cm^2
    battery: BatterySpec | None = None
    notes: str = ""

    def __post_init__(self) -> None:
        for name in (
            "e_mac",
            "e_ac",
            "e_read",
            "e_write",
            "e_membrane_update",
            "e_layer_crossing",
            "static_power",
            "adc_energy_per_sample",
            "tx_energy_per_bit",
            "power_density_limit",
        ):
            val = getattr(self, name)
            if not math.isfinite(val) or val < 0:
                raise HardwareSpecError(f"{name} must be finite and >= 0")
        if self.adc_samples_per_inference < 0 or self.tx_bits_per_inference < 0:
            raise HardwareSpecError("per-inference sample/bit counts must be >= 0")
        if self.chip_area is not None and not (
            math.isfinite(self.chip_area) and self.chip_area > 0
        ):
            raise HardwareSpecError("chip_area must be > 0 when given")
        if self.channels is not None and self.channels < 1:
            raise HardwareSpecError("channels must be >= 1 when given")
        if self.sampling_frequency is not None and not (
            math.isfinite(self.sampling_frequency) and self.sampling_frequency > 0
        ):
            raise HardwareSpecError("sampling_frequency must be > 0 when given")


@dataclass(frozen=True)
class ModelEnergy:
    synop_energy: float
    membrane_energy: float
    memory_energy: float
    model_total: float


@dataclass(frozen=True)
class OverheadEnergy:
    static_energy: float
    adc_energy: float
    tx_energy: float
    overhead_total: float


@dataclass(frozen=True)
class EnergyBreakdown:
    model: ModelEnergy
    overhead: OverheadEnergy
    total: float
    duration: float  # seconds
    provenance: str = PROVENANCE_ESTIMATED


def estimate_energy(
    ops: OpCounts,
    mem: MemoryAccessCounts,
    spec: HardwareSpec,
    duration: float,
    *,
    crossings: int = 0,
) -> EnergyBreakdown:
    """Price the supplied counts against the hardware spec.

    ``duration`` is the wall-clock span the static leakage integrates over.
    ``crossings`` scales the optional between-layer processing coefficient
    (mixed analog-digital designs); it contributes to the synaptic-op
    bucket and defaults to no effect.
    """
    if not (math.isfinite(duration) and duration > 0):
        raise ValueError("duration must be finite and > 0")
    if crossings < 0:
        raise ValueError("crossings must be >= 0")
    updates = (
        ops.membrane_updates_effective
        if spec.membrane_count_mode is MembraneCountMode.EFFECTIVE
        else ops.membrane_updates_dense
    )
    synop = ops.macs * spec.e_mac + ops.acs * spec.e_ac + crossings * spec.e_layer_crossing
    membrane = updates * spec.e_membrane_update
    memory = mem.reads * spec.e_read + mem.writes * spec.e_write
    model_total = synop + membrane + memory

    static = spec.static_power * duration
    adc = spec.adc_energy_per_sample * spec.adc_samples_per_inference
    tx = spec.tx_energy_per_bit * spec.tx_bits_per_inference
    overhead_total = static + adc + tx

    return EnergyBreakdown(
        model=ModelEnergy(synop, membrane, memory, model_total),
        overhead=OverheadEnergy(static, adc, tx, overhead_total),
        total=model_total + overhead_total,
        duration=duration,
    )


def energy_per_inference(breakdown: EnergyBreakdown, *, model_only: bool = False) -> float:
    """Joules for the inference this breakdown was computed from."""
    return breakdown.model.model_total if model_only else breakdown.total


def energy_per_learning_sample(
    learning_ops: OpCounts,
    learning_mem: MemoryAccessCounts,
    spec: HardwareSpec,
    duration: float,
    *,
    crossings: int = 0,
) -> float:
    """Same estimator applied to externally supplied training-pass counts."""
    return estimate_energy(
        learning_ops, learning_mem, spec, duration, crossings=crossings
    ).total


def average_power(breakdown: EnergyBreakdown) -> float:
    """Watts averaged over the breakdown's duration."""
    if breakdown.duration <= 0:
        raise ValueError("duration must be > 0")
    return breakdown.total / breakdown.duration


@dataclass(frozen=True)
class PowerDensityResult:
    mw_per_cm2: float
    limit_mw_per_cm2: float
    violation: bool  # strictly above the limit
    provenance: str = PROVENANCE_ESTIMATED


def power_density(power_w: float, spec: HardwareSpec) -> PowerDensityResult:
    """Average power per chip area, checked against the configured limit.

    Sitting exactly at the limit is compliant; only strictly exceeding it
    is flagged.
    """
    if spec.chip_area is None:
        raise MissingSpecError("power density needs chip_area (cm^2) in the hardware spec")
    density = power_w * 1000.0 / spec.chip_area
    return PowerDensityResult(
        mw_per_cm2=density,
        limit_mw_per_cm2=spec.power_density_limit,
        violation=density > spec.power_density_limit,
    )


@dataclass(frozen=True)
class SopEnergyResult:
    average_pj_per_sop: float
    peak_window_power_w: float
    provenance: str = PROVENANCE_ESTIMATED


def energy_per_sop(
    breakdown: EnergyBreakdown,
    ops: OpCounts,
    trace: WorkloadTrace,
    spec: HardwareSpec,
    *,
    include_leak_macs: bool = True,
) -> SopEnergyResult:
    """Average model energy per synaptic op, plus the hottest window.

    The averaging uses the model-attributable energy only (overhead is not
    an op cost).  "Peak" is defined over per-timestep windows: the largest
    single-timestep dynamic energy divided by the timestep duration.
    """
    if ops.total_sops <= 0:
        raise ValueError("energy per SOP is undefined with zero synaptic operations")
    avg_pj = breakdown.model.model_total * 1e12 / ops.total_sops

    crossings = trace.crossings_per_timestep()
    dense_updates = trace.non_input_neurons
    peak_energy = 0.0
    for t in range(trace.timesteps):
        macs_t = int(trace.macs[t])
        acs_t = int(trace.acs[t])
        macs_for_mem = macs_t - (0 if include_leak_macs else int(trace.leak_macs[t]))
        updates_t = (
            int(trace.membrane_updates[t])
            if spec.membrane_count_mode is MembraneCountMode.EFFECTIVE
            else dense_updates
        )
        e_t = (
            macs_t * spec.e_mac
            + acs_t * spec.e_ac
            + int(crossings[t]) * spec.e_layer_crossing
            + updates_t * spec.e_membrane_update
            + (READS_PER_MAC * macs_for_mem + READS_PER_AC * acs_t) * spec.e_read
            + (WRITES_PER_MAC * macs_for_mem + WRITES_PER_AC * acs_t) * spec.e_write
        )
        peak_energy = max(peak_energy, e_t)
    return SopEnergyResult(
        average_pj_per_sop=avg_pj,
        peak_window_power_w=peak_energy / trace.timestep_duration,
    )


@dataclass(frozen=True)
class FomResult:
    value: float  # W * cm^2 * s per channel
    unit: str = "W*cm^2*s/channel"
    assumed_formula: bool = True
    formula: str = "(power / channels) * chip_area / sampling_frequency"
    provenance: str = PROVENANCE_ESTIMATED


def energy_area_fom(power_w: float, spec: HardwareSpec) -> FomResult:
    """Figure of merit combining per-channel power, area and sampling rate.

    The combining formula is an assumption documented in the result; treat
    the value as comparable only against numbers produced the same way.
    """
    missing = [
        name
        for name, val in (
            ("channels", spec.channels),
            ("chip_area", spec.chip_area),
            ("sampling_frequency", spec.sampling_frequency),
        )
        if val is None
    ]
    if missing:
        raise MissingSpecError(f"energy-area FoM needs spec fields: {', '.join(missing)}")
    value = (power_w / spec.channels) * spec.chip_area / spec.sampling_frequency
    return FomResult(value=value)


# ---------------------------------------------------------------------------
# Hardware spec file round-trip
# ---------------------------------------------------------------------------

_SPEC_KEYS = {
    "name",
    "e_mac",
    "e_ac",
    "e_read",
    "e_write",
    "e_membrane_update",
    "e_layer_crossing",
    "membrane_count_mode",
    "static_power",
    "adc_energy_per_sample",
    "adc_samples_per_inference",
    "tx_energy_per_bit",
    "tx_bits_per_inference",
    "chip_area",
    "channels",
    "sampling_frequency",
    "power_density_limit",
    "battery",
    "notes",
}
_BATTERY_KEYS = {"capacity_joules", "capacity_mah", "nominal_voltage", "usable_fraction"}


def hardware_spec_from_dict(raw: dict) -> HardwareSpec:
    if not isinstance(raw, dict):
        raise HardwareSpecError("hardware spec must be a JSON object")
    unknown = set(raw) - _SPEC_KEYS
    if unknown:
        raise HardwareSpecError(f"unknown hardware spec keys: {sorted(unknown)}")
    battery = None
    if raw.get("battery") is not None:
        braw = raw["battery"]
        if not isinstance(braw, dict):
            raise HardwareSpecError("battery must be an object")
        bunknown = set(braw) - _BATTERY_KEYS
        if bunknown:
            raise HardwareSpecError(f"unknown battery keys: {sorted(bunknown)}")
        battery = BatterySpec(
            capacity_joules=_opt_float(braw, "capacity_joules"),
            capacity_mah=_opt_float(braw, "capacity_mah"),
            nominal_voltage=_opt_float(braw, "nominal_voltage"),
            usable_fraction=float(braw.get("usable_fraction", 1.0)),
        )
    try:
        mode = MembraneCountMode(raw.get("membrane_count_mode", "effective"))
    except ValueError:
        raise HardwareSpecError(
            f"membrane_count_mode must be 'effective' or 'dense', "
            f"got {raw.get('membrane_count_mode')!r}"
        ) from None
    try:
        return HardwareSpec(
            name=str(raw.get("name", "")),
            e_mac=float(raw.get("e_mac", 0.0)),
            e_ac=float(raw.get("e_ac", 0.0)),
            e_read=float(raw.get("e_read", 0.0)),
            e_write=float(raw.get("e_write", 0.0)),
            e_membrane_update=float(raw.get("e_membrane_update", 0.0)),
            e_layer_crossing=float(raw.get("e_layer_crossing", 0.0)),
            membrane_count_mode=mode,
            static_power=float(raw.get("static_power", 0.0)),
            adc_energy_per_sample=float(raw.get("adc_energy_per_sample", 0.0)),
            adc_samples_per_inference=int(raw.get("adc_samples_per_inference", 0)),
            tx_energy_per_bit=float(raw.get("tx_energy_per_bit", 0.0)),
            tx_bits_per_inference=int(raw.get("tx_bits_per_inference", 0)),
            chip_area=_opt_float(raw, "chip_area"),
            channels=int(raw["channels"]) if raw.get("channels") is not None else None,
            sampling_frequency=_opt_float(raw, "sampling_frequency"),
            power_density_limit=float(
                raw.get("power_density_limit", DEFAULT_POWER_DENSITY_LIMIT)
            ),
            battery=battery,
            notes=str(raw.get("notes", "")),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, HardwareSpecError):
            raise
        raise HardwareSpecError(f"invalid hardware spec value: {exc}") from exc


def _opt_float(raw: dict, key: str) -> float | None:
    return float(raw[key]) if raw.get(key) is not None else None


def load_hardware_spec(path: str | Path) -> HardwareSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise HardwareSpecError(f"cannot read hardware spec {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise HardwareSpecError(f"malformed hardware spec {path}: {exc}") from exc
    return hardware_spec_from_dict(raw)
