"""Built-in catalog of the supported energy metrics.

Each descriptor records four properties a metric can offer a developer:

* accessibility -- obtainable during model development without hardware;
* high_fidelity -- tracks real deployed energy closely;
* actionability -- comes with an interpretation or threshold that tells the
  developer whether to act;
* trend_based -- version-over-version movement is meaningful even when a
  single reading is not.

Ratio metrics (speedup, greenup, powerup) are trend-based by construction
and are flagged ``trend_inherent``.  Metrics marked ``assumes_estimation``
are only accessible/high-fidelity on the back of a trusted energy
estimation; without one they inherit the estimator's uncertainty.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Provenance(str, Enum):
    COMPUTED = "computed"  # exact function of the model/trace
    ESTIMATED = "estimated"  # spec-driven estimate
    INGESTED = "ingested"  # supplied from outside (measurement, training log)


class SourceTable(str, Enum):
    TABLE1 = "table1"  # catalogued metrics
    TABLE2 = "table2"  # proposed/derived metrics


class Polarity(str, Enum):
    HIGHER_IS_WORSE = "higher_is_worse"
    HIGHER_IS_BETTER = "higher_is_better"


@dataclass(frozen=True)
class MetricDescriptor:
    key: str
    name: str
    unit: str
    accessibility: bool
    high_fidelity: bool
    actionability: bool
    trend_based: bool
    provenance_class: Provenance
    source_table: SourceTable
    polarity: Polarity
    assumes_estimation: bool = False
    trend_inherent: bool = False
    description: str = ""


def builtin_catalog() -> tuple[MetricDescriptor, ...]:
    """The 13 catalogued metrics plus the 7 proposed derived metrics."""
    return _CATALOG


_C = Provenance.COMPUTED
_E = Provenance.ESTIMATED
_I = Provenance.INGESTED
_T1 = SourceTable.TABLE1
_T2 = SourceTable.TABLE2
_WORSE = Polarity.HIGHER_IS_WORSE
_BETTER = Polarity.HIGHER_IS_BETTER

_CATALOG: tuple[MetricDescriptor, ...] = (
    # -- catalogued metrics -------------------------------------------------
    MetricDescriptor(
        "parameters", "Parameters", "count", True, False, False, False, _C, _T1, _WORSE,
        description="Weights, biases and per-neuron constants of the model.",
    ),
    MetricDescriptor(
        "effective_synops", "Effective Synaptic Operations", "ops/inference",
        True, False, False, True, _C, _T1, _WORSE,
        description="MAC and AC operations actually triggered across the synapses.",
    ),
    MetricDescriptor(
        "membrane_updates", "Membrane Updates", "updates/inference",
        True, False, False, True, _C, _T1, _WORSE,
        description="Neuron membrane-potential updates performed during inference.",
    ),
    MetricDescriptor(
        "activation_sparsity", "Activation Sparsity", "ratio",
        True, False, True, True, _C, _T1, _BETTER,
        description="Share of silent neuron-timesteps; below 60% the model is "
        "too dense for event-driven hardware to pay off.",
    ),
    MetricDescriptor(
        "memory_footprint", "Memory Footprint", "bytes",
        True, False, False, False, _C, _T1, _WORSE,
        description="Bytes needed to hold parameters and neuron state.",
    ),
    MetricDescriptor(
        "connection_sparsity", "Connection Sparsity", "ratio",
        True, False, False, False, _C, _T1, _BETTER,
        description="Share of exactly-zero weights between layers.",
    ),
    MetricDescriptor(
        "memory_accesses", "Memory Accesses", "accesses/inference",
        True, False, False, True, _C, _T1, _WORSE,
        description="Reads and writes derived from the op counts.",
    ),
    MetricDescriptor(
        "training_time", "Training Time", "seconds",
        True, False, False, True, _I, _T1, _WORSE,
        description="Wall-clock time to train the model; supplied externally.",
    ),
    MetricDescriptor(
        "energy_per_inference", "Energy per Inference", "J",
        False, True, False, False, _E, _T1, _WORSE,
        description="Joules for one inference, including device overhead.",
    ),
    MetricDescriptor(
        "energy_per_learning", "Energy per Learning", "J",
        False, True, False, False, _E, _T1, _WORSE,
        description="Joules to process one training sample.",
    ),
    MetricDescriptor(
        "energy_area_fom", "Energy Area FoM", "W*cm^2*s/channel",
        False, True, False, False, _E, _T1, _WORSE,
        description="Per-channel power combined with chip area and sampling "
        "rate; lower is better. Formula is an assumption, flagged in output.",
    ),
    MetricDescriptor(
        "energy_per_sop", "Peak per Energy Consumption", "pJ/SOP",
        False, True, False, False, _E, _T1, _WORSE,
        description="Energy cost of a single synaptic operation.",
    ),
    MetricDescriptor(
        "power_density", "Power Density", "mW/cm^2",
        False, True, True, False, _E, _T1, _WORSE,
        description="Average power per chip area; medical safety limits cap it "
        "(10 mW/cm^2 for RF-emitting implants).",
    ),
    # -- proposed derived metrics ------------------------------------------
    MetricDescriptor(
        "energy_delay_product", "Energy Delay Product", "J*s",
        True, True, False, False, _E, _T2, _WORSE, assumes_estimation=True,
        description="Energy times execution time; punishes slow and hungry alike.",
    ),
    MetricDescriptor(
        "speedup", "Speedup", "ratio",
        True, True, True, True, _C, _T2, _BETTER, trend_inherent=True,
        description="Old-to-new execution-time ratio; above 1 the new version "
        "is faster.",
    ),
    MetricDescriptor(
        "greenup", "Greenup", "ratio",
        True, True, True, True, _E, _T2, _BETTER,
        assumes_estimation=True, trend_inherent=True,
        description="Old-to-new energy ratio; above 1 the new version is greener.",
    ),
    MetricDescriptor(
        "powerup", "Powerup", "ratio",
        True, True, True, True, _E, _T2, _WORSE,
        assumes_estimation=True, trend_inherent=True,
        description="Speedup over greenup; above 1 the new version draws more "
        "average power.",
    ),
    MetricDescriptor(
        "estimated_battery_life", "Estimated Battery Life", "years",
        True, True, True, False, _E, _T2, _BETTER, assumes_estimation=True,
        description="Usable battery energy over average draw; implants should "
        "reach 10 years.",
    ),
    MetricDescriptor(
        "inferences_per_battery_cycle", "Inferences per Battery Cycle", "inferences",
        True, True, True, False, _E, _T2, _BETTER, assumes_estimation=True,
        description="Inferences one full charge can pay for.",
    ),
    MetricDescriptor(
        "accuracy_efficiency_tradeoff", "Accuracy-Efficiency Tradeoff", "accuracy/J",
        True, True, True, True, _E, _T2, _BETTER, assumes_estimation=True,
        description="Accuracy per joule, with the marginal energy cost of "
        "accuracy gains between versions.",
    ),
)

_BY_KEY = {d.key: d for d in _CATALOG}
_BY_NAME = {d.name.lower(): d for d in _CATALOG}


def find_metric(name: str) -> MetricDescriptor | None:
    """Look a descriptor up by key or display name, case-insensitively."""
    lowered = name.strip().lower()
    if lowered in _BY_KEY:
        return _BY_KEY[lowered]
    return _BY_NAME.get(lowered)


def metric_keys() -> tuple[str, ...]:
    return tuple(d.key for d in _CATALOG)
