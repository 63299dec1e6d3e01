"""Reductions of a workload trace into the per-inference workload metrics:
synaptic operations, membrane updates, activation sparsity, and derived
memory accesses (three loads and one store per MAC, two loads and one store
per AC).
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import ModelDescriptor
from .simulate import WorkloadTrace

# Rule of thumb: a spiking model whose activation sparsity falls below 60%
# is not exploiting event-driven hardware.
DEFAULT_SPARSITY_THRESHOLD = 0.60

# Derived memory traffic per arithmetic op: a MAC loads two operands and an
# accumulator and stores the result; an AC skips the multiplicand load.
READS_PER_MAC = 3
READS_PER_AC = 2
WRITES_PER_MAC = 1
WRITES_PER_AC = 1


@dataclass(frozen=True)
class OpCounts:
    """MAC/AC and membrane-update tallies for one or more inferences.

    ``leak_macs`` is the subset of ``macs`` spent on leak decay, kept
    separate so memory-access derivation can optionally exclude it.
    """

    macs: int
    acs: int
    membrane_updates_effective: int
    membrane_updates_dense: int
    leak_macs: int = 0

    def __post_init__(self) -> None:
        for name in ("macs", "acs", "membrane_updates_effective", "membrane_updates_dense", "leak_macs"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.membrane_updates_effective > self.membrane_updates_dense:
            raise ValueError("effective membrane updates cannot exceed dense count")
        if self.leak_macs > self.macs:
            raise ValueError("leak_macs cannot exceed macs")

    @property
    def total_sops(self) -> int:
        return self.macs + self.acs

    def __add__(self, other: "OpCounts") -> "OpCounts":
        return OpCounts(
            macs=self.macs + other.macs,
            acs=self.acs + other.acs,
            membrane_updates_effective=self.membrane_updates_effective
            + other.membrane_updates_effective,
            membrane_updates_dense=self.membrane_updates_dense + other.membrane_updates_dense,
            leak_macs=self.leak_macs + other.leak_macs,
        )

    def scaled(self, k: int) -> "OpCounts":
        return OpCounts(
            macs=self.macs * k,
            acs=self.acs * k,
            membrane_updates_effective=self.membrane_updates_effective * k,
            membrane_updates_dense=self.membrane_updates_dense * k,
            leak_macs=self.leak_macs * k,
        )


@dataclass(frozen=True)
class MemoryAccessCounts:
    reads: int
    writes: int

    def __post_init__(self) -> None:
        if self.reads < 0 or self.writes < 0:
            raise ValueError("access counts must be >= 0")

    @property
    def total(self) -> int:
        return self.reads + self.writes


@dataclass(frozen=True)
class SparsityReport:
    activation_sparsity: float
    opportunities: int
    spikes: int
    threshold: float
    alert: str | None


def effective_synops(trace: WorkloadTrace) -> OpCounts:
    """Sum the trace's per-timestep tallies into one OpCounts."""
    return OpCounts(
        macs=trace.total_macs,
        acs=trace.total_acs,
        membrane_updates_effective=trace.total_membrane_updates,
        membrane_updates_dense=trace.non_input_neurons * trace.timesteps,
        leak_macs=trace.total_leak_macs,
    )


def dense_synops(model: ModelDescriptor, timesteps: int) -> OpCounts:
    """Worst-case counts: every neuron spiking every timestep through a
    fully dense weight matrix.  Upper bound for sparsity-savings reporting.
    """
    if timesteps < 0:
        raise ValueError("timesteps must be >= 0")
    synapses = 0
    for layer in model.weighted_layers:
        synapses += layer.weights.size
        if layer.recurrent_weights is not None:
            synapses += layer.recurrent_weights.size
    neurons = model.non_input_neurons
    return OpCounts(
        macs=0,
        acs=synapses * timesteps,
        membrane_updates_effective=neurons * timesteps,
        membrane_updates_dense=neurons * timesteps,
    )


def memory_accesses(ops: OpCounts, *, include_leak_macs: bool = True) -> MemoryAccessCounts:
    """Derive read/write counts from op counts at the fixed per-op ratios.

    Leak MACs are part of the MAC tally by default; pass
    ``include_leak_macs=False`` to derive traffic from synaptic ops only.
    """
    macs = ops.macs if include_leak_macs else ops.macs - ops.leak_macs
    return MemoryAccessCounts(
        reads=READS_PER_MAC * macs + READS_PER_AC * ops.acs,
        writes=WRITES_PER_MAC * macs + WRITES_PER_AC * ops.acs,
    )


def activation_sparsity(
    *traces: WorkloadTrace, threshold: float = DEFAULT_SPARSITY_THRESHOLD
) -> SparsityReport:
    """Fraction of silent neuron-timesteps over the non-input layers.

    Input spikes are workload, not model behaviour, so they do not enter the
    denominator.  Accepts several traces and aggregates spike and
    opportunity counts.  The alert fires strictly below the threshold.
    """
    if not traces:
        raise ValueError("activation_sparsity needs at least one trace")
    opportunities = 0
    spikes = 0
    for trace in traces:
        opportunities += trace.non_input_neurons * trace.timesteps
        spikes += trace.non_input_spikes
    if opportunities == 0:
        raise ValueError("zero opportunities: trace has no non-input neuron-timesteps")
    sparsity = 1.0 - spikes / opportunities
    alert = None
    if sparsity < threshold:
        alert = (
            f"activation sparsity {sparsity:.4f} is below {threshold:.2f}; the model "
            "is too dense to exploit event-driven execution"
        )
    return SparsityReport(
        activation_sparsity=sparsity,
        opportunities=opportunities,
        spikes=spikes,
        threshold=threshold,
        alert=alert,
    )
