"""Resource accounting: T-count, measurement depth, and ancilla opportunity cost.

Measurement depth is the longest path in the gadget-collapsed dependency DAG
where AND gadget spans, bare measurements, and bare T-type instructions each
weigh 1 and Clifford operations weigh 0 (a T gate applied by teleportation is
one measurement event, which is why a whole AND computation weighs 1).

Ancillae are priced as opportunity cost: a held ancilla is surface-code area
that is not distilling |T> states.  With the default constants (960 spacetime
units per distilled |T>, 2 units per ancilla per depth layer) one ancilla
held for one layer costs 1/480 of a |T> state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .dag import build_dag
from .ir import Circuit, MEASUREMENTS, Op, T_FAMILY, require_valid


@dataclass(frozen=True)
class ResourceReport:
    t_count: int
    ccx_count: int
    meas_depth: int
    ancilla_max: int
    ancilla_depth: int
    rotation_bucket: int


@dataclass(frozen=True)
class CostModel:
    """Constants converting held-ancilla time into effective |T>-state cost."""

    t_state_volume: float = 960.0
    ancilla_volume_per_depth: float = 2.0
    idle_factor: float = 1.0

    def __post_init__(self) -> None:
        if self.t_state_volume <= 0 or self.ancilla_volume_per_depth <= 0 or self.idle_factor <= 0:
            raise ValueError("cost model constants must be positive")

    @property
    def cost_per_ancilla_depth(self) -> float:
        """|T> states of opportunity cost per ancilla per measurement-depth layer."""
        return self.ancilla_volume_per_depth / (self.t_state_volume * self.idle_factor)


class NoCrossoverError(Exception):
    """NO_CROSSOVER: the first cost function never exceeds the second within the bound."""


def count(circuit: Circuit) -> ResourceReport:
    """Measure a circuit.  Unlowered CCX macros are reported, not T-counted."""
    require_valid(circuit)
    dag = build_dag(circuit)

    weights: dict[int, int] = {}
    for node in dag.nodes:
        if node.span is not None:
            weights[node.id] = 1
            continue
        op = circuit.instructions[node.indices[0]].op
        weights[node.id] = 1 if (op in T_FAMILY or op in MEASUREMENTS) else 0
    finish = dag.finish_layers(weights)
    meas_depth = max(finish, default=0)

    t_count = 0
    ccx_count = 0
    rotation_bucket = 0
    declared = set(circuit.input_qubits())
    live_ancillae: set[int] = set()
    ancilla_max = 0
    ancilla_depth = 0
    alloc_layer: dict[int, int] = {}
    for i, instr in enumerate(circuit.instructions):
        op = instr.op
        if op in T_FAMILY:
            t_count += 1
        elif op is Op.CCX:
            ccx_count += 1
        elif op is Op.RZ:
            rotation_bucket += 1
        if op in (Op.ALLOC0, Op.ALLOCT):
            q = instr.qubits[0]
            live_ancillae.add(q)
            ancilla_max = max(ancilla_max, len(live_ancillae))
            alloc_layer[q] = finish[dag.node_of[i]]
        elif op is Op.RELEASE:
            q = instr.qubits[0]
            if q in live_ancillae:
                live_ancillae.discard(q)
                ancilla_depth += finish[dag.node_of[i]] - alloc_layer.pop(q) + 1
    for q in live_ancillae:
        if q not in declared:
            ancilla_depth += meas_depth - alloc_layer[q] + 1

    return ResourceReport(
        t_count=t_count,
        ccx_count=ccx_count,
        meas_depth=meas_depth,
        ancilla_max=ancilla_max,
        ancilla_depth=ancilla_depth,
        rotation_bucket=rotation_bucket,
    )


def effective_t(report: ResourceReport, model: CostModel = CostModel()) -> float:
    """Measured T-count plus the ancilla-depth opportunity cost."""
    return report.t_count + report.ancilla_depth * model.cost_per_ancilla_depth


def effective_t_formula(n: int, kind: str = "temporary-and",
                        model: CostModel = CostModel()) -> float:
    """Closed-form effective T-count of an n-bit adder.

    The AND-based adder consumes ~4n |T> states but holds ~n ancillae for
    ~n layers (n^2/480 with default constants); the inline ripple baseline
    consumes ~8n with negligible ancilla cost.
    """
    if kind in ("temporary-and", "gidney"):
        return n * n * model.cost_per_ancilla_depth + 4.0 * n
    if kind == "cuccaro":
        return 8.0 * n
    raise ValueError(f"unknown adder kind {kind!r}")


def hybrid_cutoff(model: CostModel = CostModel()) -> int | float:
    """Bit distance from the top at which carrying via an ancilla stops paying.

    A carry ancilla born d layers from the end of the ripple is held for
    about 2d layers; the bit is worth doing with a temporary AND while
    4 + 2d * cost_per_depth < 8.  Solves to d = 2 / cost_per_depth:
    960 by default, 6x more when idle ancillae are compacted.
    """
    if model.cost_per_ancilla_depth == 0:
        return math.inf  # free ancillae: always carry via temporary ANDs
    return round(2.0 / model.cost_per_ancilla_depth)


def crossover(cost_a: Callable[[int], float], cost_b: Callable[[int], float],
              bound: int = 1 << 24) -> int:
    """Smallest n at which cost_a overtakes cost_b.

    Binary search for the first n with cost_a(n) > cost_b(n); if the costs
    tie exactly at n-1, that equality point is reported instead (the usual
    statement of the break-even width).
    """
    def exceeds(n: int) -> bool:
        return cost_a(n) > cost_b(n)

    if not exceeds(bound):
        raise NoCrossoverError(f"no crossover for n <= {bound}")
    lo, hi = 1, bound
    while lo < hi:
        mid = (lo + hi) // 2
        if exceeds(mid):
            hi = mid
        else:
            lo = mid + 1
    if lo > 1 and math.isclose(cost_a(lo - 1), cost_b(lo - 1), rel_tol=1e-12, abs_tol=1e-12):
        return lo - 1
    return lo


REPORT_KEYS = ("t_count", "ccx_count", "meas_depth", "ancilla_max",
               "ancilla_depth", "rotation_bucket", "effective_t")


def serialize_report(report: ResourceReport, model: CostModel = CostModel()) -> str:
    """Flat key-value document; effective_t under the given cost model."""
    values = {
        "t_count": str(report.t_count),
        "ccx_count": str(report.ccx_count),
        "meas_depth": str(report.meas_depth),
        "ancilla_max": str(report.ancilla_max),
        "ancilla_depth": str(report.ancilla_depth),
        "rotation_bucket": str(report.rotation_bucket),
        "effective_t": "%.6f" % effective_t(report, model),
    }
    return "".join(f"{key} {values[key]}\n" for key in REPORT_KEYS)
