"""Dependency DAG over circuit instructions with gadget spans collapsed.

Nodes are instructions, except that every gadget span collapses to a single
node.  Edges chain consecutive users of each qubit and each classical bit, so
a topological order always exists and instruction order is one.
"""
from __future__ import annotations

from dataclasses import dataclass

from .ir import Circuit, GadgetSpan, Instruction


@dataclass(frozen=True)
class DagNode:
    id: int
    indices: tuple[int, ...]
    span: GadgetSpan | None

    def instructions(self, circuit: Circuit) -> tuple[Instruction, ...]:
        return tuple(circuit.instructions[i] for i in self.indices)


@dataclass
class Dag:
    circuit: Circuit
    nodes: list[DagNode]
    preds: list[set[int]]
    succs: list[set[int]]
    node_of: list[int]  # instruction index -> node id

    def topological(self) -> list[int]:
        # Node ids are assigned in first-instruction order, which is topological.
        return list(range(len(self.nodes)))

    def finish_layers(self, weight: dict[int, int]) -> list[int]:
        """Longest weighted path ending at each node (inclusive of the node)."""
        finish = [0] * len(self.nodes)
        for nid in self.topological():
            base = max((finish[p] for p in self.preds[nid]), default=0)
            finish[nid] = base + weight.get(nid, 0)
        return finish


def build_dag(circuit: Circuit) -> Dag:
    n = len(circuit.instructions)
    node_of = list(range(n))
    span_of: dict[int, GadgetSpan] = {}
    # Collapse spans: innermost wins if spans nest (emitted spans never nest).
    for span in sorted(circuit.spans, key=lambda s: (s.start, s.end)):
        for i in range(span.start, span.end):
            node_of[i] = span.start
            span_of[span.start] = span

    nodes: list[DagNode] = []
    remap: dict[int, int] = {}
    grouped: dict[int, list[int]] = {}
    for i in range(n):
        grouped.setdefault(node_of[i], []).append(i)
    for rep in sorted(grouped):
        remap[rep] = len(nodes)
        nodes.append(DagNode(len(nodes), tuple(grouped[rep]), span_of.get(rep)))
    node_id = [remap[node_of[i]] for i in range(n)]

    preds: list[set[int]] = [set() for _ in nodes]
    succs: list[set[int]] = [set() for _ in nodes]

    def link(a: int, b: int) -> None:
        if a != b:
            succs[a].add(b)
            preds[b].add(a)

    last_qubit_user: dict[int, int] = {}
    last_bit_user: dict[int, int] = {}
    for i, instr in enumerate(circuit.instructions):
        nid = node_id[i]
        for q in instr.qubits:
            if q in last_qubit_user:
                link(last_qubit_user[q], nid)
            last_qubit_user[q] = nid
        bits = [b for b in (instr.result, instr.cond) if b is not None]
        for b in bits:
            if b in last_bit_user:
                link(last_bit_user[b], nid)
            last_bit_user[b] = nid

    return Dag(circuit, nodes, preds, succs, node_id)
