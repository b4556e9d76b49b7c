"""Command-line front end: build, count, verify, rewrite, oracle, crossover.

All output is byte-deterministic given identical flags and seed.  Reports go
to standard output; circuits go to ``--out`` or standard output.  Exit codes:
0 success, 1 check failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import math
import sys
from typing import Callable, Sequence

import numpy as np

from . import gadgets
from .gadgets import AdderSpec
from .ir import Circuit, CircuitError, require_valid
from .oracle import OracleParseError, TooManyVariablesError, compile_oracle
from .resources import CostModel, NoCrossoverError, count, crossover, effective_t_formula, hybrid_cutoff, serialize_report
from .rewrite import replace_pairs
from .sim import (
    SimulationError,
    channel_equiv,
    enumerate_branches,
    gradient_state,
    permutation_map,
)
from .textfmt import TextFormatError, from_text, to_text

BUILD_KINDS = (
    "gidney-adder",
    "cuccaro-adder",
    "controlled-adder",
    "out-of-place-adder",
    "and",
    "mcx",
    "hamming",
    "phase-gradient",
)


def build_circuit(kind: str, n: int, carry_out: bool = False) -> Circuit:
    if kind == "gidney-adder":
        return gadgets.gidney_adder(AdderSpec(n, carry_out=carry_out))
    if kind == "cuccaro-adder":
        return gadgets.cuccaro_adder(AdderSpec(n, carry_out=carry_out))
    if kind == "controlled-adder":
        return gadgets.controlled_adder(AdderSpec(n, carry_out=carry_out))
    if kind == "out-of-place-adder":
        return gadgets.outofplace_adder(AdderSpec(n))
    if kind == "and":
        return gadgets.and_gadget_circuit("roundtrip")
    if kind == "mcx":
        return gadgets.multi_controlled_x(n)
    if kind == "hamming":
        return gadgets.hamming_weight(n).circuit
    if kind == "phase-gradient":
        return gadgets.phase_gradient_add(n)
    raise ValueError(f"unknown kind {kind!r}")


# -- verify ---------------------------------------------------------------------


class _Checks:
    def __init__(self) -> None:
        self.lines: list[str] = []
        self.failed = False

    def record(self, name: str, ok: bool, worst: float = 1.0, branches: int = 0) -> None:
        status = "PASS" if ok else "FAIL"
        self.lines.append(f"{name} {status} worst_fidelity={worst:.12f} branches={branches}")
        self.failed |= not ok


def _check_counts(checks: _Checks, name: str, circuit: Circuit,
                  expect: dict[str, int]) -> None:
    report = count(circuit)
    ok = all(getattr(report, key) == val for key, val in expect.items())
    checks.record(name, ok)


def _adder_ideal(n: int, *, controlled: bool = False) -> Callable[[int], int]:
    def fn(k: int) -> int:
        pos = 0
        if controlled:
            ctrl = k & 1
            pos = 1
        else:
            ctrl = 1
        a = (k >> pos) & ((1 << n) - 1)
        b = (k >> (pos + n)) & ((1 << n) - 1)
        s = (a + b) % (1 << n) if ctrl else b
        return (k & ((1 << pos) - 1)) | (a << pos) | (s << (pos + n))
    return fn


def _verify_kind(kind: str, n: int, seed: int, trials: int) -> _Checks:
    checks = _Checks()
    rng = np.random.default_rng(seed)
    if kind == "gidney-adder":
        c = gadgets.gidney_adder(AdderSpec(n))
        _check_counts(checks, "counts", c, {"t_count": 4 * n - 4, "meas_depth": 2 * n - 2})
        ideal = permutation_map(_adder_ideal(n), 2 * n)
        res = channel_equiv(c, ideal, trials=trials, seed=int(rng.integers(1 << 32)))
        checks.record("channel", res.equivalent, res.worst_fidelity, res.branch_count)
    elif kind == "cuccaro-adder":
        c = gadgets.cuccaro_adder(AdderSpec(n))
        _check_counts(checks, "counts", c, {"t_count": 0, "ccx_count": 2 * n - 2})
        ideal = permutation_map(_adder_ideal(n), 2 * n)
        res = channel_equiv(c, ideal, trials=trials, seed=int(rng.integers(1 << 32)))
        checks.record("channel", res.equivalent, res.worst_fidelity, res.branch_count)
        rep = replace_pairs(c)
        checks.record("replace-pairs-t", count(rep).t_count == 4 * n - 4)
    elif kind == "controlled-adder":
        c = gadgets.controlled_adder(AdderSpec(n))
        _check_counts(checks, "counts", c, {"t_count": 8 * n - 4})
        ideal = permutation_map(_adder_ideal(n, controlled=True), 2 * n + 1)
        res = channel_equiv(c, ideal, trials=trials, seed=int(rng.integers(1 << 32)))
        checks.record("channel", res.equivalent, res.worst_fidelity, res.branch_count)
    elif kind == "out-of-place-adder":
        c = gadgets.outofplace_adder(AdderSpec(n))
        _check_counts(checks, "counts", c, {"t_count": 4 * n})
        ideal = permutation_map(lambda k: k | ((((k & ((1 << n) - 1)) + (k >> n)) << (2 * n))),
                                2 * n, 3 * n + 1)
        res = channel_equiv(c, ideal, trials=trials, seed=int(rng.integers(1 << 32)))
        checks.record("channel", res.equivalent, res.worst_fidelity, res.branch_count)
        inv = gadgets.outofplace_adder_inverse(AdderSpec(n))
        checks.record("inverse-t-free", count(inv).t_count == 0)
    elif kind == "and":
        compute = gadgets.and_gadget_circuit("compute")
        _check_counts(checks, "compute-counts", compute, {"t_count": 4, "meas_depth": 1})
        ideal = permutation_map(lambda k: k | (((k & 1) & (k >> 1)) << 2), 2, 3)
        res = channel_equiv(compute, ideal, trials=trials, seed=int(rng.integers(1 << 32)))
        checks.record("compute-channel", res.equivalent, res.worst_fidelity, res.branch_count)
        roundtrip = gadgets.and_gadget_circuit("roundtrip")
        _check_counts(checks, "roundtrip-counts", roundtrip, {"t_count": 4, "meas_depth": 2})
        res = channel_equiv(roundtrip, lambda v: v, trials=trials, seed=int(rng.integers(1 << 32)))
        checks.record("roundtrip-channel", res.equivalent, res.worst_fidelity, res.branch_count)
    elif kind == "mcx":
        c = gadgets.multi_controlled_x(n)
        _check_counts(checks, "counts", c, {"t_count": 4 * n - 4})
        all_on = (1 << n) - 1
        ideal = permutation_map(
            lambda k: k ^ (1 << n) if (k & all_on) == all_on else k, n + 1)
        res = channel_equiv(c, ideal, trials=trials, seed=int(rng.integers(1 << 32)))
        checks.record("channel", res.equivalent, res.worst_fidelity, res.branch_count)
    elif kind == "hamming":
        hw = gadgets.hamming_weight(n)
        report = count(hw.circuit)
        checks.record("t-bound", report.t_count <= 4 * n)
        ok = True
        branches = 0
        for x in range(1 << n):
            for br in enumerate_branches(hw.circuit, x):
                branches += 1
                out = int(np.argmax(np.abs(br.final_state)))
                pos = {q: j for j, q in enumerate(hw.circuit.output_qubits())}
                val = sum(((out >> pos[q]) & 1) << p for p, q in enumerate(hw.register))
                ok &= val == bin(x).count("1")
        checks.record("popcount", ok, 1.0, branches)
    elif kind == "phase-gradient":
        c = gadgets.phase_gradient_add(n)
        adder_t = count(gadgets.gidney_adder(AdderSpec(n))).t_count
        checks.record("t-equals-adder", count(c).t_count == adder_t)
        grad = gradient_state(n)
        ok = True
        worst = 1.0
        branches = 0
        for k in range(1 << n):
            vec = np.zeros(1 << n, dtype=complex)
            vec[k] = 1.0
            inp = np.kron(grad, vec)
            expected = np.exp(2j * math.pi * k / (1 << n)) * inp
            for br in enumerate_branches(c, inp):
                branches += 1
                f = float(abs(np.vdot(expected, br.final_state)) ** 2)
                worst = min(worst, f)
                ok &= f >= 1 - 1e-10
        checks.record("kickback-phases", ok, worst, branches)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return checks


# -- argument parsing -------------------------------------------------------------


def _make_parser() -> argparse.ArgumentParser:
    # argparse handles usage errors: message to stderr, exit code 2.
    parser = argparse.ArgumentParser(prog="tclean", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="emit a construction as circuit text")
    p_build.add_argument("--kind", required=True, choices=BUILD_KINDS)
    p_build.add_argument("--n", type=int, default=2)
    p_build.add_argument("--carry-out", action="store_true")
    p_build.add_argument("--out")

    p_count = sub.add_parser("count", help="measure a circuit file")
    p_count.add_argument("--in", dest="infile", required=True)

    p_verify = sub.add_parser("verify", help="run a construction's oracle checks")
    p_verify.add_argument("--kind", required=True, choices=BUILD_KINDS)
    p_verify.add_argument("--n", type=int, default=2)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--trials", type=int, default=5)

    p_rewrite = sub.add_parser("rewrite", help="replace Toffoli pairs with temporary ANDs")
    p_rewrite.add_argument("--in", dest="infile", required=True)
    p_rewrite.add_argument("--out")
    p_rewrite.add_argument("--report", action="store_true")

    p_oracle = sub.add_parser("oracle", help="compile a boolean expression to a phase oracle")
    p_oracle.add_argument("--expr", required=True)
    p_oracle.add_argument("--out")

    p_cross = sub.add_parser("crossover", help="cost-model break-even widths")
    p_cross.add_argument("--t-volume", type=float, default=960.0)
    p_cross.add_argument("--idle-factor", type=float, default=1.0)
    return parser


def _write_circuit(circuit: Circuit, out: str | None) -> None:
    text = to_text(circuit)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    args = _make_parser().parse_args(argv)
    try:
        if args.command == "build":
            _write_circuit(build_circuit(args.kind, args.n, args.carry_out), args.out)
            return 0
        if args.command == "count":
            with open(args.infile) as fh:
                circuit = require_valid(from_text(fh.read()))
            sys.stdout.write(serialize_report(count(circuit)))
            return 0
        if args.command == "verify":
            checks = _verify_kind(args.kind, args.n, args.seed, args.trials)
            sys.stdout.write("".join(line + "\n" for line in checks.lines))
            return 1 if checks.failed else 0
        if args.command == "rewrite":
            with open(args.infile) as fh:
                circuit = require_valid(from_text(fh.read()))
            rewritten = replace_pairs(circuit)
            _write_circuit(rewritten, args.out)
            if args.report:
                sys.stdout.write("# before\n" + serialize_report(count(circuit)))
                sys.stdout.write("# after\n" + serialize_report(count(rewritten)))
            return 0
        if args.command == "oracle":
            _write_circuit(compile_oracle(args.expr), args.out)
            return 0
        if args.command == "crossover":
            model = CostModel(t_state_volume=args.t_volume, idle_factor=args.idle_factor)
            n_star = crossover(lambda n: effective_t_formula(n, "temporary-and", model),
                               lambda n: effective_t_formula(n, "cuccaro", model))
            cutoff = hybrid_cutoff(model)
            sys.stdout.write(f"crossover {n_star}\nhybrid_cutoff {cutoff}\n")
            return 0
    except (TextFormatError, OracleParseError, TooManyVariablesError, NoCrossoverError,
            CircuitError, SimulationError, FileNotFoundError, ValueError) as exc:
        sys.stderr.write(f"tclean: {exc}\n")
        return 1
    raise AssertionError("unreachable")


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
