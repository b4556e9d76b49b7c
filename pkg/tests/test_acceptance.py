"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run as ``pytest tests/test_acceptance.py -v -s`` (or scripts/run_acceptance.py)
to see the per-criterion lines and timings.  Every tolerance is pinned here;
nothing is deferred to later calibration.
"""
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from tclean.gadgets import (
    AdderSpec,
    and_gadget_circuit,
    apply_rz_via_hamming,
    controlled_adder,
    cuccaro_adder,
    gidney_adder,
    hamming_roundtrip,
    hamming_weight,
    multi_controlled_x,
    outofplace_adder,
    phase_gradient_add,
)
from tclean.ir import CircuitBuilder, GadgetTag, T_FAMILY, validate
from tclean.oracle import binary_node_count, compile_oracle, evaluate, parse_expression
from tclean.resources import CostModel, count, crossover, effective_t_formula, hybrid_cutoff
from tclean.rewrite import find_pairs, lower_ccx, replace_pairs
from tclean.sim import (
    channel_equiv,
    decode_register,
    diagonal_map,
    enumerate_branches,
    fidelity,
    gradient_state,
    random_state,
    register_basis,
    run,
)

FIDELITY_TOL = 1e-10


@contextmanager
def criterion(num, label, budget_seconds):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        print(f"ACCEPTANCE {num:2d} [{label}]: {'PASS' if ok else 'FAIL'} ({elapsed:.2f}s)")
    assert elapsed < budget_seconds, f"criterion {num} runtime {elapsed:.1f}s over budget"


def basis_outcome(state):
    idx = int(np.argmax(np.abs(state)))
    assert abs(state[idx]) ** 2 > 1 - 1e-9, "output is not a basis state"
    return idx


def inplace_add_map(circuit, n, *, controlled=False, carry_out=False):
    """Ideal in-place addition as a statevector map over the declared inputs."""
    regs = {reg.name: reg.qubits for reg in circuit.inputs}
    n_in = len(circuit.input_qubits())
    pos = {q: j for j, q in enumerate(circuit.input_qubits())}
    out_pos = {q: j for j, q in enumerate(circuit.output_qubits())}
    n_out = len(circuit.output_qubits())

    def field(k, name):
        return sum(((k >> pos[q]) & 1) << i for i, q in enumerate(regs[name]))

    def apply(vec):
        out = np.zeros(1 << n_out, dtype=complex)
        for k in range(1 << n_in):
            a = field(k, "a")
            b = field(k, "b")
            ctrl = field(k, "ctrl") if controlled else 1
            total = a + b if ctrl else b
            sum_bits = total % (1 << n)
            j = 0
            for q in circuit.input_qubits():
                bit = (k >> pos[q]) & 1
                j |= bit << out_pos[q]
            for i, q in enumerate(regs["b"]):
                j &= ~(1 << out_pos[q])
                j |= ((sum_bits >> i) & 1) << out_pos[q]
            if carry_out:
                (cq,) = circuit.register("cout").qubits
                j |= ((total >> n) & 1 if ctrl else 0) << out_pos[cq]
            out[j] += vec[k]
        return out

    return apply


def test_criterion_01_count_identities():
    with criterion(1, "count identities 4n-4 / 2n-2", 1.0):
        for n in range(1, 65):
            report = count(gidney_adder(AdderSpec(n)))
            assert report.t_count == 4 * n - 4, n
            assert report.meas_depth == 2 * n - 2, n
        five = count(gidney_adder(AdderSpec(5)))
        assert (five.t_count, five.meas_depth) == (16, 8)


def test_criterion_02_and_gadget():
    with criterion(2, "AND gadget 4/0/2 and identity channel", 1.0):
        compute = and_gadget_circuit("compute")
        assert count(compute).t_count == 4

        roundtrip = and_gadget_circuit("roundtrip")
        (unc,) = [s for s in roundtrip.spans if s.tag is GadgetTag.AND_UNCOMPUTE]
        uncompute_t = sum(1 for i in roundtrip.instructions[unc.start:unc.end]
                          if i.op in T_FAMILY)
        assert uncompute_t == 0

        reverse = and_gadget_circuit("reverse")
        reverse_raw_t = count(reverse).t_count - count(compute).t_count
        assert reverse_raw_t - 1 == 2  # three T gates minus one recovered |T> state

        rng = np.random.default_rng(2024)
        for _ in range(25):
            state = random_state(2, rng)
            branches = enumerate_branches(roundtrip, state)
            assert len(branches) == 2  # both fixup outcomes occur
            for br in branches:
                assert fidelity(br.final_state, state) >= 1 - FIDELITY_TOL


def test_criterion_03_adder_semantics():
    with criterion(3, "adder semantics, exhaustive + phase-exact", 120.0):
        # Exhaustive basis pairs with full branch enumeration, n <= 4.
        for n in range(1, 5):
            built = {
                "gidney": gidney_adder(AdderSpec(n)),
                "cuccaro": cuccaro_adder(AdderSpec(n)),
                "controlled": controlled_adder(AdderSpec(n)),
                "out-of-place": outofplace_adder(AdderSpec(n)),
                "gidney-cout": gidney_adder(AdderSpec(n, carry_out=True)),
            }
            for a in range(1 << n):
                for b in range(1 << n):
                    for name, c in built.items():
                        ctrls = (0, 1) if name == "controlled" else (None,)
                        for ctrl in ctrls:
                            values = {"a": a, "b": b}
                            if ctrl is not None:
                                values["ctrl"] = ctrl
                            active = 1 if ctrl is None else ctrl
                            total = a + b if active else b
                            for br in enumerate_branches(c, register_basis(c, values)):
                                out = basis_outcome(br.final_state)
                                assert decode_register(c, out, "a") == a
                                if name == "out-of-place":
                                    assert decode_register(c, out, "b") == b
                                    assert decode_register(c, out, "s") == a + b
                                else:
                                    assert decode_register(c, out, "b") == total % (1 << n)
                                if name == "gidney-cout":
                                    assert decode_register(c, out, "cout") == total >> n

        # Phase-exact equivalence on random superposed states for n <= 6.
        # Full branch enumeration at small n; at larger n measurement branches
        # are sampled (their outcome-independence is certified exhaustively
        # above).  The controlled adder tops out at n=5 with a n=6 spot check
        # to stay inside the dense simulator's budget.
        rng = np.random.default_rng(33)
        plans = [
            ("gidney", lambda n: gidney_adder(AdderSpec(n)), {}, [(2, 20, "all"), (4, 20, 2), (6, 20, 2)]),
            ("cuccaro", lambda n: cuccaro_adder(AdderSpec(n)), {}, [(2, 20, "all"), (6, 20, "all")]),
            ("controlled", lambda n: controlled_adder(AdderSpec(n)),
             {"controlled": True}, [(2, 20, "all"), (5, 20, 1), (6, 3, 1)]),
            ("out-of-place", lambda n: outofplace_adder(AdderSpec(n)), {},
             [(2, 20, "all"), (6, 20, "all")]),
        ]
        for name, build, kwargs, cases in plans:
            for n, trials, branches in cases:
                c = build(n)
                if name == "out-of-place":
                    ideal = _outofplace_map(c, n)
                else:
                    ideal = inplace_add_map(c, n, **kwargs)
                res = channel_equiv(c, ideal, trials=trials, tol=FIDELITY_TOL,
                                    seed=int(rng.integers(1 << 32)), branches=branches)
                assert res.equivalent, (name, n, res.worst_fidelity)


def _outofplace_map(circuit, n):
    def apply(vec):
        out = np.zeros(1 << (3 * n + 1), dtype=complex)
        for k in range(1 << (2 * n)):
            a = k & ((1 << n) - 1)
            b = k >> n
            out[k | ((a + b) << (2 * n))] += vec[k]
        return out

    return apply


def test_criterion_04_opportunity_cost_model():
    with criterion(4, "crossover 1920, cutoffs 960/5760", 1.0):
        model = CostModel()
        n_star = crossover(lambda n: effective_t_formula(n, "temporary-and", model),
                           lambda n: effective_t_formula(n, "cuccaro", model))
        assert n_star == 1920
        assert hybrid_cutoff(model) == 960
        assert hybrid_cutoff(CostModel(idle_factor=6)) == 5760


def test_criterion_05_rewriter():
    with criterion(5, "pair replacement saves 4; 8n -> 4n on ripple baseline", 120.0):
        b = CircuitBuilder()
        (a,) = b.register("a", 1)
        (c2,) = b.register("b", 1)
        (x,) = b.register("x", 1)
        t = b.alloc0()
        b.ccx(a, c2, t)
        b.cx(t, x)
        b.ccx(a, c2, t)
        b.release(t)
        pattern = b.build()
        assert count(lower_ccx(pattern, "paired4")).t_count == 8
        assert count(replace_pairs(pattern)).t_count == 4

        rng = np.random.default_rng(55)
        plans = {2: (5, "all"), 3: (5, "all"), 4: (3, 2), 5: (3, 2),
                 6: (2, 2), 7: (1, 1), 8: (1, 1)}
        for n in range(2, 9):
            baseline = cuccaro_adder(AdderSpec(n))
            assert count(lower_ccx(baseline, "paired4")).t_count == 8 * n - 8
            replaced = replace_pairs(baseline)
            assert count(replaced).t_count == 4 * n - 4
            trials, branches = plans[n]
            res = channel_equiv(
                replaced,
                lambda v, c=baseline: run(c, v, seed=0).final_state,
                trials=trials, tol=FIDELITY_TOL,
                seed=int(rng.integers(1 << 32)), branches=branches)
            assert res.equivalent, (n, res.worst_fidelity)


def test_criterion_06_multi_controlled_not():
    with criterion(6, "MCX 4k-4 and truth tables to k=5", 30.0):
        for k in range(1, 65):
            assert count(multi_controlled_x(k)).t_count == 4 * k - 4, k
        for k in range(1, 6):
            c = multi_controlled_x(k)
            for ctl in range(1 << k):
                for tgt in (0, 1):
                    idx = register_basis(c, {"c": ctl, "t": tgt})
                    for br in enumerate_branches(c, idx):
                        out = basis_outcome(br.final_state)
                        assert decode_register(c, out, "c") == ctl
                        want = tgt ^ (ctl == (1 << k) - 1)
                        assert decode_register(c, out, "t") == want


def test_criterion_07_hamming_weight():
    with criterion(7, "Hamming register popcount / <=4n / T-free uncompute", 120.0):
        for n in range(1, 9):
            hw = hamming_weight(n)
            pos = {q: j for j, q in enumerate(hw.circuit.output_qubits())}
            for x in range(1 << n):
                out = basis_outcome(run(hw.circuit, x, seed=1).final_state)
                val = sum(((out >> pos[q]) & 1) << p for p, q in enumerate(hw.register))
                assert val == bin(x).count("1"), (n, x)
        for n in range(1, 17):
            assert count(hamming_weight(n).circuit).t_count <= 4 * n, n
            hr = hamming_roundtrip(n)
            tail = hr.circuit.instructions[hr.phase_end:]
            assert sum(1 for i in tail if i.op in T_FAMILY) == 0, n
        theta = 1.234
        for n in range(1, 5):
            c = apply_rz_via_hamming(theta, n)
            ideal = diagonal_map(lambda k: np.exp(1j * theta * bin(k).count("1")), n)
            res = channel_equiv(c, ideal, trials=10, tol=FIDELITY_TOL, seed=n)
            assert res.equivalent, (n, res.worst_fidelity)


def test_criterion_08_phase_gradient():
    with criterion(8, "phase gradient e^(2*pi*i*k/8) at adder cost", 10.0):
        n = 3
        c = phase_gradient_add(n)
        grad = gradient_state(n)
        for k in range(1 << n):
            vec = np.zeros(1 << n, dtype=complex)
            vec[k] = 1.0
            inp = np.kron(grad, vec)
            expected = np.exp(2j * math.pi * k / (1 << n)) * inp
            for br in enumerate_branches(c, inp):
                assert abs(np.vdot(expected, br.final_state)) ** 2 >= 1 - FIDELITY_TOL, k
        assert count(c).t_count == count(gidney_adder(AdderSpec(n))).t_count


def _random_expression(rng, n_vars, max_binary):
    binary = 0

    def gen(depth):
        nonlocal binary
        if depth > 3 or rng.random() < 0.35:
            var = f"x{int(rng.integers(n_vars))}"
            return f"!{var}" if rng.random() < 0.3 else var
        op = rng.choice(["&", "|", "^"], p=[0.45, 0.35, 0.2])
        if op in "&|":
            if binary >= max_binary:
                return gen(4)
            binary += 1
        text = f"({gen(depth + 1)} {op} {gen(depth + 1)})"
        return f"!{text}" if rng.random() < 0.15 else text

    return gen(0)


def test_criterion_09_oracle_compiler():
    with criterion(9, "phase oracles exact; AND build is half the Toffoli build", 120.0):
        rng = np.random.default_rng(99)
        checked = 0
        while checked < 50:
            expr = _random_expression(rng, n_vars=int(rng.integers(2, 7)), max_binary=4)
            ast = parse_expression(expr)
            c_and = compile_oracle(expr, "and")
            if c_and.n_qubits > 16:
                continue  # keep the dense simulation small
            checked += 1
            n = len(c_and.input_qubits())
            uniform = np.full(1 << n, (1 << n) ** -0.5, dtype=complex)
            ideal = diagonal_map(lambda k: -1.0 if evaluate(ast, k) else 1.0, n)
            res = channel_equiv(c_and, ideal, input_states=[uniform], tol=FIDELITY_TOL)
            assert res.equivalent, (expr, res.worst_fidelity)

            c_ccx = compile_oracle(expr, "ccx")
            assert len(find_pairs(c_ccx)) == binary_node_count(ast), expr
            lowered = lower_ccx(c_ccx, "paired4")
            assert 2 * count(c_and).t_count == count(lowered).t_count, expr


def test_criterion_10_substituted_projections():
    with criterion(10, "large-scale projections substituted by the cost model", 1.0):
        # End-to-end factoring budgets and physical surface-code volumes are
        # not desk-reproducible; the analytic cost-model identities of
        # criterion 4 stand in for them, re-asserted here.
        model = CostModel()
        assert hybrid_cutoff(model) == 960
        assert crossover(lambda n: effective_t_formula(n, "temporary-and", model),
                         lambda n: effective_t_formula(n, "cuccaro", model)) == 1920
