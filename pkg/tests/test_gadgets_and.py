"""The temporary logical-AND: counts, exactness, outcome independence."""
import numpy as np
import pytest

from tclean.gadgets import (
    AND_REVERSE_NET_T,
    AND_T_COUNT,
    and_gadget_circuit,
)
from tclean.ir import GadgetTag, Op, T_FAMILY, validate
from tclean.resources import count
from tclean.sim import (
    T_STATE,
    channel_equiv,
    enumerate_branches,
    fidelity,
    permutation_map,
    random_state,
    run,
)


def and_isometry(vec):
    out = np.zeros(8, dtype=complex)
    for k in range(4):
        out[k | (((k & 1) & (k >> 1)) << 2)] = vec[k]
    return out


def test_truth_table():
    c = and_gadget_circuit("compute")
    for a in (0, 1):
        for b in (0, 1):
            result = run(c, a | (b << 1), seed=0)
            out = int(np.argmax(np.abs(result.final_state)))
            assert out >> 2 == (a & b)
            assert abs(result.final_state[out]) > 1 - 1e-12


def test_compute_t_count_is_four():
    c = and_gadget_circuit("compute")
    assert count(c).t_count == AND_T_COUNT == 4
    assert count(c).meas_depth == 1


def test_compute_matches_ideal_isometry_on_superpositions():
    c = and_gadget_circuit("compute")
    uniform = np.full(4, 0.5, dtype=complex)
    res = channel_equiv(c, and_isometry, trials=20, tol=1e-10, seed=7,
                        input_states=[uniform] + [random_state(2, np.random.default_rng(7))
                                                  for _ in range(19)])
    assert res.equivalent
    assert res.worst_fidelity >= 1 - 1e-10


def test_uncompute_has_zero_t_and_is_outcome_independent():
    c = and_gadget_circuit("roundtrip")
    (uncompute_span,) = [s for s in c.spans if s.tag is GadgetTag.AND_UNCOMPUTE]
    fragment = c.instructions[uncompute_span.start:uncompute_span.end]
    assert sum(1 for i in fragment if i.op in T_FAMILY) == 0
    assert count(c).t_count == 4  # all of it in the compute half

    rng = np.random.default_rng(11)
    state = random_state(2, rng)
    branches = enumerate_branches(c, state)
    assert len(branches) == 2  # the fixup measurement forks, both outcomes reachable
    for br in branches:
        assert fidelity(br.final_state, state) >= 1 - 1e-10
    assert fidelity(branches[0].final_state, branches[1].final_state) >= 1 - 1e-10


def test_forced_fixup_outcomes_agree():
    c = and_gadget_circuit("roundtrip")
    bit = next(i.result for i in c.instructions if i.result is not None)
    rng = np.random.default_rng(13)
    state = random_state(2, rng)
    out0 = run(c, state, force={bit: 0}).final_state
    out1 = run(c, state, force={bit: 1}).final_state
    assert fidelity(out0, out1) >= 1 - 1e-10


def test_roundtrip_is_identity_channel():
    c = and_gadget_circuit("roundtrip")
    res = channel_equiv(c, lambda v: v, trials=25, tol=1e-10, seed=5)
    assert res.equivalent


def test_reverse_variant_counts():
    c = and_gadget_circuit("reverse")
    # Raw T-type instructions: 4 in the compute, 3 in the reversal.
    assert count(c).t_count == 7
    reverse_t = count(c).t_count - AND_T_COUNT
    assert reverse_t - 1 == AND_REVERSE_NET_T == 2  # one |T> state is recovered
    assert AND_T_COUNT + AND_REVERSE_NET_T == 6  # the comparison variant's total


def test_reverse_variant_restores_state_and_recovers_t():
    c = and_gadget_circuit("reverse")

    def ideal(vec):
        return np.kron(T_STATE, vec)  # ancilla (high bit) ends in |T>

    res = channel_equiv(c, ideal, trials=15, tol=1e-10, seed=9)
    assert res.equivalent


def test_all_variants_validate():
    for variant in ("compute", "roundtrip", "reverse"):
        assert validate(and_gadget_circuit(variant)) is None
