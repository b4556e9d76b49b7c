"""Adder constructions: exact counts and exhaustive/branch-complete semantics."""
import numpy as np
import pytest

from tclean.gadgets import (
    AdderSpec,
    controlled_adder,
    cuccaro_adder,
    gidney_adder,
    outofplace_adder,
    outofplace_adder_inverse,
)
from tclean.ir import Op, T_FAMILY, concatenate, validate
from tclean.resources import CostModel, count, effective_t
from tclean.rewrite import lower_ccx
from tclean.sim import (
    channel_equiv,
    decode_register,
    enumerate_branches,
    permutation_map,
    register_basis,
)


def assert_basis_add(circuit, n, a, b, *, cin=0, ctrl=None, carry_out=False):
    values = {"a": a, "b": b}
    if ctrl is not None:
        values["ctrl"] = ctrl
    if cin:
        values["cin"] = 1
    effective_ctrl = 1 if ctrl is None else ctrl
    total = a + b + cin
    for br in enumerate_branches(circuit, register_basis(circuit, values)):
        out = int(np.argmax(np.abs(br.final_state)))
        assert abs(br.final_state[out]) ** 2 > 1 - 1e-9
        assert decode_register(circuit, out, "a") == a
        want_b = total % (1 << n) if effective_ctrl else b
        assert decode_register(circuit, out, "b") == want_b
        if carry_out:
            want_c = (total >> n) if effective_ctrl else 0
            assert decode_register(circuit, out, "cout") == want_c


@pytest.mark.parametrize("n", range(1, 5))
def test_gidney_exhaustive(n):
    c = gidney_adder(AdderSpec(n))
    for a in range(1 << n):
        for b in range(1 << n):
            assert_basis_add(c, n, a, b)


@pytest.mark.parametrize("n", (1, 2, 3))
def test_gidney_carry_out_exhaustive(n):
    c = gidney_adder(AdderSpec(n, carry_out=True))
    for a in range(1 << n):
        for b in range(1 << n):
            assert_basis_add(c, n, a, b, carry_out=True)


def test_gidney_carry_in():
    c = gidney_adder(AdderSpec(2, carry_in=True, carry_out=True))
    for a in range(4):
        for b in range(4):
            for cin in (0, 1):
                assert_basis_add(c, 2, a, b, cin=cin, carry_out=True)


@pytest.mark.parametrize("build,ctrl_values", [
    (cuccaro_adder, (None,)),
    (controlled_adder, (0, 1)),
])
def test_carry_variants_semantics(build, ctrl_values):
    c = build(AdderSpec(2, carry_in=True, carry_out=True))
    for a in range(4):
        for b in range(4):
            for cin in (0, 1):
                for ctrl in ctrl_values:
                    assert_basis_add(c, 2, a, b, cin=cin, ctrl=ctrl, carry_out=True)


@pytest.mark.parametrize("n", list(range(1, 17)) + [32, 64])
def test_gidney_counts(n):
    r = count(gidney_adder(AdderSpec(n)))
    assert r.t_count == 4 * n - 4
    assert r.meas_depth == 2 * n - 2
    assert r.ancilla_max == max(n - 1, 0)
    assert r.ancilla_depth == n * (n - 1)


@pytest.mark.parametrize("n", (1, 2, 5, 8))
def test_gidney_carry_out_counts(n):
    r = count(gidney_adder(AdderSpec(n, carry_out=True)))
    assert r.t_count == 4 * n
    assert r.meas_depth == 2 * n


def test_adder_building_block_counts():
    # One full block: carry in, carry out, one temporary AND.
    r = count(gidney_adder(AdderSpec(1, carry_in=True, carry_out=True)))
    assert r.t_count == 4
    assert r.meas_depth == 2


def test_n1_is_single_cx():
    c = gidney_adder(AdderSpec(1))
    assert [i.op for i in c.instructions] == [Op.CX]
    assert count(c).t_count == 0


def test_gidney_effective_t_tracks_formula():
    model = CostModel()
    for n in (4, 8, 16, 32):
        measured = effective_t(count(gidney_adder(AdderSpec(n))), model)
        assert measured == pytest.approx(n * (n - 1) / 480 + 4 * n - 4, abs=1e-9)


def test_zero_ancilla_effective_equals_t_count():
    c = gidney_adder(AdderSpec(1))  # a bare CX
    r = count(c)
    assert r.ancilla_depth == 0
    assert effective_t(r) == r.t_count


@pytest.mark.parametrize("n", range(1, 5))
def test_cuccaro_exhaustive(n):
    c = cuccaro_adder(AdderSpec(n))
    for a in range(1 << n):
        for b in range(1 << n):
            assert_basis_add(c, n, a, b)


@pytest.mark.parametrize("n", range(1, 10))
def test_cuccaro_ccx_count(n):
    # Measured boundary constants, frozen: 2n-2 without carry-out, 2n with.
    assert count(cuccaro_adder(AdderSpec(n))).ccx_count == 2 * n - 2
    assert count(cuccaro_adder(AdderSpec(n, carry_out=True))).ccx_count == 2 * n


@pytest.mark.parametrize("n", range(2, 9))
def test_cuccaro_paired_lowering_count(n):
    lowered = lower_ccx(cuccaro_adder(AdderSpec(n)), "paired4")
    assert count(lowered).t_count == 8 * n - 8
    assert count(lowered).ccx_count == 0


@pytest.mark.parametrize("n", (2, 3))
def test_cuccaro_matches_gidney_channel(n):
    ideal = permutation_map(_inplace_add_ideal(n), 2 * n)
    assert channel_equiv(gidney_adder(AdderSpec(n)), ideal, trials=10, tol=1e-10, seed=1)
    assert channel_equiv(cuccaro_adder(AdderSpec(n)), ideal, trials=10, tol=1e-10, seed=2)


def _inplace_add_ideal(n):
    def fn(k):
        a = k & ((1 << n) - 1)
        b = k >> n
        return a | (((a + b) % (1 << n)) << n)
    return fn


@pytest.mark.parametrize("n", range(1, 4))
def test_controlled_exhaustive(n):
    c = controlled_adder(AdderSpec(n))
    for ctrl in (0, 1):
        for a in range(1 << n):
            for b in range(1 << n):
                assert_basis_add(c, n, a, b, ctrl=ctrl)


def test_controlled_carry_out():
    c = controlled_adder(AdderSpec(2, carry_out=True))
    for ctrl in (0, 1):
        for a in range(4):
            for b in range(4):
                assert_basis_add(c, 2, a, b, ctrl=ctrl, carry_out=True)


@pytest.mark.parametrize("n", range(1, 9))
def test_controlled_t_count(n):
    # 8 per block; the boundary specialization lands the total on 8n-4.
    assert count(controlled_adder(AdderSpec(n))).t_count == 8 * n - 4


def test_controlled_per_block_is_eight():
    counts = [count(controlled_adder(AdderSpec(n))).t_count for n in (3, 4, 5)]
    assert counts[1] - counts[0] == 8
    assert counts[2] - counts[1] == 8


@pytest.mark.parametrize("n", range(1, 4))
def test_outofplace_exhaustive(n):
    c = outofplace_adder(AdderSpec(n))
    for a in range(1 << n):
        for b in range(1 << n):
            br = enumerate_branches(c, register_basis(c, {"a": a, "b": b}))[0]
            out = int(np.argmax(np.abs(br.final_state)))
            assert decode_register(c, out, "s") == a + b
            assert decode_register(c, out, "a") == a
            assert decode_register(c, out, "b") == b


@pytest.mark.parametrize("n", range(1, 9))
def test_outofplace_counts(n):
    fwd = count(outofplace_adder(AdderSpec(n)))
    assert fwd.t_count == 4 * n  # one AND per block, measured constant 0
    inv = outofplace_adder_inverse(AdderSpec(n))
    assert count(inv).t_count == 0
    assert sum(1 for i in inv.instructions if i.op in T_FAMILY) == 0


@pytest.mark.parametrize("n", (1, 2, 3))
def test_outofplace_roundtrip_identity(n):
    combo = concatenate(outofplace_adder(AdderSpec(n)), outofplace_adder_inverse(AdderSpec(n)))
    assert validate(combo) is None
    res = channel_equiv(combo, lambda v: v, trials=8, tol=1e-10, seed=4)
    assert res.equivalent


def test_all_adders_validate():
    for n in (1, 2, 5):
        for spec in (AdderSpec(n), AdderSpec(n, carry_out=True),
                     AdderSpec(n, carry_in=True), AdderSpec(n, carry_in=True, carry_out=True)):
            for build in (gidney_adder, cuccaro_adder, controlled_adder):
                assert validate(build(spec)) is None
        assert validate(outofplace_adder(AdderSpec(n))) is None
        assert validate(outofplace_adder_inverse(AdderSpec(n))) is None


def test_adder_spec_rejects_zero_width():
    with pytest.raises(ValueError):
        AdderSpec(0)


@pytest.mark.parametrize("n", range(1, 9))
def test_expectation_table_matches_measurements(n):
    from tclean.gadgets import and_gadget_circuit, expected_counts, multi_controlled_x

    cases = {
        "gidney-adder": gidney_adder(AdderSpec(n)),
        "gidney-adder-cout": gidney_adder(AdderSpec(n, carry_out=True)),
        "controlled-adder": controlled_adder(AdderSpec(n)),
        "cuccaro-adder": cuccaro_adder(AdderSpec(n)),
        "out-of-place-adder": outofplace_adder(AdderSpec(n)),
        "mcx": multi_controlled_x(n),
    }
    if n == 1:
        cases["adder-block"] = gidney_adder(AdderSpec(1, carry_in=True, carry_out=True))
        cases["and-compute"] = and_gadget_circuit("compute")
        cases["and-roundtrip"] = and_gadget_circuit("roundtrip")
    for kind, circuit in cases.items():
        want = expected_counts(kind, n)
        got = count(circuit)
        assert (got.t_count, got.meas_depth, got.ancilla_max) == \
            (want.t_count, want.meas_depth, want.ancillae), kind
