"""Golden-file corpus: stored circuits with expected reports and semantics.

Layout: ``corpus/<name>/{circuit.qc, report.txt, semantics.txt, build_cmd.txt}``.
Each entry is checked three ways: the build command reproduces the stored
circuit byte-exactly, the measured resource report matches the stored one,
and the simulated behaviour matches the semantics descriptor.
"""
from __future__ import annotations

import io
import math
import shlex
from contextlib import redirect_stdout
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ir import Circuit, require_valid
from .oracle import evaluate, parse_expression
from .resources import count, serialize_report
from .rewrite import find_pairs, lower_ccx, replace_pairs
from .sim import (
    channel_equiv,
    decode_register,
    diagonal_map,
    enumerate_branches,
    gradient_state,
    register_basis,
    run,
)
from .textfmt import from_text, to_text


@dataclass(frozen=True)
class GoldenSpec:
    name: str
    build_cmd: str | None  # tclean CLI arguments, or None for hand-written entries
    semantics: str


#: The canonical compute/uncompute Toffoli-pair pattern (not CLI-buildable).
CANONICAL_PAIR_TEXT = """\
#input a 0
#input b 1
#input x 2
alloc0 3
ccx 0 1 3
cx 3 2
ccx 0 1 3
release 3
"""

ENTRIES: tuple[GoldenSpec, ...] = (
    GoldenSpec("gidney-adder-n1", "build --kind gidney-adder --n 1", "add n=1 samples=all"),
    GoldenSpec("gidney-adder-n2", "build --kind gidney-adder --n 2", "add n=2 samples=all"),
    GoldenSpec("gidney-adder-n3", "build --kind gidney-adder --n 3", "add n=3 samples=all"),
    GoldenSpec("gidney-adder-n4", "build --kind gidney-adder --n 4", "add n=4 samples=12"),
    GoldenSpec("gidney-adder-n5", "build --kind gidney-adder --n 5", "add n=5 samples=8"),
    GoldenSpec("gidney-adder-n6", "build --kind gidney-adder --n 6", "add n=6 samples=6"),
    GoldenSpec("gidney-adder-n5-carry", "build --kind gidney-adder --n 5 --carry-out",
               "add n=5 carry_out=1 samples=8"),
    GoldenSpec("cuccaro-adder-n4", "build --kind cuccaro-adder --n 4", "add n=4 samples=12"),
    GoldenSpec("controlled-adder-n3", "build --kind controlled-adder --n 3",
               "add n=3 controlled=1 samples=10"),
    GoldenSpec("out-of-place-adder-n3", "build --kind out-of-place-adder --n 3",
               "oop-add n=3 samples=10"),
    GoldenSpec("and-gadget", "build --kind and", "identity trials=6"),
    GoldenSpec("mcx-k3", "build --kind mcx --n 3", "mcx k=3"),
    GoldenSpec("hamming-n5", "build --kind hamming --n 5", "hamming n=5"),
    GoldenSpec("phase-gradient-n3", "build --kind phase-gradient --n 3", "phase-gradient n=3"),
    GoldenSpec("oracle-and", "oracle --expr 'x0 & x1'", "phase-oracle x0 & x1"),
    GoldenSpec("oracle-nested", "oracle --expr 'x0 & (x1 | x2)'", "phase-oracle x0 & (x1 | x2)"),
    GoldenSpec("canonical-pair", None, "rewrite-canonical"),
)


def default_corpus_dir() -> Path:
    return Path(__file__).resolve().parents[2] / "corpus"


def _cli_output(cmd: str) -> str:
    from .cli import main  # local import: cli imports this module's siblings

    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(shlex.split(cmd))
    if code != 0:
        raise RuntimeError(f"build command failed with exit {code}: {cmd}")
    return buf.getvalue()


def render_entry(spec: GoldenSpec) -> dict[str, str]:
    """The four files of one corpus entry, rendered fresh."""
    text = CANONICAL_PAIR_TEXT if spec.build_cmd is None else _cli_output(spec.build_cmd)
    circuit = require_valid(from_text(text))
    return {
        "circuit.qc": text,
        "report.txt": serialize_report(count(circuit)),
        "semantics.txt": spec.semantics + "\n",
        "build_cmd.txt": (spec.build_cmd or "none") + "\n",
    }


def _parse_kv(tokens: list[str]) -> dict[str, str]:
    return dict(token.split("=", 1) for token in tokens if "=" in token)


def _basis_peak(state: np.ndarray) -> int:
    idx = int(np.argmax(np.abs(state)))
    if abs(state[idx]) ** 2 < 1 - 1e-9:
        raise AssertionError("final state is not a computational basis state")
    return idx


def _check_add(circuit: Circuit, kv: dict[str, str], samples: str) -> None:
    n = int(kv["n"])
    controlled = kv.get("controlled") == "1"
    carry_out = kv.get("carry_out") == "1"
    carry_in = kv.get("carry_in") == "1"
    rng = np.random.default_rng(7)
    if samples == "all":
        cases = [(a, b) for a in range(1 << n) for b in range(1 << n)]
    else:
        cases = [(int(rng.integers(1 << n)), int(rng.integers(1 << n)))
                 for _ in range(int(samples))]
    for a, b in cases:
        for ctrl in ((0, 1) if controlled else (1,)):
            for cin in ((0, 1) if carry_in else (0,)):
                values = {"a": a, "b": b}
                if controlled:
                    values["ctrl"] = ctrl
                if carry_in:
                    values["cin"] = cin
                idx = register_basis(circuit, values)
                result = run(circuit, idx, seed=int(rng.integers(1 << 32)))
                out = _basis_peak(result.final_state)
                total = a + b + cin if ctrl else b
                want_b = total % (1 << n) if ctrl else b
                if decode_register(circuit, out, "a") != a:
                    raise AssertionError(f"register a changed on input {values}")
                if decode_register(circuit, out, "b") != want_b:
                    raise AssertionError(f"wrong sum on input {values}")
                if carry_out and decode_register(circuit, out, "cout") != (total >> n if ctrl else 0):
                    raise AssertionError(f"wrong carry on input {values}")


def _check_oop_add(circuit: Circuit, kv: dict[str, str], samples: str) -> None:
    n = int(kv["n"])
    rng = np.random.default_rng(11)
    for _ in range(int(samples)):
        a = int(rng.integers(1 << n))
        b = int(rng.integers(1 << n))
        idx = register_basis(circuit, {"a": a, "b": b})
        out = _basis_peak(run(circuit, idx, seed=int(rng.integers(1 << 32))).final_state)
        if decode_register(circuit, out, "s") != a + b:
            raise AssertionError(f"wrong out-of-place sum for a={a} b={b}")


def _check_mcx(circuit: Circuit, k: int) -> None:
    for ctl in range(1 << k):
        for t in (0, 1):
            idx = register_basis(circuit, {"c": ctl, "t": t})
            for branch in enumerate_branches(circuit, idx):
                out = _basis_peak(branch.final_state)
                want = t ^ (ctl == (1 << k) - 1)
                if decode_register(circuit, out, "t") != want:
                    raise AssertionError(f"mcx wrong for controls={ctl:0{k}b} target={t}")


def _check_hamming(circuit: Circuit, n: int) -> None:
    from .gadgets import hamming_weight

    register = hamming_weight(n).register
    pos = {q: j for j, q in enumerate(circuit.output_qubits())}
    for x in range(1 << n):
        out = _basis_peak(run(circuit, x, seed=13).final_state)
        val = sum(((out >> pos[q]) & 1) << p for p, q in enumerate(register))
        if val != bin(x).count("1"):
            raise AssertionError(f"popcount wrong for input {x:0{n}b}")


def _check_phase_gradient(circuit: Circuit, n: int) -> None:
    grad = gradient_state(n)
    for k in range(1 << n):
        vec = np.zeros(1 << n, dtype=complex)
        vec[k] = 1.0
        inp = np.kron(grad, vec)
        expected = np.exp(2j * math.pi * k / (1 << n)) * inp
        for branch in enumerate_branches(circuit, inp):
            if abs(np.vdot(expected, branch.final_state)) ** 2 < 1 - 1e-10:
                raise AssertionError(f"phase wrong on |{k}>")


def _check_phase_oracle(circuit: Circuit, expr: str) -> None:
    ast = parse_expression(expr)
    n = len(circuit.input_qubits())
    uniform = np.full(1 << n, (1 << n) ** -0.5, dtype=complex)
    ideal = diagonal_map(lambda k: -1.0 if evaluate(ast, k) else 1.0, n)(uniform)
    for branch in enumerate_branches(circuit, uniform):
        if abs(np.vdot(ideal, branch.final_state)) ** 2 < 1 - 1e-10:
            raise AssertionError(f"oracle phases wrong for {expr!r}")


def _check_rewrite_canonical(circuit: Circuit) -> None:
    pairs = find_pairs(circuit)
    if len(pairs) != 1:
        raise AssertionError(f"expected one Toffoli pair, found {len(pairs)}")
    baseline = count(lower_ccx(circuit, "paired4")).t_count
    replaced = replace_pairs(circuit)
    after = count(replaced).t_count
    if (baseline, after) != (8, 4):
        raise AssertionError(f"expected 8 -> 4 T, got {baseline} -> {after}")
    res = channel_equiv(replaced, lambda v: run(circuit, v, seed=0).final_state,
                        trials=5, tol=1e-10, seed=3)
    if not res.equivalent:
        raise AssertionError(f"replaced pair not channel-equivalent: {res.worst_fidelity}")


def check_semantics(circuit: Circuit, descriptor: str) -> None:
    tokens = descriptor.split()
    kind = tokens[0]
    kv = _parse_kv(tokens[1:])
    if kind == "add":
        _check_add(circuit, kv, kv.get("samples", "all"))
    elif kind == "oop-add":
        _check_oop_add(circuit, kv, kv.get("samples", "8"))
    elif kind == "identity":
        res = channel_equiv(circuit, lambda v: v, trials=int(kv.get("trials", "5")),
                            tol=1e-10, seed=5)
        if not res.equivalent:
            raise AssertionError(f"not the identity channel: {res.worst_fidelity}")
    elif kind == "mcx":
        _check_mcx(circuit, int(kv["k"]))
    elif kind == "hamming":
        _check_hamming(circuit, int(kv["n"]))
    elif kind == "phase-gradient":
        _check_phase_gradient(circuit, int(kv["n"]))
    elif kind == "phase-oracle":
        _check_phase_oracle(circuit, descriptor.split(None, 1)[1])
    elif kind == "rewrite-canonical":
        _check_rewrite_canonical(circuit)
    else:
        raise AssertionError(f"unknown semantics descriptor {kind!r}")


@dataclass(frozen=True)
class GoldenResult:
    name: str
    ok: bool
    message: str


def check_goldens(corpus_dir: Path | str | None = None) -> list[GoldenResult]:
    """Verify every corpus entry; entries are independent and order-free."""
    corpus = Path(corpus_dir) if corpus_dir is not None else default_corpus_dir()
    results: list[GoldenResult] = []
    for spec in ENTRIES:
        entry_dir = corpus / spec.name
        try:
            stored = {f: (entry_dir / f).read_text() for f in
                      ("circuit.qc", "report.txt", "semantics.txt", "build_cmd.txt")}
            build_cmd = stored["build_cmd.txt"].strip()
            if build_cmd != "none":
                rebuilt = _cli_output(build_cmd)
                if rebuilt != stored["circuit.qc"]:
                    raise AssertionError("build command does not reproduce the stored circuit")
            circuit = require_valid(from_text(stored["circuit.qc"]))
            if to_text(circuit) != stored["circuit.qc"]:
                raise AssertionError("stored circuit is not in canonical form")
            report = serialize_report(count(circuit))
            if report != stored["report.txt"]:
                raise AssertionError(
                    f"report mismatch:\nstored:\n{stored['report.txt']}measured:\n{report}")
            check_semantics(circuit, stored["semantics.txt"].strip())
            results.append(GoldenResult(spec.name, True, "ok"))
        except Exception as exc:  # noqa: BLE001 - every failure becomes a listed mismatch
            results.append(GoldenResult(spec.name, False, str(exc)))
    return results


def write_corpus(corpus_dir: Path | str | None = None) -> None:
    """(Re)generate the corpus from the entry table."""
    corpus = Path(corpus_dir) if corpus_dir is not None else default_corpus_dir()
    for spec in ENTRIES:
        entry_dir = corpus / spec.name
        entry_dir.mkdir(parents=True, exist_ok=True)
        for fname, content in render_entry(spec).items():
            (entry_dir / fname).write_text(content)
