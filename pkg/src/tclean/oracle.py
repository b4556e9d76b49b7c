"""Boolean expressions compiled to compute/Z/uncompute phase oracles.

Grammar: variables ``x<k>``, operators ``& | ^ !``, parentheses, with
precedence ``!`` > ``&`` > ``^`` > ``|``.  Every binary AND/OR node costs one
temporary logical-AND (4 T); XOR and NOT are free.  The uncomputation half of
the oracle is T-free, so the whole oracle costs half of what the same tree
costs when each conjunction is a textbook-paired Toffoli pair.

Negations are normalized down to the leaves and realized as CNOT+X copies so
that, in the macro-Toffoli build, every Toffoli pair still satisfies the
rewriter's conservative replacement conditions.
"""
from __future__ import annotations

from dataclasses import dataclass

from .ir import Circuit, CircuitBuilder
from .gadgets import and_compute, emit_inverse

MAX_VARIABLES = 12


class OracleParseError(Exception):
    """PARSE_ERROR: the expression does not match the oracle grammar."""

    def __init__(self, position: int, message: str):
        self.position = position
        super().__init__(f"column {position}: {message}")


class TooManyVariablesError(Exception):
    """TOO_MANY_VARIABLES: more than MAX_VARIABLES distinct inputs."""


# -- AST -----------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Not:
    child: "Node"


@dataclass(frozen=True)
class And:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Or:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Xor:
    left: "Node"
    right: "Node"


Node = Var | Not | And | Or | Xor


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self._skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch: str) -> None:
        if self.peek() != ch:
            raise OracleParseError(self.pos + 1, f"expected {ch!r}")
        self.pos += 1

    def parse(self) -> Node:
        node = self.or_expr()
        if self.peek():
            raise OracleParseError(self.pos + 1, f"unexpected {self.peek()!r}")
        return node

    def or_expr(self) -> Node:
        node = self.xor_expr()
        while self.peek() == "|":
            self.take("|")
            node = Or(node, self.xor_expr())
        return node

    def xor_expr(self) -> Node:
        node = self.and_expr()
        while self.peek() == "^":
            self.take("^")
            node = Xor(node, self.and_expr())
        return node

    def and_expr(self) -> Node:
        node = self.unary()
        while self.peek() == "&":
            self.take("&")
            node = And(node, self.unary())
        return node

    def unary(self) -> Node:
        ch = self.peek()
        if ch == "!":
            self.take("!")
            return Not(self.unary())
        if ch == "(":
            self.take("(")
            node = self.or_expr()
            self.take(")")
            return node
        if ch == "x":
            self.pos += 1
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if self.pos == start:
                raise OracleParseError(start + 1, "variable needs an index, like x0")
            return Var(int(self.text[start:self.pos]))
        raise OracleParseError(self.pos + 1, f"unexpected {ch!r}" if ch else "unexpected end of input")


def parse_expression(text: str) -> Node:
    return _Parser(text).parse()


def evaluate(node: Node, assignment: int) -> bool:
    """Classical reference semantics; bit k of `assignment` is x<k>."""
    if isinstance(node, Var):
        return bool((assignment >> node.index) & 1)
    if isinstance(node, Not):
        return not evaluate(node.child, assignment)
    if isinstance(node, And):
        return evaluate(node.left, assignment) and evaluate(node.right, assignment)
    if isinstance(node, Or):
        return evaluate(node.left, assignment) or evaluate(node.right, assignment)
    return evaluate(node.left, assignment) != evaluate(node.right, assignment)


def variables(node: Node) -> set[int]:
    if isinstance(node, Var):
        return {node.index}
    if isinstance(node, Not):
        return variables(node.child)
    return variables(node.left) | variables(node.right)


def binary_node_count(node: Node) -> int:
    """Number of AND/OR nodes: the oracle's T-count is 4x this."""
    if isinstance(node, (And, Or)):
        return 1 + binary_node_count(node.left) + binary_node_count(node.right)
    if isinstance(node, Xor):
        return binary_node_count(node.left) + binary_node_count(node.right)
    if isinstance(node, Not):
        return binary_node_count(node.child)
    return 0


# -- normalization: push NOT to the leaves ------------------------------------------


@dataclass(frozen=True)
class _Leaf:
    index: int
    negated: bool


def _normalize(node: Node, flip: bool = False):
    if isinstance(node, Var):
        return _Leaf(node.index, flip)
    if isinstance(node, Not):
        return _normalize(node.child, not flip)
    if isinstance(node, Xor):
        return Xor(_normalize(node.left, flip), _normalize(node.right, False))
    if isinstance(node, And):
        kind = Or if flip else And
        return kind(_normalize(node.left, flip), _normalize(node.right, flip))
    kind = And if flip else Or
    return kind(_normalize(node.left, flip), _normalize(node.right, flip))


# -- compilation ---------------------------------------------------------------------


@dataclass(frozen=True)
class _Wire:
    qubit: int
    inverted: bool  # logical value = qubit bit XOR inverted


def _emit_conjunction(b: CircuitBuilder, q1: int, q2: int, impl: str) -> int:
    if impl == "and":
        return and_compute(b, q1, q2)
    t = b.alloc0()
    b.ccx(q1, q2, t)
    return t


def _materialize(b: CircuitBuilder, wire: _Wire, want_inverted: bool,
                 avoid: set[int]) -> int:
    """A qubit whose bit equals the wire's value (or its negation).

    Copies through a fresh ancilla when polarity needs flipping or the direct
    qubit collides with the other operand; the copy is CNOT+X only, so it
    never writes inside any Toffoli pair and costs no T gates.
    """
    if wire.inverted == want_inverted and wire.qubit not in avoid:
        return wire.qubit
    c = b.alloc0()
    b.cx(wire.qubit, c)
    if wire.inverted != want_inverted:
        b.x(c)
    return c


def _emit_node(b: CircuitBuilder, node, x: tuple[int, ...], impl: str) -> _Wire:
    if isinstance(node, _Leaf):
        return _Wire(x[node.index], node.negated)
    if isinstance(node, Xor):
        wl = _emit_node(b, node.left, x, impl)
        wr = _emit_node(b, node.right, x, impl)
        z = b.alloc0()
        b.cx(wl.qubit, z)
        b.cx(wr.qubit, z)
        return _Wire(z, wl.inverted != wr.inverted)
    want = isinstance(node, Or)  # OR stores NOT(l) AND NOT(r), output inverted
    wl = _emit_node(b, node.left, x, impl)
    wr = _emit_node(b, node.right, x, impl)
    q1 = _materialize(b, wl, want, avoid=set())
    q2 = _materialize(b, wr, want, avoid={q1})
    return _Wire(_emit_conjunction(b, q1, q2, impl), want)


def compile_oracle(expr: str, impl: str = "and") -> Circuit:
    """Phase oracle |x> -> (-1)^f(x) |x> for the parsed expression.

    ``impl="and"`` (the default) builds conjunctions from temporary ANDs;
    ``impl="ccx"`` emits macro Toffolis instead, giving the baseline whose
    paired lowering costs exactly twice as much.
    """
    if impl not in ("and", "ccx"):
        raise ValueError(f"unknown oracle implementation {impl!r}")
    ast = parse_expression(expr)
    n_vars = max(variables(ast)) + 1
    if n_vars > MAX_VARIABLES:
        raise TooManyVariablesError(f"{n_vars} variables exceeds the bound {MAX_VARIABLES}")
    root = _normalize(ast)

    b = CircuitBuilder()
    x = b.register("x", n_vars)
    mark = b.mark()
    wire = _emit_node(b, root, x, impl)
    fragment = b.fragment_since(mark)

    if isinstance(root, (_Leaf, Xor)):
        # The wire is no Toffoli-pair target: phase it directly.
        if wire.inverted:
            b.x(wire.qubit)
            b.z(wire.qubit)
            b.x(wire.qubit)
        else:
            b.z(wire.qubit)
    else:
        # Kick the phase off a copy so the pair target is only ever read.
        out = b.alloc0()
        b.cx(wire.qubit, out)
        if wire.inverted:
            b.x(out)
        b.z(out)
        if wire.inverted:
            b.x(out)
        b.cx(wire.qubit, out)
        b.release(out)

    emit_inverse(b, *fragment)
    return b.build()
