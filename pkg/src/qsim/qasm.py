"""Text frontend: a subset of the OpenQASM 2.0 grammar.

Supported statements: the version header, one qreg, cregs, catalog gate
applications with angle expressions (float literals, pi, + - * /,
parentheses, unary sign), measure, and barrier (accepted, ignored).
Gate operands must be indexed (q[i]); measure also accepts the
whole-register form. cx/ccx/id are accepted as aliases of
cnot/toffoli/i and emitted on serialization.

The parser is total: any input yields either a Circuit or a ParseError
carrying line, column, and an error kind from {lexical, syntax,
unknown-gate, arity, range, expression}.
"""

from __future__ import annotations

import math

from .circuit import Circuit
from .errors import (
    ParseError,
    QsimError,
    QubitIndexError,
    SerializationError,
)
from .gates import CATALOG, GateSpec

_ALIAS = {"cx": "cnot", "ccx": "toffoli", "id": "i"}
_EMIT = {"cnot": "cx", "toffoli": "ccx", "i": "id"}

_SYMBOLS = {";", ",", "(", ")", "[", "]", "+", "-", "*", "/"}


class _Token:
    __slots__ = ("type", "value", "line", "col")

    def __init__(self, type_, value, line, col):
        self.type = type_
        self.value = value
        self.line = line
        self.col = col

    def __repr__(self):
        return f"_Token({self.type}, {self.value!r}, {self.line}:{self.col})"


def _describe(tok):
    if tok.type == "eof":
        return "end of input"
    return repr(tok.value)


def _tokenize(text):
    tokens = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "/" and i + 1 < n and text[i + 1] == "/":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch == "-" and i + 1 < n and text[i + 1] == ">":
            tokens.append(_Token("->", "->", line, col))
            i += 2
            col += 2
            continue
        if ch in _SYMBOLS:
            tokens.append(_Token(ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            is_real = False
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == ".":
                is_real = True
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    is_real = True
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            lexeme = text[i:j]
            if is_real:
                tokens.append(
                    _Token("real", float(lexeme), start_line, start_col)
                )
            else:
                tokens.append(
                    _Token("int", int(lexeme), start_line, start_col)
                )
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("id", text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        raise ParseError(
            f"unexpected character {ch!r}", line, col, kind="lexical"
        )
    tokens.append(_Token("eof", None, line, col))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.qreg = None  # (name, size)
        self.cregs = {}
        self.circuit = None

    # token plumbing ----------------------------------------------------
    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        if tok.type != "eof":
            self.pos += 1
        return tok

    def error(self, message, tok=None, kind="syntax"):
        tok = tok or self.peek()
        raise ParseError(message, tok.line, tok.col, kind=kind)

    def expect(self, type_, value=None, what=None):
        tok = self.peek()
        if tok.type != type_ or (value is not None and tok.value != value):
            wanted = what or (value if value is not None else type_)
            self.error(f"expected {wanted!r}, found {_describe(tok)}")
        return self.advance()

    # grammar -----------------------------------------------------------
    def parse(self):
        self.expect("id", "OPENQASM")
        version = self.peek()
        if version.type != "real" or version.value != 2.0:
            self.error(
                f"unsupported version {_describe(version)}, expected 2.0"
            )
        self.advance()
        self.expect(";")
        while self.peek().type != "eof":
            self.statement()
        if self.circuit is None:
            self.error("no quantum register declared")
        return self.circuit

    def statement(self):
        tok = self.peek()
        if tok.type != "id":
            self.error(f"expected a statement, found {_describe(tok)}")
        if tok.value == "qreg":
            self.qreg_decl()
        elif tok.value == "creg":
            self.creg_decl()
        elif tok.value == "measure":
            self.measure_stmt()
        elif tok.value == "barrier":
            self.barrier_stmt()
        else:
            self.gate_stmt()

    def reg_decl(self):
        self.advance()
        name = self.expect("id", what="register name")
        self.expect("[")
        size_tok = self.expect("int", what="register size")
        self.expect("]")
        self.expect(";")
        if size_tok.value < 1:
            self.error(
                f"register size must be >= 1, got {size_tok.value}",
                tok=size_tok,
                kind="range",
            )
        return name, size_tok

    def qreg_decl(self):
        tok = self.peek()
        name, size_tok = self.reg_decl()
        if self.qreg is not None:
            self.error(
                "multiple quantum registers are not supported", tok=tok
            )
        try:
            self.circuit = Circuit(size_tok.value)
        except QsimError as exc:
            self.error(str(exc), tok=size_tok, kind="range")
        self.qreg = (name.value, size_tok.value)

    def creg_decl(self):
        name, size_tok = self.reg_decl()
        self.cregs[name.value] = size_tok.value

    def require_qreg(self, tok):
        if self.qreg is None:
            self.error("no quantum register declared yet", tok=tok)

    def qubit_operand(self):
        name = self.expect("id", what="qubit operand")
        self.require_qreg(name)
        if name.value != self.qreg[0]:
            self.error(
                f"unknown quantum register {name.value!r}",
                tok=name,
                kind="range",
            )
        self.expect("[")
        idx = self.expect("int", what="qubit index")
        self.expect("]")
        if idx.value >= self.qreg[1]:
            self.error(
                f"qubit index {idx.value} out of range for "
                f"{self.qreg[0]}[{self.qreg[1]}]",
                tok=idx,
                kind="range",
            )
        return idx.value, idx

    def barrier_stmt(self):
        self.advance()
        while self.peek().type not in (";", "eof"):
            self.advance()
        self.expect(";")

    def measure_stmt(self):
        self.advance()
        src = self.expect("id", what="quantum register")
        self.require_qreg(src)
        if src.value != self.qreg[0]:
            self.error(
                f"unknown quantum register {src.value!r}",
                tok=src,
                kind="range",
            )
        if self.peek().type == "[":
            self.advance()
            q = self.expect("int", what="qubit index")
            self.expect("]")
            if q.value >= self.qreg[1]:
                self.error(
                    f"qubit index {q.value} out of range", tok=q, kind="range"
                )
            self.expect("->")
            dst = self.expect("id", what="classical register")
            self.expect("[")
            c = self.expect("int", what="classical index")
            self.expect("]")
            self.expect(";")
            self.check_creg(dst, c.value, c)
            self.add_measure((q.value,), q)
        else:
            self.expect("->")
            dst = self.expect("id", what="classical register")
            self.expect(";")
            size = self.check_creg(dst, None, dst)
            if size != self.qreg[1]:
                self.error(
                    f"register sizes differ: {self.qreg[0]}[{self.qreg[1]}] "
                    f"vs {dst.value}[{size}]",
                    tok=dst,
                    kind="range",
                )
            self.add_measure(range(self.qreg[1]), dst)

    def check_creg(self, name_tok, index, pos_tok):
        size = self.cregs.get(name_tok.value)
        if size is None:
            self.error(
                f"unknown classical register {name_tok.value!r}",
                tok=name_tok,
                kind="range",
            )
        if index is not None and index >= size:
            self.error(
                f"classical index {index} out of range for "
                f"{name_tok.value}[{size}]",
                tok=pos_tok,
                kind="range",
            )
        return size

    def add_measure(self, qubits, tok):
        try:
            self.circuit.measure(*qubits)
        except QubitIndexError as exc:
            self.error(str(exc), tok=tok, kind="range")

    def gate_stmt(self):
        name_tok = self.advance()
        name = _ALIAS.get(name_tok.value, name_tok.value)
        if name not in CATALOG:
            self.error(
                f"unknown gate {name_tok.value!r}",
                tok=name_tok,
                kind="unknown-gate",
            )
        n_targets, n_params, _ = CATALOG[name]
        params = []
        if self.peek().type == "(":
            self.advance()
            if self.peek().type != ")":
                params.append(self.expression())
                while self.peek().type == ",":
                    self.advance()
                    params.append(self.expression())
            self.expect(")")
        if len(params) != n_params:
            self.error(
                f"gate {name_tok.value!r} takes {n_params} angle(s), "
                f"got {len(params)}",
                tok=name_tok,
                kind="arity",
            )
        qubits = [self.qubit_operand()]
        while self.peek().type == ",":
            self.advance()
            qubits.append(self.qubit_operand())
        self.expect(";")
        if len(qubits) != n_targets:
            self.error(
                f"gate {name_tok.value!r} takes {n_targets} qubit(s), "
                f"got {len(qubits)}",
                tok=name_tok,
                kind="arity",
            )
        indices = tuple(q for q, _ in qubits)
        try:
            gate = GateSpec(name, indices, (), tuple(params))
        except QubitIndexError as exc:
            self.error(str(exc), tok=qubits[0][1], kind="range")
        self.circuit.add(gate)

    # angle expressions -------------------------------------------------
    def expression(self):
        value = self.term()
        while self.peek().type in ("+", "-"):
            op = self.advance().type
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.factor()
        while self.peek().type in ("*", "/"):
            op = self.advance()
            rhs = self.factor()
            if op.type == "/":
                if rhs == 0.0:
                    self.error("division by zero", tok=op, kind="expression")
                value = value / rhs
            else:
                value = value * rhs
        return value

    def factor(self):
        tok = self.peek()
        if tok.type in ("real", "int"):
            self.advance()
            return float(tok.value)
        if tok.type == "id" and tok.value == "pi":
            self.advance()
            return math.pi
        if tok.type == "(":
            self.advance()
            value = self.expression()
            self.expect(")")
            return value
        if tok.type == "+":
            self.advance()
            return self.factor()
        if tok.type == "-":
            self.advance()
            return -self.factor()
        self.error(
            f"expected an angle expression, found {_describe(tok)}",
            kind="expression",
        )


def parse(text):
    """Parse source text into a Circuit (measured qubits included)."""
    if not isinstance(text, str):
        raise ParseError("source must be text", 1, 1, kind="lexical")
    return _Parser(text).parse()


def _format_angle(value):
    if value != value or value in (float("inf"), float("-inf")):
        raise SerializationError(f"non-finite angle {value!r}")
    return repr(float(value))


def serialize(circuit):
    """Render a circuit back to source; parse(serialize(c)) reproduces
    the gate list (names, qubits, angles) and the measured qubits."""
    lines = ["OPENQASM 2.0;", f"qreg q[{circuit.n_qubits}];"]
    measured = list(circuit._measured)
    if measured:
        lines.append(f"creg c[{len(measured)}];")
    for g in circuit.queue:
        if g.name not in CATALOG:
            raise SerializationError(
                f"gate {g.name!r} has no textual form"
            )
        if g.controls:
            raise SerializationError(
                f"gate {g.name!r} with extra controls has no textual form"
            )
        name = _EMIT.get(g.name, g.name)
        angle = (
            "(" + ", ".join(_format_angle(p) for p in g.params) + ")"
            if g.params
            else ""
        )
        operands = ", ".join(f"q[{q}]" for q in g.targets)
        lines.append(f"{name}{angle} {operands};")
    for j, q in enumerate(measured):
        lines.append(f"measure q[{q}] -> c[{j}];")
    return "\n".join(lines) + "\n"
