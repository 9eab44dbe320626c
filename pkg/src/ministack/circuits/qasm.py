"""Parser for the circuit exchange format, a strict OpenQASM 2.0 subset.

Grammar (statements end with ';', whitespace and // comments are free):

    program   : "OPENQASM 2.0;" include? statement*
    include   : 'include "qelib1.inc";'
    statement : qreg | creg | gate | measure | barrier
    qreg      : "qreg" ID "[" INT "]" ";"
    creg      : "creg" ID "[" INT "]" ";"
    gate      : GATE ("(" angle ("," angle)* ")")? operand ("," operand)* ";"
    measure   : "measure" operand "->" operand ";"
    barrier   : "barrier" (operand ("," operand)*)? ";"
    operand   : ID "[" INT "]" | ID            (bare ID = whole register)
    angle     : SIGN? (NUMBER | NUMBER "*" "pi" | "pi" ("/" NUMBER)?
                | NUMBER "*" "pi" "/" NUMBER)

GATE is one of the generic set (id x y z h s sdg t tdg rx ry rz cx cz swap).
Gate declarations, expressions beyond pi multiples, and classical control are
out of the subset. Multiple registers are flattened in declaration order.
"""
from __future__ import annotations

import math
import re

from .ir import BARRIER, GENERIC_GATES, GateOp, Level, MEASURE, QuantumCircuit


class CircuitSyntaxError(Exception):
    """Source text failed to parse; carries 1-based line and column."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class UnsupportedGateError(CircuitSyntaxError):
    """Gate token exists in QASM dialects but is outside the generic set."""


class RegisterIndexError(IndexError):
    """Operand index exceeds the declared register size."""


_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>//[^\n]*)
      | (?P<number>(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?)
      | (?P<id>[a-zA-Z_][a-zA-Z0-9_]*)
      | (?P<string>"[^"\n]*")
      | (?P<arrow>->)
      | (?P<sym>[\[\](),;*/+-])
    """,
    re.VERBOSE,
)


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind: str, text: str, line: int, col: int):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise CircuitSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        lexeme = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, lexeme, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.next()
        if tok.text != text:
            got = repr(tok.text) if tok.text else "end of input"
            raise CircuitSyntaxError(f"expected {text!r}, got {got}", tok.line, tok.col)
        return tok

    def expect_kind(self, kind: str, what: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            got = repr(tok.text) if tok.text else "end of input"
            raise CircuitSyntaxError(f"expected {what}, got {got}", tok.line, tok.col)
        return tok

    # angle : SIGN? (NUMBER ('*' 'pi' ('/' NUMBER)?)? | 'pi' ('/' NUMBER)?)
    def parse_angle(self) -> float:
        sign = 1.0
        while self.peek().text in ("+", "-"):
            if self.next().text == "-":
                sign = -sign
        tok = self.next()
        if tok.kind == "number":
            value = float(tok.text)
            if self.peek().text == "*":
                self.next()
                pi_tok = self.next()
                if pi_tok.text != "pi":
                    raise CircuitSyntaxError("only multiples of pi are supported",
                                             pi_tok.line, pi_tok.col)
                value *= math.pi
                value = self._maybe_divide(value)
        elif tok.text == "pi":
            value = math.pi
            value = self._maybe_divide(value)
        else:
            raise CircuitSyntaxError(f"expected angle, got {tok.text!r}", tok.line, tok.col)
        return sign * value

    def _maybe_divide(self, value: float) -> float:
        if self.peek().text == "/":
            self.next()
            den = self.expect_kind("number", "divisor")
            d = float(den.text)
            if d == 0.0:
                raise CircuitSyntaxError("division by zero", den.line, den.col)
            value /= d
        return value


def parse_circuit(text: str) -> QuantumCircuit:
    """Parse exchange-format source into a GENERIC circuit.

    Register declarations fix the qubit/clbit counts; op order follows source
    order. Raises CircuitSyntaxError, UnsupportedGateError, or
    RegisterIndexError.
    """
    p = _Parser(text)
    tok = p.expect_kind("id", "OPENQASM header")
    if tok.text != "OPENQASM":
        raise CircuitSyntaxError("file must start with 'OPENQASM 2.0;'", tok.line, tok.col)
    ver = p.expect_kind("number", "version")
    if ver.text != "2.0":
        raise CircuitSyntaxError(f"unsupported version {ver.text}", ver.line, ver.col)
    p.expect(";")
    if p.peek().text == "include":
        p.next()
        inc = p.expect_kind("string", "include file")
        if inc.text != '"qelib1.inc"':
            raise CircuitSyntaxError(f"unsupported include {inc.text}", inc.line, inc.col)
        p.expect(";")

    qregs: dict[str, tuple[int, int]] = {}  # name -> (offset, size)
    cregs: dict[str, tuple[int, int]] = {}
    num_qubits = 0
    num_clbits = 0
    ops: list[GateOp] = []

    def operand(regs: dict[str, tuple[int, int]], what: str) -> list[int]:
        tok = p.expect_kind("id", f"{what} register")
        if tok.text not in regs:
            raise CircuitSyntaxError(f"undeclared {what} register {tok.text!r}", tok.line, tok.col)
        offset, size = regs[tok.text]
        if p.peek().text == "[":
            p.next()
            idx_tok = p.expect_kind("number", "index")
            if "." in idx_tok.text or "e" in idx_tok.text.lower():
                raise CircuitSyntaxError("index must be an integer", idx_tok.line, idx_tok.col)
            idx = int(idx_tok.text)
            p.expect("]")
            if idx >= size:
                raise RegisterIndexError(
                    f"line {idx_tok.line}: index {idx} out of range for {tok.text}[{size}]")
            return [offset + idx]
        return list(range(offset, offset + size))

    while p.peek().kind != "eof":
        tok = p.next()
        if tok.kind != "id":
            raise CircuitSyntaxError(f"expected statement, got {tok.text!r}", tok.line, tok.col)
        name = tok.text
        if name in ("qreg", "creg"):
            reg_tok = p.expect_kind("id", "register name")
            p.expect("[")
            size_tok = p.expect_kind("number", "register size")
            p.expect("]")
            p.expect(";")
            size = int(size_tok.text)
            regs = qregs if name == "qreg" else cregs
            if reg_tok.text in qregs or reg_tok.text in cregs:
                raise CircuitSyntaxError(f"register {reg_tok.text!r} already declared",
                                         reg_tok.line, reg_tok.col)
            if name == "qreg":
                regs[reg_tok.text] = (num_qubits, size)
                num_qubits += size
            else:
                regs[reg_tok.text] = (num_clbits, size)
                num_clbits += size
        elif name == MEASURE:
            src = operand(qregs, "quantum")
            p.expect("->")
            dst = operand(cregs, "classical")
            p.expect(";")
            if len(src) != len(dst):
                raise CircuitSyntaxError("measure operands must have equal width",
                                         tok.line, tok.col)
            for q, c in zip(src, dst):
                ops.append(GateOp(MEASURE, (), (q,), (c,)))
        elif name == BARRIER:
            qubits: list[int] = []
            if p.peek().text != ";":
                qubits.extend(operand(qregs, "quantum"))
                while p.peek().text == ",":
                    p.next()
                    qubits.extend(operand(qregs, "quantum"))
            p.expect(";")
            if not qubits:
                qubits = list(range(num_qubits))
            ops.append(GateOp(BARRIER, (), tuple(qubits)))
        elif name in GENERIC_GATES:
            nq, npar = GENERIC_GATES[name]
            params: list[float] = []
            if p.peek().text == "(":
                p.next()
                params.append(p.parse_angle())
                while p.peek().text == ",":
                    p.next()
                    params.append(p.parse_angle())
                p.expect(")")
            if len(params) != npar:
                raise CircuitSyntaxError(
                    f"{name} takes {npar} parameter(s), got {len(params)}", tok.line, tok.col)
            targets = operand(qregs, "quantum")
            while p.peek().text == ",":
                p.next()
                targets.extend(operand(qregs, "quantum"))
            p.expect(";")
            if nq == 1 and len(targets) > 1:
                # whole-register form broadcasts one-qubit gates
                ops.extend(GateOp(name, tuple(params), (q,)) for q in targets)
            elif len(targets) != nq:
                raise CircuitSyntaxError(
                    f"{name} takes {nq} qubit(s), got {len(targets)}", tok.line, tok.col)
            else:
                ops.append(GateOp(name, tuple(params), tuple(targets)))
        else:
            raise UnsupportedGateError(f"unsupported gate or statement {name!r}",
                                       tok.line, tok.col)

    return QuantumCircuit(Level.GENERIC, num_qubits, num_clbits, tuple(ops))
