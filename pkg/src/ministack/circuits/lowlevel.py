"""Line-oriented text form for NATIVE circuits.

Header, one field per line, fixed order (device line omitted when unknown):

    format ministack-native 1
    device sc20
    qubits 20
    clbits 2
    layout 0:3 1:5

then one op per line: gate name, parameters, operands. Qubits are written
as the physical wire prefixed with 'q', clbits with 'c'. Integer-valued
parameters print without a fractional part:

    prx 3.141592653589793 0 q3
    cz q3 q5
    measure q3 c0

'#' starts a comment; blank lines are ignored. parse_lowlevel(emit_lowlevel(c))
reproduces c exactly up to float round-trip (repr is exact, so: exactly).
"""
from __future__ import annotations

from .ir import GateOp, Level, LevelError, MEASURE, QuantumCircuit

FORMAT_NAME = "ministack-native"
FORMAT_VERSION = 1


class LowlevelParseError(ValueError):
    """Text does not conform to the native format; carries 1-based line."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _format_param(value: float) -> str:
    if value.is_integer() and abs(value) < 1e12:
        return str(int(value))
    return repr(value)


def emit_lowlevel(circuit: QuantumCircuit) -> str:
    """Serialize a NATIVE circuit. GENERIC circuits have no text form."""
    if circuit.level is not Level.NATIVE:
        raise ValueError("only NATIVE circuits can be emitted")
    lines = [f"format {FORMAT_NAME} {FORMAT_VERSION}"]
    if circuit.device_id is not None:
        lines.append(f"device {circuit.device_id}")
    lines.append(f"qubits {circuit.num_qubits}")
    lines.append(f"clbits {circuit.num_clbits}")
    assert circuit.layout is not None
    layout = " ".join(f"{l}:{p}" for l, p in sorted(circuit.layout.items()))
    lines.append(f"layout {layout}".rstrip())
    for op in circuit.ops:
        parts = [op.name]
        parts.extend(_format_param(p) for p in op.params)
        parts.extend(f"q{q}" for q in op.qubits)
        parts.extend(f"c{c}" for c in op.clbits)
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def _parse_index(token: str, prefix: str, lineno: int) -> int:
    if not token.startswith(prefix) or not token[len(prefix):].isdigit():
        raise LowlevelParseError(f"expected {prefix}<int> operand, got {token!r}", lineno)
    return int(token[len(prefix):])


def parse_lowlevel(text: str) -> QuantumCircuit:
    """Inverse of emit_lowlevel. Raises LowlevelParseError on malformed text."""
    lines = text.splitlines()
    fields: dict[str, str] = {}
    ops: list[GateOp] = []
    expect_header = True
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        key = tokens[0]
        if expect_header:
            if key == "format":
                if tokens[1:] != [FORMAT_NAME, str(FORMAT_VERSION)]:
                    raise LowlevelParseError(f"unsupported format {line!r}", lineno)
                fields["format"] = line
                continue
            if "format" not in fields:
                raise LowlevelParseError("first line must declare the format", lineno)
            if key in ("device", "qubits", "clbits"):
                if len(tokens) != 2 or key in fields:
                    raise LowlevelParseError(f"malformed {key} line", lineno)
                fields[key] = tokens[1]
                continue
            if key == "layout":
                if "layout" in fields:
                    raise LowlevelParseError("duplicate layout line", lineno)
                fields["layout"] = ""
                layout: dict[int, int] = {}
                for pair in tokens[1:]:
                    logical, sep, physical = pair.partition(":")
                    if not sep or not logical.isdigit() or not physical.isdigit():
                        raise LowlevelParseError(f"malformed layout entry {pair!r}", lineno)
                    if int(logical) in layout:
                        raise LowlevelParseError(f"duplicate layout key {logical}", lineno)
                    layout[int(logical)] = int(physical)
                expect_header = False
                continue
            raise LowlevelParseError(f"unexpected header line {key!r}", lineno)
        # op line
        params: list[float] = []
        qubits: list[int] = []
        clbits: list[int] = []
        for token in tokens[1:]:
            if token.startswith("q") and token[1:].isdigit():
                qubits.append(int(token[1:]))
            elif token.startswith("c") and token[1:].isdigit():
                clbits.append(int(token[1:]))
            else:
                if qubits or clbits:
                    raise LowlevelParseError("parameters must precede operands", lineno)
                try:
                    params.append(float(token))
                except ValueError:
                    raise LowlevelParseError(f"bad parameter {token!r}", lineno) from None
        if not qubits:
            raise LowlevelParseError("op line names no qubits", lineno)
        if clbits and key != MEASURE:
            raise LowlevelParseError(f"{key} takes no clbit operand", lineno)
        try:
            ops.append(GateOp(key, tuple(params), tuple(qubits), tuple(clbits)))
        except ValueError as exc:
            raise LowlevelParseError(str(exc), lineno) from None
    if expect_header:
        raise LowlevelParseError("missing layout line", len(lines) or 1)
    for key in ("qubits", "clbits"):
        if key not in fields or not fields[key].isdigit():
            raise LowlevelParseError(f"missing or malformed {key} header", 1)
    try:
        return QuantumCircuit(
            Level.NATIVE,
            int(fields["qubits"]),
            int(fields["clbits"]),
            tuple(ops),
            layout=layout,
            device_id=fields.get("device"),
        )
    except (ValueError, LevelError) as exc:  # IR validation errors carry no line
        raise LowlevelParseError(str(exc), len(lines) or 1) from None
