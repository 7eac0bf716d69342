"""Matrix Market I/O for dense complex matrices (array and coordinate
formats; general, symmetric, and hermitian symmetries).

Values are written with repr's shortest round-trip representation (at most 17
significant digits), so write -> read -> write reproduces the file byte for
byte. Parse failures name the offending line.
"""

from __future__ import annotations

import numpy as np

__all__ = ["MatrixMarketError", "read_matrix", "write_matrix"]

_FORMATS = {"array", "coordinate"}
_FIELDS = {"real", "complex", "integer"}
_SYMMETRIES = {"general", "symmetric", "hermitian", "skew-symmetric"}


class MatrixMarketError(ValueError):
    def __init__(self, path, lineno, message):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = str(path)
        self.lineno = lineno


def _fmt(x: float) -> str:
    return repr(float(x))


def read_matrix(path) -> np.ndarray:
    """Read a Matrix Market file into a dense complex ndarray.

    Symmetric and hermitian files store the lower triangle only and are
    expanded; real and integer fields are promoted to complex.
    """
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise MatrixMarketError(path, 1, "empty file")
    head = lines[0].split()
    if len(head) != 5 or head[0] != "%%MatrixMarket" or head[1].lower() != "matrix":
        raise MatrixMarketError(path, 1, f"malformed header: {lines[0]!r}")
    fmt, field, sym = head[2].lower(), head[3].lower(), head[4].lower()
    if fmt not in _FORMATS:
        raise MatrixMarketError(path, 1, f"unsupported format {fmt!r}")
    if field not in _FIELDS:
        raise MatrixMarketError(path, 1, f"unsupported field {field!r}")
    if sym not in _SYMMETRIES or sym == "skew-symmetric":
        raise MatrixMarketError(path, 1, f"unsupported symmetry {sym!r}")
    per_entry = 2 if field == "complex" else 1
    lineno = 1
    for lineno in range(2, len(lines) + 1):
        if not lines[lineno - 1].startswith("%") and lines[lineno - 1].strip():
            break
    size_parts = lines[lineno - 1].split()
    want = 3 if fmt == "coordinate" else 2
    if len(size_parts) != want:
        raise MatrixMarketError(path, lineno, f"size line needs {want} integers: {lines[lineno - 1]!r}")
    try:
        dims = [int(p) for p in size_parts]
    except ValueError:
        raise MatrixMarketError(path, lineno, f"non-integer size entry: {lines[lineno - 1]!r}") from None
    rows, cols = dims[0], dims[1]
    out = np.zeros((rows, cols), dtype=complex)
    data_lines = [
        (i + 1, ln) for i, ln in enumerate(lines) if i + 1 > lineno and ln.strip() and not ln.startswith("%")
    ]
    if fmt == "array":
        expected = rows * cols if sym == "general" else sum(rows - j for j in range(cols))
        if len(data_lines) != expected:
            raise MatrixMarketError(path, len(lines), f"expected {expected} entries, found {len(data_lines)}")
        pos = 0
        cols_iter = (
            ((i, j) for j in range(cols) for i in range(rows))
            if sym == "general"
            else ((i, j) for j in range(cols) for i in range(j, rows))
        )
        for i, j in cols_iter:
            ln_no, ln = data_lines[pos]
            pos += 1
            parts = ln.split()
            if len(parts) != per_entry:
                raise MatrixMarketError(path, ln_no, f"expected {per_entry} value(s): {ln!r}")
            try:
                val = complex(float(parts[0]), float(parts[1]) if per_entry == 2 else 0.0)
            except ValueError:
                raise MatrixMarketError(path, ln_no, f"bad number: {ln!r}") from None
            out[i, j] = val
            if sym != "general" and i != j:
                out[j, i] = val.conjugate() if sym == "hermitian" else val
    else:
        if len(data_lines) != dims[2]:
            raise MatrixMarketError(path, len(lines), f"expected {dims[2]} entries, found {len(data_lines)}")
        for ln_no, ln in data_lines:
            parts = ln.split()
            if len(parts) != 2 + per_entry:
                raise MatrixMarketError(path, ln_no, f"expected 'i j value': {ln!r}")
            try:
                i, j = int(parts[0]) - 1, int(parts[1]) - 1
                val = complex(float(parts[2]), float(parts[3]) if per_entry == 2 else 0.0)
            except ValueError:
                raise MatrixMarketError(path, ln_no, f"bad entry: {ln!r}") from None
            if not (0 <= i < rows and 0 <= j < cols):
                raise MatrixMarketError(path, ln_no, f"index ({i + 1}, {j + 1}) outside {rows}x{cols}")
            if sym != "general" and i < j:
                raise MatrixMarketError(path, ln_no, "upper-triangle entry in a symmetry-flagged file")
            out[i, j] = val
            if sym != "general" and i != j:
                out[j, i] = val.conjugate() if sym == "hermitian" else val
    return out


def _detect_symmetry(a: np.ndarray) -> str:
    if a.shape[0] != a.shape[1]:
        return "general"
    if np.array_equal(a, a.conj().T):
        return "hermitian" if np.any(a.imag) else "symmetric"
    return "general"


def write_matrix(path, matrix, symmetry: str = "auto", fmt: str = "array",
                 comment: str | None = None) -> None:
    """Write a dense matrix; symmetry="auto" detects hermitian/symmetric
    structure (exact entry equality) and stores the lower triangle only."""
    a = np.asarray(matrix)
    if fmt not in _FORMATS:
        raise ValueError(f"unsupported format {fmt!r}")
    complex_field = np.iscomplexobj(a) and np.any(np.asarray(a, dtype=complex).imag)
    a = np.asarray(a, dtype=complex)
    if symmetry == "auto":
        symmetry = _detect_symmetry(a)
    if symmetry not in ("general", "symmetric", "hermitian"):
        raise ValueError(f"unsupported symmetry {symmetry!r}")
    field = "complex" if complex_field or symmetry == "hermitian" else "real"
    rows, cols = a.shape
    lines = [f"%%MatrixMarket matrix {fmt} {field} {symmetry}"]
    if comment:
        for c in comment.splitlines():
            lines.append(f"%{c}")
    if symmetry == "general":
        entries = [(i, j) for j in range(cols) for i in range(rows)]
    else:
        entries = [(i, j) for j in range(cols) for i in range(j, rows)]
    if fmt == "array":
        lines.append(f"{rows} {cols}")
        for i, j in entries:
            v = a[i, j]
            lines.append(f"{_fmt(v.real)} {_fmt(v.imag)}" if field == "complex" else _fmt(v.real))
    else:
        nonzero = [(i, j) for i, j in entries if a[i, j] != 0]
        lines.append(f"{rows} {cols} {len(nonzero)}")
        for i, j in nonzero:
            v = a[i, j]
            val = f"{_fmt(v.real)} {_fmt(v.imag)}" if field == "complex" else _fmt(v.real)
            lines.append(f"{i + 1} {j + 1} {val}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
