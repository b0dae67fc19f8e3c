"""Plain-text file formats for matrices, sign vectors, and configurations.

Matrix format: first line is "n"; each following line stores one entry as
"i j value" (or "i j re im" for complex data) with 1-based indices, i <= j,
in decimal or scientific notation.  Unlisted entries are zero and the
matrix is completed by symmetry (conjugate symmetry for complex files).

Sign vector format: first line "n", then n lines of +1 / -1 (or "re im"
unit-modulus pairs for complex sign vectors).

Configuration format: first line "n r", then n rows of r values (2r for
complex data, interleaved re im).
"""

from __future__ import annotations

import numpy as np

from .core import SignVector, SphereConfig, SymmetricCost


def _tokens(path):
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if body:
                yield lineno, body.split()


def write_matrix(path, C: SymmetricCost) -> None:
    """Write the upper triangle (including diagonal) of C; zeros omitted."""
    M = C.entries
    n = C.n
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{n}\n")
        for i in range(n):
            for j in range(i, n):
                v = M[i, j]
                if v == 0:
                    continue
                if C.is_complex:
                    fh.write(f"{i + 1} {j + 1} {float(v.real)!r} {float(v.imag)!r}\n")
                else:
                    fh.write(f"{i + 1} {j + 1} {float(v)!r}\n")


def read_matrix(path) -> SymmetricCost:
    """Read a matrix file; entry lines decide real vs complex by arity."""
    it = _tokens(path)
    try:
        _, head = next(it)
    except StopIteration:
        raise ValueError(f"{path}: empty matrix file") from None
    n = int(head[0])
    if n <= 0:
        raise ValueError(f"{path}: matrix size must be positive, got {n}")
    entries = []
    is_complex = False
    for lineno, tok in it:
        if len(tok) == 3:
            i, j, v = int(tok[0]), int(tok[1]), complex(float(tok[2]), 0.0)
        elif len(tok) == 4:
            i, j, v = int(tok[0]), int(tok[1]), complex(float(tok[2]), float(tok[3]))
            is_complex = True
        else:
            raise ValueError(f"{path}:{lineno}: expected 'i j value' or 'i j re im'")
        if not (1 <= i <= j <= n):
            raise ValueError(f"{path}:{lineno}: indices must satisfy 1 <= i <= j <= n")
        entries.append((i - 1, j - 1, v))
    M = np.zeros((n, n), dtype=np.complex128 if is_complex else np.float64)
    for i, j, v in entries:
        M[i, j] = v if is_complex else v.real
        M[j, i] = np.conj(v) if is_complex else v.real
    if is_complex and np.abs(M.diagonal().imag).max(initial=0.0) > 0:
        raise ValueError(f"{path}: diagonal entries of a Hermitian matrix must be real")
    return SymmetricCost.from_array(M)


def write_signs(path, z: SignVector) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{z.n}\n")
        for v in z.signs:
            if z.is_complex:
                fh.write(f"{float(v.real)!r} {float(v.imag)!r}\n")
            else:
                fh.write(f"{int(v):+d}\n")


def read_signs(path) -> SignVector:
    it = _tokens(path)
    try:
        _, head = next(it)
    except StopIteration:
        raise ValueError(f"{path}: empty sign file") from None
    n = int(head[0])
    vals = []
    is_complex = False
    for lineno, tok in it:
        if len(tok) == 1:
            vals.append(float(tok[0]))
        elif len(tok) == 2:
            vals.append(complex(float(tok[0]), float(tok[1])))
            is_complex = True
        else:
            raise ValueError(f"{path}:{lineno}: expected '+1/-1' or 're im'")
    if len(vals) != n:
        raise ValueError(f"{path}: expected {n} sign entries, found {len(vals)}")
    arr = np.asarray(vals, dtype=np.complex128 if is_complex else np.float64)
    return SignVector(signs=arr, is_complex=is_complex)


def write_config(path, Y: SphereConfig) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{Y.n} {Y.r}\n")
        for row in Y.rows:
            if Y.is_complex:
                flat = [f"{float(v.real)!r} {float(v.imag)!r}" for v in row]
            else:
                flat = [f"{float(v)!r}" for v in row]
            fh.write(" ".join(flat) + "\n")


def read_config(path) -> SphereConfig:
    it = _tokens(path)
    try:
        _, head = next(it)
    except StopIteration:
        raise ValueError(f"{path}: empty configuration file") from None
    n, r = int(head[0]), int(head[1])
    rows = []
    for lineno, tok in it:
        if len(tok) == r:
            rows.append([float(t) for t in tok])
        elif len(tok) == 2 * r:
            vals = [float(t) for t in tok]
            rows.append([complex(vals[2 * a], vals[2 * a + 1]) for a in range(r)])
        else:
            raise ValueError(f"{path}:{lineno}: expected {r} (or {2 * r}) values per row")
    if len(rows) != n:
        raise ValueError(f"{path}: expected {n} rows, found {len(rows)}")
    return SphereConfig(rows=np.asarray(rows))
