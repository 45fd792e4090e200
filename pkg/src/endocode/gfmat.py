"""Dense linear algebra over prime fields GF(p).

All matrices and vectors carry their modulus, a prime p <= 251, and store
residues in {0, ..., p-1}.  Values are immutable after construction, so they
can be shared freely between threads.  Elimination routines use deterministic
pivoting (leftmost column, topmost row), which makes every factorization
reproducible.

GF(2) gets a bit-packed elimination path (rows packed into uint64 words,
eliminations by XOR); the generic path works for any supported prime.  Both
paths produce identical results because the reduced row echelon form is
unique; the test suite cross-checks them anyway.
"""

from __future__ import annotations

import numpy as np


class ShapeError(ValueError):
    """Operand dimensions or moduli are incompatible."""


def _check_prime(p: int) -> None:
    if not isinstance(p, (int, np.integer)) or p < 2 or p > 251:
        raise ValueError(f"modulus must be a prime in [2, 251], got {p!r}")
    for d in range(2, int(p**0.5) + 1):
        if p % d == 0:
            raise ValueError(f"modulus {p} is not prime")


def _as_residues(data, modulus: int) -> np.ndarray:
    arr = np.array(data, dtype=np.int64)
    if arr.size and (arr.min() < 0 or arr.max() >= modulus):
        raise ValueError(f"entries must lie in [0, {modulus})")
    return arr


class FieldMatrix:
    """A rows x cols matrix over GF(modulus)."""

    __slots__ = ("arr", "modulus")

    def __init__(self, entries, modulus: int = 2):
        _check_prime(int(modulus))
        arr = _as_residues(entries, int(modulus))
        if arr.ndim != 2:
            raise ShapeError(f"expected a 2-D array, got ndim={arr.ndim}")
        arr.setflags(write=False)
        object.__setattr__(self, "arr", arr)
        object.__setattr__(self, "modulus", int(modulus))

    def __setattr__(self, name, value):  # immutable
        raise AttributeError("FieldMatrix is immutable")

    # -- basic structure ---------------------------------------------------

    @property
    def rows(self) -> int:
        return self.arr.shape[0]

    @property
    def cols(self) -> int:
        return self.arr.shape[1]

    @property
    def T(self) -> "FieldMatrix":
        return FieldMatrix(self.arr.T.copy(), self.modulus)

    @classmethod
    def identity(cls, n: int, modulus: int = 2) -> "FieldMatrix":
        return cls(np.eye(n, dtype=np.int64), modulus)

    @classmethod
    def zeros(cls, rows: int, cols: int, modulus: int = 2) -> "FieldMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), modulus)

    def block(self, r0: int, r1: int, c0: int, c1: int) -> "FieldMatrix":
        return FieldMatrix(self.arr[r0:r1, c0:c1].copy(), self.modulus)

    def row(self, i: int) -> "FieldVector":
        return FieldVector(self.arr[i].copy(), self.modulus)

    def col(self, j: int) -> "FieldVector":
        return FieldVector(self.arr[:, j].copy(), self.modulus)

    # -- arithmetic --------------------------------------------------------

    def __matmul__(self, other):
        if isinstance(other, FieldMatrix):
            return mat_mul(self, other)
        if isinstance(other, FieldVector):
            _require_same_modulus(self, other)
            if self.cols != len(other):
                raise ShapeError(f"{self.rows}x{self.cols} @ vector of length {len(other)}")
            return FieldVector((self.arr @ other.arr) % self.modulus, self.modulus)
        return NotImplemented

    def __add__(self, other):
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        _require_same_modulus(self, other)
        if self.arr.shape != other.arr.shape:
            raise ShapeError("matrix addition requires equal shapes")
        return FieldMatrix((self.arr + other.arr) % self.modulus, self.modulus)

    def __sub__(self, other):
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        _require_same_modulus(self, other)
        if self.arr.shape != other.arr.shape:
            raise ShapeError("matrix subtraction requires equal shapes")
        return FieldMatrix((self.arr - other.arr) % self.modulus, self.modulus)

    def __eq__(self, other):
        return (
            isinstance(other, FieldMatrix)
            and self.modulus == other.modulus
            and self.arr.shape == other.arr.shape
            and bool(np.array_equal(self.arr, other.arr))
        )

    def __hash__(self):
        return hash((self.modulus, self.arr.shape, self.arr.tobytes()))

    def __repr__(self):
        return f"FieldMatrix({self.arr.tolist()}, modulus={self.modulus})"

    def is_zero(self) -> bool:
        return not self.arr.any()


class FieldVector:
    """A length-n vector over GF(modulus)."""

    __slots__ = ("arr", "modulus")

    def __init__(self, entries, modulus: int = 2):
        _check_prime(int(modulus))
        arr = _as_residues(entries, int(modulus))
        if arr.ndim != 1:
            raise ShapeError(f"expected a 1-D array, got ndim={arr.ndim}")
        arr.setflags(write=False)
        object.__setattr__(self, "arr", arr)
        object.__setattr__(self, "modulus", int(modulus))

    def __setattr__(self, name, value):
        raise AttributeError("FieldVector is immutable")

    def __len__(self):
        return self.arr.shape[0]

    def __add__(self, other):
        if not isinstance(other, FieldVector):
            return NotImplemented
        _require_same_modulus(self, other)
        if len(self) != len(other):
            raise ShapeError("vector addition requires equal lengths")
        return FieldVector((self.arr + other.arr) % self.modulus, self.modulus)

    def __eq__(self, other):
        return (
            isinstance(other, FieldVector)
            and self.modulus == other.modulus
            and bool(np.array_equal(self.arr, other.arr))
        )

    def __hash__(self):
        return hash((self.modulus, self.arr.tobytes()))

    def __repr__(self):
        return f"FieldVector({self.arr.tolist()}, modulus={self.modulus})"

    def weight(self) -> int:
        return int(np.count_nonzero(self.arr))

    def is_zero(self) -> bool:
        return not self.arr.any()

    @classmethod
    def zeros(cls, n: int, modulus: int = 2) -> "FieldVector":
        return cls(np.zeros(n, dtype=np.int64), modulus)

    @classmethod
    def unit(cls, n: int, i: int, modulus: int = 2) -> "FieldVector":
        v = np.zeros(n, dtype=np.int64)
        v[i] = 1
        return cls(v, modulus)


def _require_same_modulus(a, b) -> None:
    if a.modulus != b.modulus:
        raise ShapeError(f"modulus mismatch: {a.modulus} vs {b.modulus}")


# ---------------------------------------------------------------------------
# products and reshaping
# ---------------------------------------------------------------------------

def mat_mul(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix:
    """Matrix product over the common field."""
    _require_same_modulus(a, b)
    if a.cols != b.rows:
        raise ShapeError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    return FieldMatrix((a.arr @ b.arr) % a.modulus, a.modulus)


def kron(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix:
    """Kronecker product a (x) b."""
    _require_same_modulus(a, b)
    return FieldMatrix(np.kron(a.arr, b.arr) % a.modulus, a.modulus)


def vec(m: FieldMatrix) -> FieldVector:
    """Stack the columns of m into one vector (column-major)."""
    return FieldVector(m.arr.flatten(order="F"), m.modulus)


def unvec(v: FieldVector, rows: int, cols: int) -> FieldMatrix:
    """Inverse of :func:`vec`: reshape a vector back into a rows x cols matrix."""
    if len(v) != rows * cols:
        raise ShapeError(f"cannot reshape length {len(v)} into {rows}x{cols}")
    return FieldMatrix(v.arr.reshape((cols, rows)).T.copy(), v.modulus)


def hstack(mats: list[FieldMatrix]) -> FieldMatrix:
    p = mats[0].modulus
    for m in mats[1:]:
        _require_same_modulus(mats[0], m)
    return FieldMatrix(np.hstack([m.arr for m in mats]), p)


def vstack(mats: list[FieldMatrix]) -> FieldMatrix:
    p = mats[0].modulus
    for m in mats[1:]:
        _require_same_modulus(mats[0], m)
    return FieldMatrix(np.vstack([m.arr for m in mats]), p)


# ---------------------------------------------------------------------------
# elimination engines
# ---------------------------------------------------------------------------

def _rref_generic(a: np.ndarray, p: int, n_pivot_cols: int | None = None):
    """Reduced row echelon form mod p with deterministic pivoting.

    Returns (rref, pivot_cols).  Pivot search runs over the first
    n_pivot_cols columns only; row operations apply to the full width, which
    lets callers carry an augmented block.
    """
    r = a.astype(np.int64, copy=True)
    m, n = r.shape
    if n_pivot_cols is None:
        n_pivot_cols = n
    pivots: list[int] = []
    row = 0
    for col in range(n_pivot_cols):
        if row >= m:
            break
        nz = np.nonzero(r[row:, col])[0]
        if nz.size == 0:
            continue
        piv = row + int(nz[0])
        if piv != row:
            r[[row, piv]] = r[[piv, row]]
        inv = pow(int(r[row, col]), p - 2, p)
        if inv != 1:
            r[row] = (r[row] * inv) % p
        others = np.nonzero(r[:, col])[0]
        others = others[others != row]
        if others.size:
            r[others] = (r[others] - np.outer(r[others, col], r[row])) % p
        pivots.append(col)
        row += 1
    return r, pivots


def _pack_gf2(a: np.ndarray) -> np.ndarray:
    m, n = a.shape
    words = (n + 63) // 64
    packed = np.zeros((m, words), dtype=np.uint64)
    cols = np.arange(n)
    for w in range(words):
        sel = (cols >> 6) == w
        bits = a[:, sel].astype(np.uint64)
        shifts = (cols[sel] & 63).astype(np.uint64)
        packed[:, w] = (bits << shifts).sum(axis=1, dtype=np.uint64)
    return packed


def _unpack_gf2(packed: np.ndarray, n: int) -> np.ndarray:
    m = packed.shape[0]
    out = np.zeros((m, n), dtype=np.int64)
    cols = np.arange(n)
    out[:] = (packed[:, cols >> 6] >> (cols & 63).astype(np.uint64)) & np.uint64(1)
    return out


def _rref_gf2_packed(a: np.ndarray, n_pivot_cols: int | None = None):
    """Bit-packed GF(2) RREF; same pivot rule and results as the generic path."""
    m, n = a.shape
    if n_pivot_cols is None:
        n_pivot_cols = n
    rows = _pack_gf2(a)
    pivots: list[int] = []
    row = 0
    for col in range(n_pivot_cols):
        if row >= m:
            break
        w, s = col >> 6, np.uint64(col & 63)
        bits = (rows[row:, w] >> s) & np.uint64(1)
        nz = np.nonzero(bits)[0]
        if nz.size == 0:
            continue
        piv = row + int(nz[0])
        if piv != row:
            rows[[row, piv]] = rows[[piv, row]]
        hit = np.nonzero((rows[:, w] >> s) & np.uint64(1))[0]
        hit = hit[hit != row]
        if hit.size:
            rows[hit] ^= rows[row]
        pivots.append(col)
        row += 1
    return _unpack_gf2(rows, n), pivots


def _rref(a: np.ndarray, p: int, n_pivot_cols: int | None = None):
    if p == 2:
        return _rref_gf2_packed(a % 2, n_pivot_cols)
    return _rref_generic(a % p, p, n_pivot_cols)


# ---------------------------------------------------------------------------
# rank / inverse / null space
# ---------------------------------------------------------------------------

def rank(m: FieldMatrix) -> int:
    """Row rank over GF(p); 0 for the zero matrix."""
    _, pivots = _rref(m.arr, m.modulus)
    return len(pivots)


def inverse(m: FieldMatrix) -> FieldMatrix | None:
    """Inverse of a square matrix, or None when the matrix is singular."""
    if m.rows != m.cols:
        raise ShapeError(f"inverse requires a square matrix, got {m.rows}x{m.cols}")
    n = m.rows
    aug = np.hstack([m.arr, np.eye(n, dtype=np.int64)])
    red, pivots = _rref(aug, m.modulus, n_pivot_cols=n)
    if len(pivots) < n:
        return None
    return FieldMatrix(red[:, n:], m.modulus)


def null_space_basis(m: FieldMatrix) -> list[FieldVector]:
    """Basis of {v : m v = 0}, one vector per free column, in free-column order."""
    red, pivots = _rref(m.arr, m.modulus)
    p = m.modulus
    n = m.cols
    pivot_set = set(pivots)
    basis = []
    for free in range(n):
        if free in pivot_set:
            continue
        v = np.zeros(n, dtype=np.int64)
        v[free] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-red[i, free]) % p
        basis.append(FieldVector(v, p))
    return basis


def rref_with_ops(m: FieldMatrix) -> tuple[FieldMatrix, FieldMatrix]:
    """Return (r, ops) with ops invertible and ops @ m = r, r in RREF."""
    aug = np.hstack([m.arr, np.eye(m.rows, dtype=np.int64)])
    red, _ = _rref(aug, m.modulus, n_pivot_cols=m.cols)
    return (
        FieldMatrix(red[:, : m.cols], m.modulus),
        FieldMatrix(red[:, m.cols :], m.modulus),
    )


# ---------------------------------------------------------------------------
# the two Gaussian-elimination variants used by the reconstruction algorithm
# ---------------------------------------------------------------------------

def is_m_form(m: FieldMatrix) -> bool:
    """Lower triangular, zero diagonal forces a zero column, nonzero columns
    carry a unit diagonal entry."""
    a = m.arr
    if m.rows != m.cols:
        return False
    if np.triu(a, 1).any():
        return False
    d = np.diagonal(a)
    for j in range(m.cols):
        if d[j] == 0:
            if a[:, j].any():
                return False
        elif d[j] != 1:
            return False
    return True


def column_m_form(e: FieldMatrix) -> tuple[FieldMatrix, FieldMatrix]:
    """Column-reduce a square matrix into M-form.

    Returns (eprime, gr) with gr invertible and eprime = e @ gr.  The column
    echelon step mirrors RREF on the transpose; a final column permutation
    parks each surviving column at the index of its topmost nonzero entry and
    the zero columns everywhere else, which is exactly the M-form layout.
    """
    if e.rows != e.cols:
        raise ShapeError(f"column_m_form requires a square matrix, got {e.rows}x{e.cols}")
    k = e.rows
    p = e.modulus
    red_t, ops = rref_with_ops(e.T)          # ops @ e^T = rref
    rcef = red_t.arr.T                        # e @ ops^T, reduced column echelon
    _, pivots = _rref(e.T.arr, p)             # leading-row index of column i is pivots[i]
    perm = np.zeros((k, k), dtype=np.int64)
    used = set()
    for i, lead_row in enumerate(pivots):
        perm[i, lead_row] = 1
        used.add(lead_row)
    free_positions = [j for j in range(k) if j not in used]
    for t, j in enumerate(free_positions):
        perm[len(pivots) + t, j] = 1
    gr = mat_mul(ops.T, FieldMatrix(perm, p))
    eprime = FieldMatrix((rcef @ perm) % p, p)
    assert eprime == mat_mul(e, gr)
    return eprime, gr


def row_diagonalize(eprime: FieldMatrix) -> tuple[FieldMatrix, FieldMatrix]:
    """Row-reduce an M-form matrix to the 0/1 diagonal of its column pattern.

    Returns (lam, gl) with gl invertible, gl @ eprime = lam, and
    lam = diag(1 if eprime[j][j] != 0 else 0).
    """
    if not is_m_form(eprime):
        raise ValueError("row_diagonalize requires an M-form input (see column_m_form)")
    k = eprime.rows
    p = eprime.modulus
    work = eprime.arr.copy()
    gl = np.eye(k, dtype=np.int64)
    for c in range(k):
        if work[c, c] == 0:
            continue
        for r in range(c + 1, k):
            f = work[r, c]
            if f:
                work[r] = (work[r] - f * work[c]) % p
                gl[r] = (gl[r] - f * gl[c]) % p
    lam = FieldMatrix(work, p)
    expected = np.diag((np.diagonal(eprime.arr) != 0).astype(np.int64))
    assert np.array_equal(lam.arr, expected)
    return lam, FieldMatrix(gl, p)


# ---------------------------------------------------------------------------
# dense text format: "rows cols modulus" header, then one line per row
# ---------------------------------------------------------------------------

def dense_write(m: FieldMatrix, path) -> None:
    with open(path, "w") as f:
        f.write(dense_dumps(m))


def dense_dumps(m: FieldMatrix) -> str:
    lines = [f"{m.rows} {m.cols} {m.modulus}"]
    for i in range(m.rows):
        lines.append(" ".join(str(int(x)) for x in m.arr[i]))
    return "\n".join(lines) + "\n"


def dense_read(path) -> FieldMatrix:
    with open(path) as f:
        return dense_loads(f.read(), name=str(path))


def dense_loads(text: str, name: str = "<string>") -> FieldMatrix:
    lines = [ln for ln in text.splitlines()]
    if not lines:
        raise ValueError(f"{name}:1: empty dense matrix file")
    head = lines[0].split()
    if len(head) != 3:
        raise ValueError(f"{name}:1: expected 'rows cols modulus'")
    rows, cols, modulus = (int(x) for x in head)
    data = np.zeros((rows, cols), dtype=np.int64)
    for i in range(rows):
        if i + 1 >= len(lines):
            raise ValueError(f"{name}:{i + 2}: missing row {i}")
        parts = lines[i + 1].split()
        if len(parts) != cols:
            raise ValueError(f"{name}:{i + 2}: expected {cols} entries, got {len(parts)}")
        data[i] = [int(x) for x in parts]
    return FieldMatrix(data, modulus)
