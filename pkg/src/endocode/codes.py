"""Linear block codes as parity-check null spaces, plus the concrete codes
used throughout: Hamming(7,4), the extended Golay code (24,12), and
polar/Reed-Muller codes of length 2^m.

Also holds coordinate permutations, the brute-force automorphism and
endomorphism-matrix oracles, overcomplete parity-check construction for
belief propagation, and the file formats (alist, dense text, permutation
lists).
"""

from __future__ import annotations

import warnings

import numpy as np

from . import gfmat
from .gfmat import FieldMatrix, FieldVector, ShapeError

ENUM_DIM_CAP = 20  # refuse to enumerate more than 2^20 codewords


class LinearCode:
    """Block code of length n and dimension k defined by a full-rank PCM.

    The generator is derived from the PCM unless supplied; either way
    h @ g^T = 0 and rank(g) = k are enforced.  Codes are immutable after
    construction (the codeword cache is filled lazily but idempotently).
    """

    def __init__(self, h: FieldMatrix, g: FieldMatrix | None = None, name: str = ""):
        r = gfmat.rank(h)
        if r != h.rows:
            raise ValueError(
                f"parity-check matrix must have full row rank: {h.rows} rows but rank {r}"
            )
        self.h = h
        self.n = h.cols
        self.k = h.cols - h.rows
        self.modulus = h.modulus
        self.name = name or f"code({self.n},{self.k})"
        if g is None:
            basis = gfmat.null_space_basis(h)
            g = FieldMatrix(np.vstack([v.arr for v in basis]), h.modulus)
        else:
            if g.rows != self.k or g.cols != self.n:
                raise ShapeError(f"generator must be {self.k}x{self.n}")
            if gfmat.rank(g) != self.k:
                raise ValueError("generator rows are linearly dependent")
        if ((h.arr @ g.arr.T) % h.modulus).any():
            raise ValueError("generator is not orthogonal to the parity-check matrix")
        self.g = g
        self._codewords: np.ndarray | None = None

    def __repr__(self):
        return f"<LinearCode {self.name} n={self.n} k={self.k} p={self.modulus}>"

    def encode(self, u) -> FieldVector:
        """Map an information vector of length k to its codeword."""
        ua = u.arr if isinstance(u, FieldVector) else np.asarray(u, dtype=np.int64)
        if ua.shape != (self.k,):
            raise ShapeError(f"information vector must have length {self.k}")
        return FieldVector((ua @ self.g.arr) % self.modulus, self.modulus)

    def syndrome(self, x) -> FieldVector:
        xa = x.arr if isinstance(x, FieldVector) else np.asarray(x, dtype=np.int64)
        if xa.shape != (self.n,):
            raise ShapeError(f"word must have length {self.n}")
        return FieldVector((self.h.arr @ xa) % self.modulus, self.modulus)

    def contains(self, x) -> bool:
        return self.syndrome(x).is_zero()

    def codewords(self) -> np.ndarray:
        """All p^k codewords as an array of shape (p^k, n); k is capped."""
        if self._codewords is None:
            self._codewords = _enumerate(self.g.arr, self.modulus)
        return self._codewords

    def min_distance(self) -> int:
        w = self.codewords().sum(axis=1)
        return int(w[w > 0].min())

    def weight_distribution(self) -> dict[int, int]:
        weights, counts = np.unique(self.codewords().sum(axis=1), return_counts=True)
        return {int(w): int(c) for w, c in zip(weights, counts)}


def _enumerate(g: np.ndarray, p: int) -> np.ndarray:
    k, n = g.shape
    if p**k > 2**ENUM_DIM_CAP:
        raise ValueError(f"refusing to enumerate {p}^{k} codewords (cap 2^{ENUM_DIM_CAP})")
    if p == 2:
        u = (np.arange(2**k, dtype=np.int64)[:, None] >> np.arange(k)) & 1
    else:
        grids = np.meshgrid(*([np.arange(p)] * k), indexing="ij")
        u = np.stack([gr.ravel() for gr in reversed(grids)], axis=1)
    return ((u @ g) % p).astype(np.uint8)


def code_from_pcm(h: FieldMatrix, name: str = "") -> LinearCode:
    """Build a code from a full-rank PCM; rejects rank-deficient input."""
    return LinearCode(h, name=name)


# ---------------------------------------------------------------------------
# permutations
# ---------------------------------------------------------------------------

class Permutation:
    """Coordinate permutation pi of {0..n-1}; acting on words by
    (x_pi)_i = x[pi(i)]."""

    __slots__ = ("image",)

    def __init__(self, image):
        img = np.asarray(image, dtype=np.int64)
        if img.ndim != 1 or not np.array_equal(np.sort(img), np.arange(len(img))):
            raise ValueError("permutation image must be a bijection of 0..n-1")
        img.setflags(write=False)
        object.__setattr__(self, "image", img)

    def __setattr__(self, name, value):
        raise AttributeError("Permutation is immutable")

    @property
    def n(self) -> int:
        return len(self.image)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(np.arange(n))

    def inverse(self) -> "Permutation":
        return Permutation(np.argsort(self.image))

    def compose(self, other: "Permutation") -> "Permutation":
        """Matrix-consistent composition: matrix(a.compose(b)) = matrix(a) @ matrix(b)."""
        if self.n != other.n:
            raise ShapeError("permutation length mismatch")
        return Permutation(other.image[self.image])

    def apply(self, x: FieldVector) -> FieldVector:
        return FieldVector(x.arr[self.image], x.modulus)

    def to_matrix(self, modulus: int = 2) -> FieldMatrix:
        m = np.zeros((self.n, self.n), dtype=np.int64)
        m[np.arange(self.n), self.image] = 1
        return FieldMatrix(m, modulus)

    def fixed_points(self) -> int:
        return int(np.count_nonzero(self.image == np.arange(self.n)))

    def __eq__(self, other):
        return isinstance(other, Permutation) and np.array_equal(self.image, other.image)

    def __hash__(self):
        return hash(self.image.tobytes())

    def __repr__(self):
        return f"Permutation({self.image.tolist()})"


def is_automorphism(code: LinearCode, perm: Permutation) -> bool:
    """Brute-force oracle: the permuted generator rows all stay codewords."""
    if perm.n != code.n:
        raise ShapeError(f"permutation length {perm.n} != code length {code.n}")
    permuted = code.g.arr[:, perm.image]
    return not ((code.h.arr @ permuted.T) % code.modulus).any()


def is_endomorphism_matrix(code: LinearCode, t: FieldMatrix) -> bool:
    """Brute-force oracle for x in C => T x in C, checked on a basis."""
    if t.rows != code.n or t.cols != code.n:
        raise ShapeError(f"transformation matrix must be {code.n}x{code.n}")
    images = (t.arr @ code.g.arr.T) % code.modulus
    return not ((code.h.arr @ images) % code.modulus).any()


# ---------------------------------------------------------------------------
# the three concrete codes
# ---------------------------------------------------------------------------

_HAMMING_H = [
    [1, 0, 1, 1, 1, 0, 0],
    [1, 1, 0, 1, 0, 1, 0],
    [0, 1, 1, 1, 0, 0, 1],
]


def hamming_7_4() -> LinearCode:
    """The (7,4) Hamming code used in all worked fixtures."""
    return LinearCode(FieldMatrix(_HAMMING_H, 2), name="hamming74")


# Generator polynomial of the length-23 binary quadratic-residue (Golay)
# code: x^11 + x^9 + x^7 + x^6 + x^5 + x + 1, coefficients low-order first.
_GOLAY_GEN = np.array([1, 1, 0, 0, 0, 1, 1, 1, 0, 1, 0, 1], dtype=np.int64)

GOLAY_INFINITY = 23  # coordinate index carrying the overall parity bit


def extended_golay() -> LinearCode:
    """Extended (24,12) Golay code over GF(2).

    Coordinates 0..22 are the cyclic (quadratic-residue) positions labeled by
    GF(23); coordinate 23 is the extension position (the label "infinity")
    holding overall parity.  Self-duality and minimum distance 8 are verified
    at construction.
    """
    rows = np.zeros((12, 24), dtype=np.int64)
    for i in range(12):
        for j, c in enumerate(_GOLAY_GEN):
            rows[i, (i + j) % 23] ^= c
        rows[i, GOLAY_INFINITY] = rows[i, :23].sum() % 2
    g = FieldMatrix(rows, 2)
    code = LinearCode(g, g, name="golay24")  # self-dual: the generator doubles as PCM
    if ((g.arr @ g.arr.T) % 2).any():
        raise RuntimeError("Golay construction self-check failed: not self-dual")
    if code.min_distance() != 8:
        raise RuntimeError(
            f"Golay construction self-check failed: d_min={code.min_distance()} != 8"
        )
    return code


def rm_frozen_set(r: int, m: int) -> frozenset[int]:
    """Frozen indices giving the Reed-Muller code RM(r, m) as a polar code."""
    return frozenset(i for i in range(2**m) if bin(i).count("1") < m - r)


class PolarCode(LinearCode):
    """Polar code of length 2^m with a recorded frozen set (needed by SC)."""

    def __init__(self, m: int, frozen, name: str = ""):
        n = 2**m
        frozen = frozenset(int(i) for i in frozen)
        if not frozen <= set(range(n)):
            raise ValueError(f"frozen indices must lie in 0..{n - 1}")
        k = n - len(frozen)
        kernel = np.array([[1, 0], [1, 1]], dtype=np.int64)
        full = np.array([[1]], dtype=np.int64)
        for _ in range(m):
            full = np.kron(full, kernel)
        info = sorted(set(range(n)) - frozen)
        g = FieldMatrix(full[info], 2)
        basis = gfmat.null_space_basis(g)
        h = FieldMatrix(np.vstack([v.arr for v in basis]), 2)
        super().__init__(h, g, name=name or f"polar({n},{k})")
        self.m = m
        self.frozen = frozen
        self.frozen_mask = np.zeros(n, dtype=bool)
        self.frozen_mask[sorted(frozen)] = True


def polar_code(m: int, frozen, requested_k: int | None = None, name: str = "") -> PolarCode:
    """Polar code from an explicit frozen set; flags a size mismatch early."""
    frozen = frozenset(int(i) for i in frozen)
    if requested_k is not None and len(frozen) != 2**m - requested_k:
        raise ValueError(
            f"frozen set of size {len(frozen)} does not give k={requested_k} "
            f"(need {2**m - requested_k} frozen indices)"
        )
    return PolarCode(m, frozen, name=name)


def polar_32_16() -> PolarCode:
    """The (32,16) polar code with the Reed-Muller RM(2,5) frozen set."""
    return polar_code(5, rm_frozen_set(2, 5), requested_k=16, name="polar(32,16)")


# ---------------------------------------------------------------------------
# overcomplete parity-check matrices for belief propagation
# ---------------------------------------------------------------------------

def overcomplete_pcm(code: LinearCode, max_rows: int | None = None) -> FieldMatrix:
    """All minimum-weight dual codewords as check rows (lexicographic order).

    Rows are truncated to max_rows; if the truncation no longer spans the
    dual space, the standard PCM is appended and a warning is issued so the
    null space is always exactly the code.
    """
    if code.h.rows > ENUM_DIM_CAP:
        raise ValueError("dual dimension too large for enumeration")
    dual = _enumerate(code.h.arr, code.modulus)
    w = dual.sum(axis=1)
    wmin = int(w[w > 0].min())
    rows = dual[w == wmin].astype(np.int64)
    order = np.lexsort(rows.T[::-1])  # lexicographic by leading coordinates
    rows = rows[order]
    if max_rows is not None:
        rows = rows[:max_rows]
    m = FieldMatrix(rows, code.modulus)
    if gfmat.rank(m) != code.n - code.k:
        warnings.warn(
            "overcomplete rows do not span the dual code; appending the standard PCM",
            stacklevel=2,
        )
        m = FieldMatrix(np.vstack([rows, code.h.arr]), code.modulus)
    return m


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------

def alist_write(m: FieldMatrix, path) -> None:
    """Write a binary PCM in the standard alist interchange layout."""
    if m.modulus != 2:
        raise ValueError("alist files are binary only")
    a = m.arr
    rows, cols = a.shape
    col_lists = [list(np.nonzero(a[:, j])[0] + 1) for j in range(cols)]
    row_lists = [list(np.nonzero(a[i, :])[0] + 1) for i in range(rows)]
    dmax_col = max((len(c) for c in col_lists), default=0)
    dmax_row = max((len(r) for r in row_lists), default=0)
    with open(path, "w") as f:
        f.write(f"{cols} {rows}\n")
        f.write(f"{dmax_col} {dmax_row}\n")
        f.write(" ".join(str(len(c)) for c in col_lists) + "\n")
        f.write(" ".join(str(len(r)) for r in row_lists) + "\n")
        for c in col_lists:
            f.write(" ".join(str(x) for x in c + [0] * (dmax_col - len(c))) + "\n")
        for r in row_lists:
            f.write(" ".join(str(x) for x in r + [0] * (dmax_row - len(r))) + "\n")


def alist_read(path) -> FieldMatrix:
    with open(path) as f:
        lines = f.read().splitlines()

    def ints(line_no: int) -> list[int]:
        if line_no >= len(lines):
            raise ValueError(f"{path}:{line_no + 1}: unexpected end of file")
        try:
            return [int(x) for x in lines[line_no].split()]
        except ValueError as exc:
            raise ValueError(f"{path}:{line_no + 1}: {exc}") from None

    head = ints(0)
    if len(head) != 2:
        raise ValueError(f"{path}:1: expected 'n m'")
    cols, rows = head
    col_deg = ints(2)
    if len(col_deg) != cols:
        raise ValueError(f"{path}:3: expected {cols} column degrees, got {len(col_deg)}")
    row_deg = ints(3)
    if len(row_deg) != rows:
        raise ValueError(f"{path}:4: expected {rows} row degrees, got {len(row_deg)}")
    a = np.zeros((rows, cols), dtype=np.int64)
    for j in range(cols):
        entries = [x for x in ints(4 + j) if x != 0]
        if len(entries) != col_deg[j]:
            raise ValueError(
                f"{path}:{5 + j}: column {j} lists {len(entries)} entries, expected {col_deg[j]}"
            )
        for x in entries:
            if not 1 <= x <= rows:
                raise ValueError(f"{path}:{5 + j}: row index {x} out of range 1..{rows}")
            a[x - 1, j] = 1
    return FieldMatrix(a, 2)


def perm_read(path) -> Permutation:
    """Permutation file: line 1 is n, line 2 the 0-indexed image list."""
    with open(path) as f:
        lines = f.read().splitlines()
    if not lines:
        raise ValueError(f"{path}:1: empty permutation file")
    try:
        n = int(lines[0].strip())
    except ValueError:
        raise ValueError(f"{path}:1: expected the permutation length") from None
    if len(lines) < 2:
        raise ValueError(f"{path}:2: missing image list")
    image = [int(x) for x in lines[1].split()]
    if len(image) != n:
        raise ValueError(f"{path}:2: expected {n} entries, got {len(image)}")
    try:
        return Permutation(image)
    except ValueError as exc:
        raise ValueError(f"{path}:2: {exc}") from None


# re-exported so callers can treat all file formats as one module surface
dense_read = gfmat.dense_read
dense_write = gfmat.dense_write
