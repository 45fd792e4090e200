"""Endomorphisms of linear block codes.

A transformation matrix T is an endomorphism of a code C exactly when the
conjugated matrix Z = A^-1 T A has an all-zero upper-right (n-k) x k block,
where A is a code characterization matrix (CCM) satisfying H A = [I | 0].
This module builds endomorphisms from Z-blocks or raw matrices, computes the
reconstruction matrix that inverts an endomorphism on its image together with
the null-space basis spanning each coset, maps transformation matrices to the
codewords of a larger linear code via vec/Kronecker identities, superposes
automorphisms into proper endomorphisms, and searches for endomorphisms with
prescribed weight over permutation and rank deficiency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import codes as codes_mod
from . import gfmat
from .codes import LinearCode, Permutation, PolarCode, is_automorphism, is_endomorphism_matrix
from .gfmat import FieldMatrix, FieldVector, ShapeError

DEFAULT_ATTEMPT_BUDGET = 1_000_000


class NotEndomorphismError(ValueError):
    """Raised when a matrix does not map the code into itself.

    Carries the offending nonzero upper-right block of A^-1 T A.
    """

    def __init__(self, block: FieldMatrix):
        super().__init__("matrix is not a code endomorphism (nonzero upper-right block)")
        self.offending_block = block


class Ccm:
    """Code characterization matrix A with H A = [I | 0] and its partitions.

    omega1/omega2 are the first n-k and last k rows of A^-1; a1/a2 the first
    n-k and last k columns of A.  The columns of a2 form a basis of the code.
    """

    def __init__(self, code: LinearCode, a: FieldMatrix):
        n, k = code.n, code.k
        if a.rows != n or a.cols != n:
            raise ShapeError(f"CCM must be {n}x{n}")
        a_inv = gfmat.inverse(a)
        if a_inv is None:
            raise ValueError("CCM must be invertible")
        prod = (code.h.arr @ a.arr) % code.modulus
        target = np.hstack([np.eye(n - k, dtype=np.int64), np.zeros((n - k, k), dtype=np.int64)])
        if not np.array_equal(prod, target):
            raise ValueError("H A != [I | 0]: not a CCM for this code")
        self.code = code
        self.a = a
        self.a_inv = a_inv
        self.omega1 = a_inv.block(0, n - k, 0, n)
        self.omega2 = a_inv.block(n - k, n, 0, n)
        self.a1 = a.block(0, n, 0, n - k)
        self.a2 = a.block(0, n, n - k, n)
        if self.omega1 != code.h:
            raise AssertionError("CCM invariant violated: omega1 != H")
        if ((code.h.arr @ self.a2.arr) % code.modulus).any():
            raise AssertionError("CCM invariant violated: a2 columns are not codewords")


_CCM_CACHE: dict[int, tuple[LinearCode, Ccm]] = {}


def compute_ccm(code: LinearCode) -> Ccm:
    """Deterministic CCM via recorded column elimination of the PCM."""
    key = id(code)
    hit = _CCM_CACHE.get(key)
    if hit is not None and hit[0] is code:
        return hit[1]
    _, ops = gfmat.rref_with_ops(code.h.T)  # ops @ H^T = [I; 0]
    ccm = Ccm(code, ops.T)
    _CCM_CACHE[key] = (code, ccm)
    return ccm


class Endomorphism:
    """A verified code endomorphism: T together with Z = A^-1 T A, the k x k
    block E_T, rank deficiency s = k - rank(E_T), and weight over permutation
    delta = sum(T) - n."""

    def __init__(self, code: LinearCode, t: FieldMatrix, z: FieldMatrix):
        n, k = code.n, code.k
        self.code = code
        self.t = t
        self.z = z
        self.e_t = z.block(n - k, n, n - k, n)
        self.s = k - gfmat.rank(self.e_t)
        self.delta = int(t.arr.sum()) - n

    def __repr__(self):
        return f"<Endomorphism of {self.code.name} s={self.s} delta={self.delta}>"


def endo_from_z(ccm: Ccm, c_blk: FieldMatrix, d_blk: FieldMatrix, e_blk: FieldMatrix) -> Endomorphism:
    """Assemble Z from its blocks and return the endomorphism T = A Z A^-1."""
    code = ccm.code
    n, k = code.n, code.k
    p = code.modulus
    if c_blk.arr.shape != (n - k, n - k):
        raise ShapeError(f"C block must be {n - k}x{n - k}")
    if d_blk.arr.shape != (k, n - k):
        raise ShapeError(f"D block must be {k}x{n - k}")
    if e_blk.arr.shape != (k, k):
        raise ShapeError(f"E block must be {k}x{k}")
    z = np.zeros((n, n), dtype=np.int64)
    z[: n - k, : n - k] = c_blk.arr
    z[n - k :, : n - k] = d_blk.arr
    z[n - k :, n - k :] = e_blk.arr
    zm = FieldMatrix(z, p)
    t = gfmat.mat_mul(gfmat.mat_mul(ccm.a, zm), ccm.a_inv)
    return Endomorphism(code, t, zm)


def endo_from_matrix(ccm: Ccm, t: FieldMatrix) -> Endomorphism:
    """Accept T iff the upper-right block of A^-1 T A (= omega1 T a2) is zero."""
    code = ccm.code
    n, k = code.n, code.k
    if t.rows != n or t.cols != n:
        raise ShapeError(f"transformation matrix must be {n}x{n}")
    z = gfmat.mat_mul(gfmat.mat_mul(ccm.a_inv, t), ccm.a)
    upper_right = z.block(0, n - k, n - k, n)
    if not upper_right.is_zero():
        raise NotEndomorphismError(upper_right)
    return Endomorphism(code, t, z)


def endo_from_permutation(ccm: Ccm, perm: Permutation) -> Endomorphism:
    return endo_from_matrix(ccm, perm.to_matrix(ccm.code.modulus))


class Reconstruction:
    """Reconstruction matrix R plus the coset machinery of an endomorphism.

    r inverts T on Im(tau) up to the coset spanned by null_basis; im_check is
    a matrix whose null space is exactly Im(tau), used to discard decoding
    estimates that T cannot have produced.  gr/gl/lam/j_set document the
    factorization when R was computed here; they are None for instances
    re-loaded from a bundle file, which stores only (T, R, null_basis,
    im_check).
    """

    def __init__(
        self,
        endo: Endomorphism,
        r: FieldMatrix,
        null_basis: list[FieldVector],
        im_check: FieldMatrix,
        gr: FieldMatrix | None = None,
        gl: FieldMatrix | None = None,
        lam: FieldMatrix | None = None,
        j_set: tuple[int, ...] | None = None,
    ):
        self.endo = endo
        self.r = r
        self.null_basis = null_basis
        self.im_check = im_check
        self.gr = gr
        self.gl = gl
        self.lam = lam
        self.j_set = j_set
        self._offsets: np.ndarray | None = None

    def coset_offsets(self) -> np.ndarray:
        """All p^s combinations of the null basis, in base-p counting order
        (coefficient of null_basis[0] varies fastest)."""
        if self._offsets is None:
            p = self.endo.code.modulus
            s = self.endo.s
            n = self.endo.code.n
            offsets = np.zeros((p**s, n), dtype=np.int64)
            for idx in range(p**s):
                rem = idx
                acc = np.zeros(n, dtype=np.int64)
                for j in range(s):
                    coeff = rem % p
                    rem //= p
                    if coeff:
                        acc += coeff * self.null_basis[j].arr
                offsets[idx] = acc % p
            offsets.setflags(write=False)
            self._offsets = offsets
        return self._offsets


def _in_span(vectors: list[FieldVector], v: FieldVector) -> bool:
    if not vectors:
        return v.is_zero()
    stack = np.vstack([w.arr for w in vectors])
    base_rank = gfmat.rank(FieldMatrix(stack, v.modulus))
    ext_rank = gfmat.rank(FieldMatrix(np.vstack([stack, v.arr]), v.modulus))
    return ext_rank == base_rank


def reconstruction(
    ccm: Ccm,
    endo: Endomorphism,
    gr: FieldMatrix | None = None,
    gl: FieldMatrix | None = None,
) -> Reconstruction:
    """Build R = A [[0,0],[0, G_r G_l]] A^-1 and the coset basis {A eps_j}.

    The two elimination matrices are computed from E_T unless injected (the
    worked fixture injects the published ones).  The construction verifies
    R T x + x in span(null_basis) on a basis of the code and aborts on any
    failure, which would indicate an algebra bug.
    """
    code = ccm.code
    if endo.code is not code:
        raise ValueError("endomorphism does not belong to the CCM's code")
    n, k = code.n, code.k
    p = code.modulus
    if gr is None:
        eprime, gr = gfmat.column_m_form(endo.e_t)
    else:
        eprime = gfmat.mat_mul(endo.e_t, gr)
        if not gfmat.is_m_form(eprime):
            raise ValueError("injected G_r does not bring E_T into M-form")
    if gl is None:
        lam, gl = gfmat.row_diagonalize(eprime)
    else:
        lam = gfmat.mat_mul(gl, eprime)
        expected = np.diag((np.diagonal(eprime.arr) != 0).astype(np.int64))
        if not np.array_equal(lam.arr, expected):
            raise ValueError("injected G_l does not diagonalize E_T G_r")

    j_set = tuple(j for j in range(k) if lam.arr[j, j] == 0)
    if len(j_set) != endo.s:
        raise RuntimeError(f"|J| = {len(j_set)} does not match rank deficiency s = {endo.s}")

    null_basis = []
    for j in j_set:
        eps = np.zeros(n, dtype=np.int64)
        eps[n - k :] = gr.arr[:, j]
        null_basis.append(FieldVector((ccm.a.arr @ eps) % p, p))

    e_r = gfmat.mat_mul(gr, gl)
    z_r = np.zeros((n, n), dtype=np.int64)
    z_r[n - k :, n - k :] = e_r.arr
    r = gfmat.mat_mul(gfmat.mat_mul(ccm.a, FieldMatrix(z_r, p)), ccm.a_inv)

    # columns T A eps_j for j outside J span Im(tau); its left null space
    # tests membership of decoding estimates in the image
    im_cols = np.zeros((n, k - endo.s), dtype=np.int64)
    for idx, j in enumerate(j for j in range(k) if j not in j_set):
        eps = np.zeros(n, dtype=np.int64)
        eps[n - k :] = gr.arr[:, j]
        im_cols[:, idx] = (endo.t.arr @ ((ccm.a.arr @ eps) % p)) % p
    left_null = gfmat.null_space_basis(FieldMatrix(im_cols.T, p))
    im_check = FieldMatrix(
        np.vstack([v.arr for v in left_null]) if left_null else np.zeros((0, n), dtype=np.int64),
        p,
    )

    for v in null_basis:
        if not code.contains(v) or ((endo.t.arr @ v.arr) % p).any():
            raise RuntimeError("null-basis verification failed")
    if null_basis:
        stack = FieldMatrix(np.vstack([v.arr for v in null_basis]), p)
        if gfmat.rank(stack) != endo.s:
            raise RuntimeError("null-basis vectors are not linearly independent")
    for i in range(k):
        x = code.g.arr[i]
        v = FieldVector((r.arr @ ((endo.t.arr @ x) % p) + x) % p, p)
        if not _in_span(null_basis, v):
            raise RuntimeError("reconstruction verification failed: R T x not in [x]_tau")
        if ((im_check.arr @ ((endo.t.arr @ x) % p)) % p).any():
            raise RuntimeError("image-membership matrix rejects an image of the code")
    if gfmat.rank(im_check) != n - (k - endo.s):
        raise RuntimeError("image-membership matrix has the wrong rank")

    return Reconstruction(endo, r, null_basis, im_check, gr=gr, gl=gl, lam=lam, j_set=j_set)


def coset_expand(rec: Reconstruction, x_hat: FieldVector) -> list[FieldVector]:
    """All p^s codewords that the endomorphism maps onto the image of x_hat:
    R x_hat plus every combination of the null basis."""
    p = rec.endo.code.modulus
    base = (rec.r.arr @ x_hat.arr) % p
    return [FieldVector((base + off) % p, p) for off in rec.coset_offsets()]


# ---------------------------------------------------------------------------
# the endomorphism code: vectorized transformation matrices
# ---------------------------------------------------------------------------

def endo_code_pcm(ccm: Ccm) -> FieldMatrix:
    """PCM a2^T (x) omega1 of the code of vectorized endomorphism matrices."""
    return gfmat.kron(ccm.a2.T, ccm.omega1)


def endo_from_vec(ccm: Ccm, v: FieldVector) -> Endomorphism:
    n = ccm.code.n
    if len(v) != n * n:
        raise ShapeError(f"vectorized matrix must have length {n * n}")
    return endo_from_matrix(ccm, gfmat.unvec(v, n, n))


# ---------------------------------------------------------------------------
# superposition of automorphisms
# ---------------------------------------------------------------------------

def _as_automorphism_matrix(code: LinearCode, x) -> FieldMatrix:
    if isinstance(x, Permutation):
        if not is_automorphism(code, x):
            raise ValueError("permutation is not an automorphism of the code")
        return x.to_matrix(code.modulus)
    if isinstance(x, FieldMatrix):
        endo = endo_from_matrix(compute_ccm(code), x)
        if endo.s != 0:
            raise ValueError(f"matrix has rank deficiency {endo.s}; not bijective on the code")
        return x
    raise TypeError(f"expected Permutation or FieldMatrix, got {type(x).__name__}")


def superpose(code: LinearCode, p1, p2) -> Endomorphism:
    """Sum of two automorphism transformation matrices, as an endomorphism."""
    m1 = _as_automorphism_matrix(code, p1)
    m2 = _as_automorphism_matrix(code, p2)
    return endo_from_matrix(compute_ccm(code), m1 + m2)


# ---------------------------------------------------------------------------
# automorphism sources
# ---------------------------------------------------------------------------

def lta_sample(m: int, rng) -> Permutation:
    """Random lower-triangular affine permutation of {0..2^m-1}.

    Draws unit-diagonal lower-triangular A and offset b over GF(2) and maps
    index i to int(A bits(i) + b), bit 0 being the least significant.  This
    bit order is the one under which successive cancellation decoding
    commutes with the permutation.
    """
    rng = np.random.default_rng(rng)
    a = np.eye(m, dtype=np.int64)
    for i in range(1, m):
        a[i, :i] = rng.integers(0, 2, i)
    b = rng.integers(0, 2, m)
    return _affine_permutation(a, b)


def _affine_permutation(a: np.ndarray, b: np.ndarray) -> Permutation:
    m = a.shape[0]
    n = 2**m
    bits = (np.arange(n)[:, None] >> np.arange(m)) & 1      # row i = bits of i, LSB first
    y = (bits @ a.T + b) % 2
    image = (y << np.arange(m)).sum(axis=1)
    return Permutation(image)


def golay_cyclic_shift() -> Permutation:
    """The label map x -> x+1 on GF(23), parity coordinate fixed."""
    image = [(i + 1) % 23 for i in range(23)] + [codes_mod.GOLAY_INFINITY]
    return Permutation(image)


def golay_inversion() -> Permutation:
    """The label map x -> -1/x on the projective line over GF(23)."""
    image = np.zeros(24, dtype=np.int64)
    for label in range(1, 23):
        image[label] = (-pow(label, 21, 23)) % 23
    image[0] = codes_mod.GOLAY_INFINITY
    image[codes_mod.GOLAY_INFINITY] = 0
    return Permutation(image)


def octad_involutions(code: LinearCode, octad: FieldVector | None = None) -> list[Permutation]:
    """Involutions fixing a weight-8 codeword's support pointwise.

    The codewords vanishing on the octad, punctured to the 16 remaining
    coordinates, form a 5-dimensional code whose coordinate functionals embed
    those 16 points into a 4-dimensional affine flat; its 15 nonzero
    translations lift to code automorphisms of cycle type 1^8 2^8.  Every
    candidate is verified against the automorphism oracle before being
    returned.
    """
    cw = code.codewords()
    if octad is None:
        w = cw.sum(axis=1)
        eights = cw[w == 8]
        if not eights.size:
            raise ValueError("code has no weight-8 codewords")
        octad_arr = eights[np.lexsort(eights.T[::-1])][0]
    else:
        octad_arr = octad.arr
        if int(octad_arr.sum()) != 8:
            raise ValueError("octad must be a weight-8 codeword")
    on = np.nonzero(octad_arr)[0]
    off = np.nonzero(octad_arr == 0)[0]
    vanishing = cw[(cw[:, on].sum(axis=1) == 0)][:, off]
    sub = FieldMatrix(vanishing.astype(np.int64), code.modulus)
    red, _ = gfmat.rref_with_ops(sub)
    dim = gfmat.rank(sub)
    phi = red.arr[:dim].T  # each of the 16 points -> its functional values
    lookup = {tuple(r): i for i, r in enumerate(phi)}
    if len(lookup) != len(off):
        raise ValueError("restricted code does not separate the points off the octad")
    base = phi[0]
    out = []
    for row in phi:
        d = row ^ base
        if not d.any():
            continue
        image = np.arange(code.n)
        ok = True
        for local, r in enumerate(phi):
            tgt = lookup.get(tuple(r ^ d))
            if tgt is None:
                ok = False
                break
            image[off[local]] = off[tgt]
        if not ok:
            continue
        perm = Permutation(image)
        if is_automorphism(code, perm):
            out.append(perm)
    if not out:
        raise RuntimeError("octad translation construction produced no automorphisms")
    return out


def golay_generators(code: LinearCode) -> list[Permutation]:
    """Verified automorphism generators for the extended Golay code: the two
    projective-line maps plus the translation involutions of one octad (the
    latter are needed to reach superpositions with small weight over
    permutation, since projective maps fix at most two coordinates)."""
    gens = [golay_cyclic_shift(), golay_inversion()] + octad_involutions(code)
    for perm in gens:
        if not is_automorphism(code, perm):
            raise RuntimeError("shipped Golay generator failed verification")
    return gens


def hamming74_automorphism(code: LinearCode, rng) -> Permutation:
    """Random automorphism of the (7,4) Hamming code from an invertible 3x3
    binary matrix acting on the parity-check columns."""
    rng = np.random.default_rng(rng)
    h = code.h.arr
    col_index = {tuple(h[:, j]): j for j in range(code.n)}
    while True:
        m = rng.integers(0, 2, (3, 3))
        if gfmat.rank(FieldMatrix(m.astype(np.int64), 2)) == 3:
            break
    image = np.array([col_index[tuple((m @ h[:, j]) % 2)] for j in range(code.n)])
    return Permutation(image)


def _word_sampler(generators: list[Permutation], rng):
    alphabet = list(generators) + [g.inverse() for g in generators]
    n = generators[0].n

    def draw() -> Permutation:
        length = int(rng.integers(4, 25))
        perm = Permutation.identity(n)
        for _ in range(length):
            perm = perm.compose(alphabet[int(rng.integers(len(alphabet)))])
        return perm

    return draw


def automorphism_sampler(code: LinearCode, source: str, rng):
    """Return a zero-argument callable drawing verified automorphisms."""
    if source == "lta":
        if not isinstance(code, PolarCode):
            raise ValueError("the lta source requires a polar code")

        def draw_lta() -> Permutation:
            perm = lta_sample(code.m, rng)
            if not is_automorphism(code, perm):
                raise RuntimeError("LTA permutation failed verification (bit-order regression)")
            return perm

        return draw_lta
    if source == "superpose":
        if isinstance(code, PolarCode):
            return automorphism_sampler(code, "lta", rng)
        if code.name == "golay24":
            return _word_sampler(golay_generators(code), rng)
        if code.name == "hamming74":
            return lambda: hamming74_automorphism(code, rng)
        raise ValueError(f"no automorphism source known for {code.name}")
    raise ValueError(f"unknown automorphism source {source!r}")


# ---------------------------------------------------------------------------
# endomorphism search
# ---------------------------------------------------------------------------

@dataclass
class SampleResult:
    endomorphisms: list[Endomorphism]
    attempts: int
    exhausted: bool
    warnings: list[str] = field(default_factory=list)


def sample_endomorphisms(
    code: LinearCode,
    source: str = "superpose",
    delta_max: int | None = None,
    s_min: int = 1,
    s_max: int | None = None,
    count: int = 1,
    seed: int = 0,
    max_attempts: int = DEFAULT_ATTEMPT_BUDGET,
) -> SampleResult:
    """Search endomorphisms with delta <= delta_max and s_min <= s <= s_max.

    Sources: "superpose" pairs random automorphisms of the code and keeps
    sums in the target class; "lta" does the same over lower-triangular
    affine permutations (polar codes); "ce-sample" draws random codewords of
    the endomorphism code.  With s_max = 0 the sampler returns single
    automorphisms instead of superpositions (ensemble paths for plain
    automorphism decoding).  Deterministic for a fixed seed; returns the
    number of attempts, and a partial list with a warning when the attempt
    budget runs out.
    """
    rng = np.random.default_rng(seed)
    ccm = compute_ccm(code)
    if s_max is None:
        s_max = code.k - 1
    found: list[Endomorphism] = []
    seen: set[bytes] = set()
    attempts = 0

    def keep(endo: Endomorphism) -> None:
        key = endo.t.arr.tobytes()
        if key in seen:
            return
        if delta_max is not None and endo.delta > delta_max:
            return
        if not s_min <= endo.s <= s_max:
            return
        seen.add(key)
        found.append(endo)

    if source == "ce-sample":
        basis = gfmat.null_space_basis(endo_code_pcm(ccm))
        stack = np.vstack([v.arr for v in basis])
        while attempts < max_attempts and len(found) < count:
            attempts += 1
            coeffs = rng.integers(0, code.modulus, len(basis))
            v = FieldVector((coeffs @ stack) % code.modulus, code.modulus)
            keep(endo_from_vec(ccm, v))
    elif s_max == 0:
        draw = automorphism_sampler(code, source, rng)
        while attempts < max_attempts and len(found) < count:
            attempts += 1
            keep(endo_from_permutation(ccm, draw()))
    else:
        draw = automorphism_sampler(code, source, rng)
        pool_target = min(max(2 * count, math.isqrt(2 * max_attempts) + 1), 4000)
        pool: list[Permutation] = []
        pool_keys: set[bytes] = set()
        draws_left = 20 * pool_target  # small groups cannot fill the pool with distinct elements
        while len(pool) < pool_target and draws_left > 0:
            draws_left -= 1
            perm = draw()
            key = perm.image.tobytes()
            if key not in pool_keys:
                pool_keys.add(key)
                pool.append(perm)
        images = np.vstack([perm.image for perm in pool])
        n = code.n
        # delta of a superposed pair is n - 2 * (#agreeing coordinates)
        min_agree = 0 if delta_max is None else (n - delta_max + 1) // 2
        for i in range(len(pool)):
            if attempts >= max_attempts or len(found) >= count:
                break
            agree = (images[i] == images[i + 1 :]).sum(axis=1)
            for off in range(len(agree)):
                if attempts >= max_attempts or len(found) >= count:
                    break
                attempts += 1
                if agree[off] < min_agree or agree[off] == n:
                    continue
                j = i + 1 + off
                keep(superpose(code, pool[i], pool[j]))

    warnings_out = []
    exhausted = len(found) < count
    if exhausted:
        warnings_out.append(
            f"search exhausted after {attempts} attempts: found {len(found)} of {count}"
        )
    return SampleResult(found[:count], attempts, exhausted, warnings_out)


# ---------------------------------------------------------------------------
# endomorphism bundle files
# ---------------------------------------------------------------------------

BUNDLE_MAGIC = "endocode-bundle 1"


def bundle_write(path, rec: Reconstruction) -> None:
    """Serialize T, R, the null basis, and the image-membership matrix so a
    simulation can run the path without recomputation."""
    endo = rec.endo
    code = endo.code
    p = code.modulus
    nb = (
        np.vstack([v.arr for v in rec.null_basis])
        if rec.null_basis
        else np.zeros((0, code.n), dtype=np.int64)
    )
    with open(path, "w") as f:
        f.write(BUNDLE_MAGIC + "\n")
        f.write(f"code {code.name} {code.n} {code.k} {p}\n")
        f.write(f"delta {endo.delta}\n")
        f.write(f"s {endo.s}\n")
        for label, m in (
            ("T", endo.t),
            ("R", rec.r),
            ("NULL_BASIS", FieldMatrix(nb, p)),
            ("IM_CHECK", rec.im_check),
        ):
            f.write(label + "\n")
            f.write(gfmat.dense_dumps(m))


def bundle_read(path, code: LinearCode) -> Reconstruction:
    """Load and re-verify an endomorphism bundle against the given code."""
    with open(path) as f:
        lines = f.read().splitlines()
    if not lines or lines[0].strip() != BUNDLE_MAGIC:
        raise ValueError(f"{path}:1: not an endomorphism bundle")
    head = lines[1].split()
    if len(head) != 5 or head[0] != "code":
        raise ValueError(f"{path}:2: expected 'code <name> <n> <k> <p>'")
    n, k, p = int(head[2]), int(head[3]), int(head[4])
    if (n, k, p) != (code.n, code.k, code.modulus):
        raise ValueError(
            f"{path}: bundle is for a ({n},{k}) code over GF({p}), "
            f"got {code.name} ({code.n},{code.k}) over GF({code.modulus})"
        )
    stored_delta = int(lines[2].split()[1])
    stored_s = int(lines[3].split()[1])

    blocks: dict[str, FieldMatrix] = {}
    i = 4
    while i < len(lines):
        label = lines[i].strip()
        if not label:
            i += 1
            continue
        rows = int(lines[i + 1].split()[0])
        chunk = "\n".join(lines[i + 1 : i + 2 + rows])
        blocks[label] = gfmat.dense_loads(chunk, name=f"{path}[{label}]")
        i += 2 + rows
    for need in ("T", "R", "NULL_BASIS", "IM_CHECK"):
        if need not in blocks:
            raise ValueError(f"{path}: missing {need} block")

    endo = endo_from_matrix(compute_ccm(code), blocks["T"])
    if endo.s != stored_s or endo.delta != stored_delta:
        raise ValueError(
            f"{path}: stored (delta={stored_delta}, s={stored_s}) do not match the matrix "
            f"(delta={endo.delta}, s={endo.s})"
        )
    null_basis = [blocks["NULL_BASIS"].row(i) for i in range(blocks["NULL_BASIS"].rows)]
    if len(null_basis) != endo.s:
        raise ValueError(f"{path}: null basis has {len(null_basis)} rows, expected s={endo.s}")
    for v in null_basis:
        if not code.contains(v) or ((endo.t.arr @ v.arr) % p).any():
            raise ValueError(f"{path}: null-basis verification failed")
    if null_basis:
        stack = FieldMatrix(np.vstack([v.arr for v in null_basis]), p)
        if gfmat.rank(stack) != endo.s:
            raise ValueError(f"{path}: null-basis rows are not independent")
    r = blocks["R"]
    im_check = blocks["IM_CHECK"]
    if gfmat.rank(im_check) != n - (k - endo.s):
        raise ValueError(f"{path}: image-membership matrix has the wrong rank")
    for i in range(k):
        x = code.g.arr[i]
        tx = (endo.t.arr @ x) % p
        v = FieldVector((r.arr @ tx + x) % p, p)
        if not _in_span(null_basis, v):
            raise ValueError(f"{path}: R does not reconstruct the coset of generator row {i}")
        if ((im_check.arr @ tx) % p).any():
            raise ValueError(f"{path}: image-membership matrix rejects an image of the code")
    return Reconstruction(endo, r, null_basis, im_check)
