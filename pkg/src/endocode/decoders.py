"""Soft-decision decoders: numerically stable box-plus arithmetic, flooding
sum-product belief propagation on any (possibly overcomplete) binary PCM,
successive cancellation for polar codes, and exhaustive maximum-likelihood
decoding via LLR correlation.

All decoders are stateless between calls and expose both a single-frame API
returning a :class:`DecodeOutcome` and a batched API used by the Monte-Carlo
simulator.  Per-frame results do not depend on how frames are batched: every
message update is elementwise per frame.

LLR convention: natural log, positive means bit 0 is more likely.  Values
are clamped to +/-LLR_MAX; tanh saturates in double precision near 19, and
30 leaves headroom without changing any decision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import LinearCode, PolarCode
from .gfmat import FieldMatrix, FieldVector

LLR_MAX = 30.0

ML_DIM_CAP = 16  # exhaustive ML enumerates 2^k codewords


@dataclass
class DecodeOutcome:
    estimate: FieldVector
    converged: bool
    iterations_used: int


def clamp(llr):
    return np.clip(llr, -LLR_MAX, LLR_MAX)


def boxplus(a, b):
    """LLR-domain GF(2) addition, 2 atanh(tanh(a/2) tanh(b/2)), computed in
    the stable sign-min-log1p form.  Accepts scalars or arrays."""
    a = clamp(np.asarray(a, dtype=np.float64))
    b = clamp(np.asarray(b, dtype=np.float64))
    out = (
        np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
        + np.log1p(np.exp(-np.abs(a + b)))
        - np.log1p(np.exp(-np.abs(a - b)))
    )
    out = clamp(out)
    return float(out) if out.ndim == 0 else out


def boxplus_fold(values) -> float:
    """Left fold of box-plus; the empty fold is +LLR_MAX (an empty GF(2) sum
    is constantly zero, i.e. a certainly-zero bit).  A singleton folds to the
    element itself, so permutation rows preprocess bit-for-bit."""
    it = iter(values)
    try:
        acc = float(np.clip(next(it), -LLR_MAX, LLR_MAX))
    except StopIteration:
        return LLR_MAX
    for v in it:
        acc = boxplus(acc, v)
    return float(acc)


def llr_correlation(x, llr) -> float:
    """Correlation sum((1 - 2 x_i) L_i); the ML metric shared by all list
    decisions."""
    xa = x.arr if isinstance(x, FieldVector) else np.asarray(x)
    return float(((1 - 2 * xa.astype(np.float64)) * np.asarray(llr)).sum())


# ---------------------------------------------------------------------------
# belief propagation
# ---------------------------------------------------------------------------

class BpDecoder:
    """Flooding sum-product decoder on the Tanner graph of a binary PCM.

    Check-node updates fold box-plus over incoming messages (prefix/suffix
    folds, so irregular rows cost O(degree)); variable nodes sum.  A hard
    decision is taken every iteration and decoding stops early on a zero
    syndrome.  Padding slots in the rectangular message layout hold the
    neutral +LLR_MAX / 0 values.
    """

    def __init__(self, h: FieldMatrix, max_iter: int = 32):
        if h.modulus != 2:
            raise ValueError("belief propagation requires a binary PCM")
        self.h = h
        self.max_iter = max_iter
        a = h.arr
        m, n = a.shape
        self.m, self.n = m, n
        rows, cols = np.nonzero(a)
        self.num_edges = len(rows)
        self.edge_col = cols.astype(np.int64)
        dr = int((a.sum(axis=1)).max())
        dc = int((a.sum(axis=0)).max())
        self.row_edge = np.full((m, dr), self.num_edges, dtype=np.int64)
        self.col_edge = np.full((n, dc), self.num_edges, dtype=np.int64)
        rpos = np.zeros(m, dtype=np.int64)
        cpos = np.zeros(n, dtype=np.int64)
        for e, (i, j) in enumerate(zip(rows, cols)):
            self.row_edge[i, rpos[i]] = e
            rpos[i] += 1
            self.col_edge[j, cpos[j]] = e
            cpos[j] += 1
        self.row_valid = self.row_edge < self.num_edges
        self._ht = a.T.astype(np.int64)

    def _syndrome_zero(self, bits: np.ndarray) -> np.ndarray:
        return ((bits.astype(np.int64) @ self._ht) % 2 == 0).all(axis=1)

    def decode_batch(self, llr: np.ndarray):
        """Decode (B, n) channel LLRs; returns (bits, converged, iterations)."""
        llr = clamp(np.asarray(llr, dtype=np.float64))
        if llr.ndim != 2 or llr.shape[1] != self.n:
            raise ValueError(f"expected LLR batch of shape (B, {self.n})")
        bsz = llr.shape[0]
        est = (llr < 0).astype(np.uint8)
        converged = self._syndrome_zero(est)
        iters = np.zeros(bsz, dtype=np.int64)
        active = np.nonzero(~converged)[0]
        if active.size == 0 or self.max_iter == 0:
            return est, converged, iters

        l_act = llr[active]
        msg_vc = np.empty((active.size, self.num_edges + 1))
        msg_vc[:, :-1] = l_act[:, self.edge_col]
        msg_vc[:, -1] = LLR_MAX
        msg_cv = np.empty_like(msg_vc)

        for it in range(1, self.max_iter + 1):
            grid = msg_vc[:, self.row_edge]                      # (B', m, dr)
            b_act, m, dr = grid.shape
            prefix = np.empty((b_act, m, dr + 1))
            prefix[:, :, 0] = LLR_MAX
            for t in range(dr):
                prefix[:, :, t + 1] = boxplus(prefix[:, :, t], grid[:, :, t])
            suffix = np.empty_like(prefix)
            suffix[:, :, dr] = LLR_MAX
            for t in range(dr - 1, -1, -1):
                suffix[:, :, t] = boxplus(suffix[:, :, t + 1], grid[:, :, t])
            out = boxplus(prefix[:, :, :-1], suffix[:, :, 1:])
            msg_cv[:, -1] = 0.0
            msg_cv[:, self.row_edge[self.row_valid]] = out[:, self.row_valid]

            totals = l_act + msg_cv[:, self.col_edge].sum(axis=2)
            msg_vc[:, :-1] = clamp(totals[:, self.edge_col] - msg_cv[:, :-1])
            msg_vc[:, -1] = LLR_MAX

            bits = (totals < 0).astype(np.uint8)
            done = self._syndrome_zero(bits)
            if done.any():
                idx = active[done]
                est[idx] = bits[done]
                converged[idx] = True
                iters[idx] = it
                keep = ~done
                active = active[keep]
                if active.size == 0:
                    return est, converged, iters
                l_act = l_act[keep]
                msg_vc = msg_vc[keep]
                msg_cv = msg_cv[keep]
                bits = bits[keep]

        est[active] = bits
        iters[active] = self.max_iter
        return est, converged, iters

    def decode(self, llr) -> DecodeOutcome:
        bits, conv, iters = self.decode_batch(np.asarray(llr, dtype=np.float64)[None, :])
        return DecodeOutcome(FieldVector(bits[0].astype(np.int64), 2), bool(conv[0]), int(iters[0]))


def bp_decode(h: FieldMatrix, llr, max_iter: int = 32) -> DecodeOutcome:
    return BpDecoder(h, max_iter=max_iter).decode(llr)


# ---------------------------------------------------------------------------
# successive cancellation
# ---------------------------------------------------------------------------

class ScDecoder:
    """LLR-domain successive cancellation on the recursive polar structure.

    The left message is the exact box-plus f-function, the right message is
    g = b + (1 - 2u) a with the partial-sum bit u; frozen positions decide 0.
    The returned word is the re-encoded codeword, so the output always has a
    zero syndrome.
    """

    def __init__(self, code: PolarCode):
        if not isinstance(code, PolarCode):
            raise TypeError("SC decoding requires a polar code with a recorded frozen set")
        self.code = code
        self._mask = code.frozen_mask

    def decode_batch(self, llr: np.ndarray):
        llr = clamp(np.asarray(llr, dtype=np.float64))
        if llr.ndim != 2 or llr.shape[1] != self.code.n:
            raise ValueError(f"expected LLR batch of shape (B, {self.code.n})")
        bits = _sc_recurse(llr, self._mask)
        bsz = llr.shape[0]
        return bits, np.ones(bsz, dtype=bool), np.zeros(bsz, dtype=np.int64)

    def decode(self, llr) -> DecodeOutcome:
        bits, _, _ = self.decode_batch(np.asarray(llr, dtype=np.float64)[None, :])
        return DecodeOutcome(FieldVector(bits[0].astype(np.int64), 2), True, 0)


def _sc_recurse(llr: np.ndarray, frozen_mask: np.ndarray) -> np.ndarray:
    size = llr.shape[1]
    if size == 1:
        if frozen_mask[0]:
            return np.zeros(llr.shape, dtype=np.uint8)
        return (llr[:, :1] < 0).astype(np.uint8)
    half = size // 2
    a, b = llr[:, :half], llr[:, half:]
    x1 = _sc_recurse(boxplus(a, b), frozen_mask[:half])
    g = b + (1.0 - 2.0 * x1) * a
    x2 = _sc_recurse(g, frozen_mask[half:])
    return np.hstack([x1 ^ x2, x2])


def sc_decode(code: PolarCode, llr) -> DecodeOutcome:
    return ScDecoder(code).decode(llr)


# ---------------------------------------------------------------------------
# exhaustive maximum likelihood
# ---------------------------------------------------------------------------

class MlDecoder:
    """Correlation-maximizing search over all 2^k codewords (k <= 16).

    Codewords are held in lexicographic order, so the first argmax hit is the
    lexicographically smallest among ties.
    """

    def __init__(self, code: LinearCode):
        if code.k > ML_DIM_CAP:
            raise ValueError(f"exhaustive ML refused for k={code.k} > {ML_DIM_CAP}")
        if code.modulus != 2:
            raise ValueError("exhaustive ML implemented for binary codes")
        cw = code.codewords()
        order = np.lexsort(cw.T[::-1])
        self.code = code
        self.codewords = cw[order]
        self._bpsk = (1.0 - 2.0 * self.codewords.astype(np.float64)).T  # (n, 2^k)

    def decode_batch(self, llr: np.ndarray):
        llr = np.asarray(llr, dtype=np.float64)
        if llr.ndim != 2 or llr.shape[1] != self.code.n:
            raise ValueError(f"expected LLR batch of shape (B, {self.code.n})")
        best = np.argmax(llr @ self._bpsk, axis=1)
        bsz = llr.shape[0]
        return (
            self.codewords[best].copy(),
            np.ones(bsz, dtype=bool),
            np.zeros(bsz, dtype=np.int64),
        )

    def decode(self, llr) -> DecodeOutcome:
        bits, _, _ = self.decode_batch(np.asarray(llr, dtype=np.float64)[None, :])
        return DecodeOutcome(FieldVector(bits[0].astype(np.int64), 2), True, 0)


def ml_decode(code: LinearCode, llr) -> DecodeOutcome:
    return MlDecoder(code).decode(llr)


# ---------------------------------------------------------------------------
# decoder selection by name (simulation configs, ensemble files)
# ---------------------------------------------------------------------------

def make_decoder(name: str, code: LinearCode, pcm: FieldMatrix | None = None, max_iter: int = 32):
    if name == "bp":
        return BpDecoder(pcm if pcm is not None else code.h, max_iter=max_iter)
    if name == "sc":
        return ScDecoder(code)
    if name == "ml":
        return MlDecoder(code)
    raise ValueError(f"unknown decoder {name!r} (expected bp, sc, or ml)")
