"""Endomorphism ensemble decoding.

Each path preprocesses the channel LLRs through its transformation matrix
(box-plus folding the positions each output bit depends on), decodes with
the path decoder, discards the path unless the estimate is a codeword inside
the endomorphism's image, and expands the estimate into its full coset of
2^s codeword candidates.  The pooled candidates of all paths feed an
ML-in-the-list decision scored against the original channel LLRs.

Path 0 always carries the identity endomorphism, so with a single path the
ensemble reduces bit-for-bit to its plain decoder.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import decoders as dec
from . import endo as endo_mod
from .codes import LinearCode, overcomplete_pcm
from .decoders import LLR_MAX, boxplus, llr_correlation
from .endo import Reconstruction, compute_ccm
from .gfmat import FieldMatrix, FieldVector


@dataclass
class EedPath:
    rec: Reconstruction
    decoder: object  # BpDecoder / ScDecoder / MlDecoder
    label: str = ""

    @property
    def endo(self):
        return self.rec.endo


@dataclass
class EedResult:
    estimate: FieldVector
    chosen_path: int
    pool_size: int
    paths_discarded: int
    fallback_used: bool


def preprocess(llr, t: FieldMatrix) -> np.ndarray:
    """Per-row box-plus fold of the LLRs selected by the matrix row supports;
    all-zero rows produce the certainly-zero LLR +LLR_MAX."""
    out = _preprocess_batch(np.asarray(llr, dtype=np.float64)[None, :], _row_supports(t))
    return out[0]


def _row_supports(t: FieldMatrix) -> list[np.ndarray]:
    return [np.nonzero(t.arr[j])[0] for j in range(t.rows)]


def _preprocess_batch(llr: np.ndarray, supports: list[np.ndarray]) -> np.ndarray:
    out = np.full((llr.shape[0], len(supports)), LLR_MAX, dtype=np.float64)
    for j, sup in enumerate(supports):
        if sup.size == 0:
            continue
        acc = llr[:, sup[0]].copy()
        for i in sup[1:]:
            acc = boxplus(acc, llr[:, i])
        out[:, j] = acc
    return out


def path_decode(path: EedPath, llr) -> list[FieldVector]:
    """Run one path end to end; an empty list means the path is discarded
    (decoder did not converge, estimate not a codeword, or estimate outside
    the endomorphism's image)."""
    code = path.endo.code
    outcome = path.decoder.decode(preprocess(llr, path.endo.t))
    if not outcome.converged:
        return []
    est = outcome.estimate
    if not code.contains(est):
        return []
    if ((path.rec.im_check.arr @ est.arr) % code.modulus).any():
        return []
    return endo_mod.coset_expand(path.rec, est)


def eed_decode(paths: list[EedPath], llr) -> EedResult:
    """Pool all path candidates and pick the correlation maximizer against
    the original channel LLRs; ties fall to the lower path index, then the
    lexicographically smallest codeword.  An empty pool falls back to the raw
    decoder output of path 0."""
    if not paths:
        raise ValueError("need at least one path")
    if paths[0].endo.delta != 0 or (paths[0].endo.t != FieldMatrix.identity(
        paths[0].endo.code.n, paths[0].endo.code.modulus
    )):
        raise ValueError("path 0 must carry the identity endomorphism")
    llr = np.asarray(llr, dtype=np.float64)
    pool: list[tuple[int, FieldVector]] = []
    discarded = 0
    for i, path in enumerate(paths):
        cands = path_decode(path, llr)
        if not cands:
            discarded += 1
        pool.extend((i, c) for c in cands)
    if not pool:
        raw = paths[0].decoder.decode(preprocess(llr, paths[0].endo.t))
        return EedResult(raw.estimate, 0, 0, discarded, True)
    scores = np.array([llr_correlation(c, llr) for _, c in pool])
    best = scores.max()
    tied = [pool[i] for i in np.nonzero(scores == best)[0]]
    tied.sort(key=lambda pc: (pc[0], tuple(pc[1].arr)))
    path_idx, estimate = tied[0]
    return EedResult(estimate, path_idx, len(pool), discarded, False)


class EedDecoder:
    """Batched ensemble decoder used by the Monte-Carlo simulator.

    decode_batch returns the final estimates together with the raw path-0
    decoder output, which doubles as the paired stand-alone baseline."""

    def __init__(self, paths: list[EedPath]):
        if not paths:
            raise ValueError("need at least one path")
        self.paths = paths
        self.code = paths[0].endo.code
        self._supports = [_row_supports(p.endo.t) for p in paths]
        self._offsets = [p.rec.coset_offsets().astype(np.uint8) for p in paths]
        self._r = [p.rec.r.arr for p in paths]
        self._im = [p.rec.im_check.arr for p in paths]
        self._ht = self.code.h.arr.T

    def decode_batch(self, llr: np.ndarray) -> dict:
        llr = np.asarray(llr, dtype=np.float64)
        bsz, n = llr.shape
        cand_bits = []
        cand_scores = []
        cand_path = []
        path0_raw = None
        any_ok = np.zeros(bsz, dtype=bool)
        discarded = np.zeros(bsz, dtype=np.int64)
        for i, path in enumerate(self.paths):
            lp = _preprocess_batch(llr, self._supports[i])
            bits, conv, _ = path.decoder.decode_batch(lp)
            if i == 0:
                path0_raw = bits.copy()
            ok = conv.copy()
            ok &= ((bits.astype(np.int64) @ self._ht) % 2 == 0).all(axis=1)
            im = self._im[i]
            if im.shape[0]:
                ok &= ((bits.astype(np.int64) @ im.T) % 2 == 0).all(axis=1)
            discarded += (~ok).astype(np.int64)
            any_ok |= ok
            base = (bits.astype(np.int64) @ self._r[i].T) % 2
            cands = base[:, None, :].astype(np.uint8) ^ self._offsets[i][None, :, :]
            scores = (1.0 - 2.0 * cands) @ llr[:, :, None]
            scores = scores[:, :, 0]
            scores[~ok] = -np.inf
            cand_bits.append(cands)
            cand_scores.append(scores)
            cand_path.append(np.full(cands.shape[1], i, dtype=np.int64))
        all_scores = np.concatenate(cand_scores, axis=1)
        path_of = np.concatenate(cand_path)
        best = np.argmax(all_scores, axis=1)  # first max: lowest path, then coset order
        estimates = np.empty((bsz, n), dtype=np.uint8)
        chosen = np.empty(bsz, dtype=np.int64)
        pool_sizes = np.isfinite(all_scores).sum(axis=1)
        bounds = np.cumsum([0] + [c.shape[1] for c in cand_bits])
        for i, cands in enumerate(cand_bits):
            sel = (best >= bounds[i]) & (best < bounds[i + 1])
            if sel.any():
                estimates[sel] = cands[sel, best[sel] - bounds[i]]
                chosen[sel] = i
        fallback = ~any_ok
        if fallback.any():
            estimates[fallback] = path0_raw[fallback]
            chosen[fallback] = 0
        return {
            "estimate": estimates,
            "chosen_path": chosen,
            "pool_size": pool_sizes,
            "paths_discarded": discarded,
            "fallback_used": fallback,
            "path0_raw": path0_raw,
        }


# ---------------------------------------------------------------------------
# ensemble construction
# ---------------------------------------------------------------------------

def identity_path(code: LinearCode, decoder, label: str = "identity") -> EedPath:
    ccm = compute_ccm(code)
    ident = endo_mod.endo_from_matrix(ccm, FieldMatrix.identity(code.n, code.modulus))
    return EedPath(endo_mod.reconstruction(ccm, ident), decoder, label)


def make_paths(code: LinearCode, recs: list[Reconstruction], decoder) -> list[EedPath]:
    """Identity path plus one auxiliary path per reconstruction, all sharing
    one decoder instance."""
    paths = [identity_path(code, decoder)]
    for i, rec in enumerate(recs):
        paths.append(EedPath(rec, decoder, label=f"aux-{i}"))
    return paths


def _build_pcm(code: LinearCode, spec_name: str, max_rows):
    if spec_name == "standard":
        return code.h
    if spec_name == "overcomplete":
        return overcomplete_pcm(code, max_rows=max_rows)
    raise ValueError(f"unknown pcm selector {spec_name!r}")


def load_ensemble(path, code: LinearCode) -> EedDecoder:
    """Ensemble description file: JSON with the decoder name, optional PCM
    options, and the endomorphism bundle paths (relative to the file)."""
    path = Path(path)
    with open(path) as f:
        desc = json.load(f)
    name = desc.get("decoder")
    if name not in ("bp", "sc"):
        raise ValueError(f"{path}: ensemble decoder must be 'bp' or 'sc', got {name!r}")
    if name == "bp":
        pcm = _build_pcm(code, desc.get("pcm", "standard"), desc.get("overcomplete_max_rows"))
        decoder = dec.BpDecoder(pcm, max_iter=desc.get("max_iter", 32))
    else:
        decoder = dec.ScDecoder(code)
    recs = []
    for rel in desc.get("bundles", []):
        bundle_path = Path(rel)
        if not bundle_path.is_absolute():
            bundle_path = path.parent / bundle_path
        if not bundle_path.exists():
            raise FileNotFoundError(f"endomorphism bundle not found: {bundle_path}")
        recs.append(endo_mod.bundle_read(bundle_path, code))
    return EedDecoder(make_paths(code, recs, decoder))
