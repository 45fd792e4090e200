"""Seeded Monte-Carlo frame-error-rate estimation over the BiAWGN channel.

Every frame draws its information bits and noise from an own counter-based
generator keyed by (seed, SNR index, frame index), so results are identical
no matter how frames are batched or spread over worker processes.  Frames
are processed in fixed chunks; a point stops at the first chunk boundary
where the error target is met (or at the frame cap), which keeps the frame
count itself deterministic.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import codes as codes_mod
from . import decoders as dec
from . import eed as eed_mod
from .decoders import LLR_MAX

CHUNK_FRAMES = 512  # stopping-rule granularity; fixed so worker count cannot change results

GOLAY_OVERCOMPLETE_ROWS = 250  # reproduces the reference BP working point


class SimConfigError(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("invalid simulation config:\n" + "\n".join(f"  - {p}" for p in problems))
        self.problems = problems


@dataclass
class SimConfig:
    code: str
    decoder: str | None = None          # "bp" | "sc" | "ml"
    ensemble: str | None = None         # path to an ensemble JSON (exclusive with decoder)
    ebno_db: list[float] = field(default_factory=list)
    min_frame_errors: int = 200
    max_frames: int = 10_000_000
    seed: int = 0
    workers: int = 1
    pcm: str = "standard"               # "standard" | "overcomplete" (bp only)
    overcomplete_max_rows: int | None = None
    max_iter: int = 32
    noiseless: bool = False
    all_zero: bool = False

    @classmethod
    def from_json(cls, path) -> "SimConfig":
        with open(path) as f:
            raw = json.load(f)
        known = set(cls.__dataclass_fields__)
        problems = [f"unknown key {k!r}" for k in raw if k not in known]
        cfg = cls(**{k: v for k, v in raw.items() if k in known})
        if cfg.ensemble and not Path(cfg.ensemble).is_absolute():
            cfg.ensemble = str((Path(path).parent / cfg.ensemble).resolve())
        cfg.validate(problems)
        return cfg

    def validate(self, problems: list[str] | None = None) -> None:
        problems = [] if problems is None else problems
        if self.code not in _CODES:
            problems.append(f"unknown code {self.code!r} (expected one of {sorted(_CODES)})")
        if (self.decoder is None) == (self.ensemble is None):
            problems.append("exactly one of 'decoder' and 'ensemble' must be set")
        if self.decoder is not None and self.decoder not in ("bp", "sc", "ml"):
            problems.append(f"unknown decoder {self.decoder!r}")
        if not self.ebno_db:
            problems.append("ebno_db list must be nonempty")
        if self.min_frame_errors < 1:
            problems.append("min_frame_errors must be >= 1")
        if self.max_frames < 1:
            problems.append("max_frames must be >= 1")
        if self.workers < 1:
            problems.append("workers must be >= 1")
        if not 0 <= self.seed < 2**64:
            problems.append("seed must be a 64-bit unsigned integer")
        if self.pcm not in ("standard", "overcomplete"):
            problems.append(f"unknown pcm selector {self.pcm!r}")
        if problems:
            raise SimConfigError(problems)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass
class FerRecord:
    ebno_db: float
    frames: int
    frame_errors: int
    bit_errors: int
    fer: float
    ber: float
    elapsed_s: float
    capped: bool = False


_CODES = {
    "hamming74": codes_mod.hamming_7_4,
    "golay24": codes_mod.extended_golay,
    "polar32": codes_mod.polar_32_16,
}

_CODE_N = {"hamming74": 7, "golay24": 24, "polar32": 32}


def awgn_llr(x, ebno_db: float, rate: float, rng) -> np.ndarray:
    """BPSK (bit 0 -> +1) over AWGN with sigma^2 = 1/(2 rate 10^(ebno/10));
    returns channel LLRs 2 y / sigma^2 clamped to +/-LLR_MAX."""
    bits = x.arr if hasattr(x, "arr") else np.asarray(x)
    sigma2 = 1.0 / (2.0 * rate * 10.0 ** (ebno_db / 10.0))
    y = (1.0 - 2.0 * bits.astype(np.float64)) + rng.standard_normal(bits.shape) * math.sqrt(sigma2)
    return np.clip(2.0 * y / sigma2, -LLR_MAX, LLR_MAX)


# ---------------------------------------------------------------------------
# worker machinery
# ---------------------------------------------------------------------------

_CONTEXT: dict = {}


def _get_context(cfg_dict: dict) -> dict:
    key = json.dumps(cfg_dict, sort_keys=True)
    ctx = _CONTEXT.get(key)
    if ctx is not None:
        return ctx
    cfg = SimConfig(**cfg_dict)
    code = _CODES[cfg.code]()
    if cfg.ensemble is not None:
        decoder = eed_mod.load_ensemble(cfg.ensemble, code)
        paired = True
    else:
        pcm = None
        if cfg.decoder == "bp" and cfg.pcm == "overcomplete":
            pcm = codes_mod.overcomplete_pcm(code, max_rows=cfg.overcomplete_max_rows)
        decoder = dec.make_decoder(cfg.decoder, code, pcm=pcm, max_iter=cfg.max_iter)
        paired = False
    ctx = {"cfg": cfg, "code": code, "decoder": decoder, "paired": paired}
    _CONTEXT.clear()
    _CONTEXT[key] = ctx
    return ctx


def _frame_rng(seed: int, snr_index: int, frame_index: int) -> np.random.Generator:
    tag = (snr_index << 40) + frame_index
    return np.random.Generator(np.random.Philox(key=np.array([seed, tag], dtype=np.uint64)))


def _sim_chunk(cfg_dict: dict, snr_index: int, ebno_db: float, start: int, stop: int) -> dict:
    """Simulate frames [start, stop); returns integer error counts."""
    ctx = _get_context(cfg_dict)
    cfg: SimConfig = ctx["cfg"]
    code = ctx["code"]
    nframes = stop - start
    k, n = code.k, code.n
    rate = k / n
    u = np.zeros((nframes, k), dtype=np.int64)
    llr = np.zeros((nframes, n), dtype=np.float64)
    sigma2 = 1.0 / (2.0 * rate * 10.0 ** (ebno_db / 10.0))
    for i in range(nframes):
        rng = _frame_rng(cfg.seed, snr_index, start + i)
        if not cfg.all_zero:
            u[i] = rng.integers(0, 2, k)
        xb = (u[i] @ code.g.arr) % 2
        if cfg.noiseless:
            llr[i] = np.where(xb == 0, LLR_MAX, -LLR_MAX)
        else:
            y = (1.0 - 2.0 * xb) + rng.standard_normal(n) * math.sqrt(sigma2)
            llr[i] = np.clip(2.0 * y / sigma2, -LLR_MAX, LLR_MAX)
    x = (u @ code.g.arr) % 2

    out = {"frames": nframes}
    if ctx["paired"]:
        res = ctx["decoder"].decode_batch(llr)
        diff = res["estimate"].astype(np.int64) != x
        base_diff = res["path0_raw"].astype(np.int64) != x
        out["frame_errors"] = int(diff.any(axis=1).sum())
        out["bit_errors"] = int(diff.sum())
        out["base_frame_errors"] = int(base_diff.any(axis=1).sum())
        out["base_bit_errors"] = int(base_diff.sum())
    else:
        bits, _, _ = ctx["decoder"].decode_batch(llr)
        diff = bits.astype(np.int64) != x
        out["frame_errors"] = int(diff.any(axis=1).sum())
        out["bit_errors"] = int(diff.sum())
    return out


def _workers(cfg: SimConfig) -> int:
    env = os.environ.get("ENDOCODE_WORKERS")
    return max(1, int(env)) if env else cfg.workers


def _run_point(cfg: SimConfig, snr_index: int, ebno_db: float, pool, stop_counts) -> dict:
    """Accumulate chunks in index order until every stop counter reaches the
    error target or the frame cap is hit."""
    totals = {"frames": 0, "frame_errors": 0, "bit_errors": 0,
              "base_frame_errors": 0, "base_bit_errors": 0}
    cfg_dict = cfg.to_dict()
    nchunks = math.ceil(cfg.max_frames / CHUNK_FRAMES)
    width = _workers(cfg)
    next_chunk = 0

    def reached() -> bool:
        return all(totals[key] >= cfg.min_frame_errors for key in stop_counts)

    while next_chunk < nchunks and not reached():
        wave = range(next_chunk, min(next_chunk + width, nchunks))
        args = [
            (cfg_dict, snr_index, ebno_db, c * CHUNK_FRAMES, min((c + 1) * CHUNK_FRAMES, cfg.max_frames))
            for c in wave
        ]
        if pool is None:
            results = [_sim_chunk(*a) for a in args]
        else:
            results = list(pool.map(_chunk_star, args))
        for res in results:
            for key, val in res.items():
                totals[key] = totals.get(key, 0) + val
            next_chunk += 1
            if reached():
                break
    totals["capped"] = not reached()
    return totals


def _chunk_star(args):
    return _sim_chunk(*args)


def _make_records(cfg, ebno_db, totals, elapsed, prefix="") -> FerRecord:
    frames = totals["frames"]
    fe = totals[prefix + "frame_errors"]
    be = totals[prefix + "bit_errors"]
    return FerRecord(
        ebno_db=ebno_db,
        frames=frames,
        frame_errors=fe,
        bit_errors=be,
        fer=fe / frames,
        ber=be / (frames * _CODE_N[cfg.code]) if frames else 0.0,
        elapsed_s=elapsed,
        capped=totals["capped"],
    )


def _run(cfg: SimConfig, paired: bool):
    cfg.validate()
    stop_counts = ["frame_errors", "base_frame_errors"] if paired else ["frame_errors"]
    workers = _workers(cfg)
    pool = None
    records, base_records = [], []
    try:
        if workers > 1:
            pool = ProcessPoolExecutor(max_workers=workers)
        for snr_index, ebno_db in enumerate(cfg.ebno_db):
            t0 = time.monotonic()
            totals = _run_point(cfg, snr_index, float(ebno_db), pool, stop_counts)
            elapsed = time.monotonic() - t0
            records.append(_make_records(cfg, float(ebno_db), totals, elapsed))
            if paired:
                base_records.append(_make_records(cfg, float(ebno_db), totals, elapsed, "base_"))
    finally:
        if pool is not None:
            pool.shutdown()
    _warn_if_not_monotonic(records)
    return (base_records, records) if paired else records


def run_fer(cfg: SimConfig) -> list[FerRecord]:
    """FER/BER per SNR point with the deterministic chunked stopping rule."""
    return _run(cfg, paired=False)


def run_paired_fer(cfg: SimConfig) -> tuple[list[FerRecord], list[FerRecord]]:
    """Ensemble run that also reports the stand-alone path-0 decoder on the
    same noise realizations: (baseline records, ensemble records)."""
    cfg.validate()
    if cfg.ensemble is None:
        raise SimConfigError(["paired runs require an ensemble config"])
    return _run(cfg, paired=True)


def _warn_if_not_monotonic(records: list[FerRecord]) -> None:
    ordered = sorted(records, key=lambda r: r.ebno_db)
    for lo, hi in zip(ordered, ordered[1:]):
        # flag only when the increase exceeds ~3 sigma of the difference
        var = lo.fer / max(lo.frames, 1) + hi.fer / max(hi.frames, 1)
        if hi.fer > lo.fer + 3.0 * math.sqrt(var):
            warnings.warn(
                f"FER not monotone in SNR: {lo.fer:.3g} @ {lo.ebno_db} dB vs "
                f"{hi.fer:.3g} @ {hi.ebno_db} dB",
                stacklevel=3,
            )


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

CSV_HEADER = "ebno_db,frames,frame_errors,bit_errors,fer,ber,elapsed_s"


def write_csv(records: list[FerRecord], path) -> None:
    with open(path, "w", newline="") as f:
        f.write(CSV_HEADER + "\n")
        for r in records:
            if r.capped:
                f.write(f"# point {r.ebno_db:g} hit max_frames before reaching the error target\n")
            f.write(
                f"{r.ebno_db:g},{r.frames},{r.frame_errors},{r.bit_errors},"
                f"{r.fer:.6g},{r.ber:.6g},{r.elapsed_s:.3f}\n"
            )


def read_csv(path) -> list[FerRecord]:
    records = []
    with open(path) as f:
        rows = [ln for ln in f.read().splitlines() if ln and not ln.startswith("#")]
    for row in csv.DictReader(rows):
        records.append(
            FerRecord(
                ebno_db=float(row["ebno_db"]),
                frames=int(row["frames"]),
                frame_errors=int(row["frame_errors"]),
                bit_errors=int(row["bit_errors"]),
                fer=float(row["fer"]),
                ber=float(row["ber"]),
                elapsed_s=float(row["elapsed_s"]),
            )
        )
    return records
