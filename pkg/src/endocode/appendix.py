"""Worked Hamming(7,4) fixture: published matrices for one proper
endomorphism, its reconstruction, and the coset of the all-ones codeword.

The matrices live as dense text files under ``data/appendix``; the check
chain recomputes every derived quantity and compares bit-exactly.  It backs
both the ``verify-appendix`` CLI command and the acceptance suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import codes, endo, gfmat
from .gfmat import FieldMatrix, FieldVector

_FILES = ("h", "a", "a_inv", "z_t", "t", "w", "t_w", "e_t", "g_r", "g_l", "r", "null_basis")

NULL_VECTOR = (0, 0, 1, 1, 0, 1, 0)
ALL_ONES = (1,) * 7
X_TAU = (0, 1, 0, 0, 0, 1, 1)
COSET = ((1, 1, 0, 0, 1, 0, 1), (1, 1, 1, 1, 1, 1, 1))


def load_fixtures(fixtures_dir: str | Path | None = None) -> dict[str, FieldMatrix]:
    """Load the fixture matrices, from the packaged data by default."""
    out = {}
    if fixtures_dir is None:
        root = resources.files("endocode").joinpath("data/appendix")
        for name in _FILES:
            out[name] = gfmat.dense_loads(root.joinpath(f"{name}.txt").read_text(), name=name)
    else:
        root = Path(fixtures_dir)
        for name in _FILES:
            out[name] = gfmat.dense_read(root / f"{name}.txt")
    return out


@dataclass
class Step:
    name: str
    passed: bool
    detail: str = ""


def _diff(expected: FieldMatrix, got: FieldMatrix) -> str:
    if expected.arr.shape != got.arr.shape:
        return f"shape {got.arr.shape} != {expected.arr.shape}"
    bad = np.argwhere(expected.arr != got.arr)
    cells = ", ".join(f"({i},{j})" for i, j in bad[:8])
    more = "" if len(bad) <= 8 else f" and {len(bad) - 8} more"
    return f"{len(bad)} mismatching entries at {cells}{more}"


def run_checks(fixtures_dir: str | Path | None = None) -> list[Step]:
    """Run the full fixture chain; every step is exact field arithmetic."""
    fx = load_fixtures(fixtures_dir)
    steps: list[Step] = []

    def check(name: str, ok: bool, detail: str = "") -> None:
        steps.append(Step(name, bool(ok), "" if ok else detail))

    h, a, a_inv = fx["h"], fx["a"], fx["a_inv"]
    n, k = 7, 4

    ha = gfmat.mat_mul(h, a)
    target = gfmat.hstack([FieldMatrix.identity(3), FieldMatrix.zeros(3, 4)])
    check("H*A = [I | 0]", ha == target, _diff(target, ha))

    prod = gfmat.mat_mul(a, a_inv)
    check("A*A_inv = I", prod == FieldMatrix.identity(7), _diff(FieldMatrix.identity(7), prod))

    t_computed = gfmat.mat_mul(gfmat.mat_mul(a, fx["z_t"]), a_inv)
    check("T = A Z_T A_inv", t_computed == fx["t"], _diff(fx["t"], t_computed))

    tw = gfmat.mat_mul(fx["t"], fx["w"])
    check("T*W matches", tw == fx["t_w"], _diff(fx["t_w"], tw))
    col_counts: dict[bytes, int] = {}
    for j in range(tw.cols):
        col_counts[tw.arr[:, j].tobytes()] = col_counts.get(tw.arr[:, j].tobytes(), 0) + 1
    pairing = len(col_counts) == 8 and all(c == 2 for c in col_counts.values())
    check(
        "T*W has 8 distinct columns, each twice",
        pairing,
        f"{len(col_counts)} distinct columns with multiplicities {sorted(col_counts.values())}",
    )

    code = codes.hamming_7_4()
    check("fixture H is the Hamming(7,4) PCM", h == code.h, _diff(code.h, h))
    ccm = endo.Ccm(code, a)
    em = endo.endo_from_matrix(ccm, fx["t"])
    check("rank(E_T) = 3", gfmat.rank(em.e_t) == 3, f"rank = {gfmat.rank(em.e_t)}")
    check("E_T block matches", em.e_t == fx["e_t"], _diff(fx["e_t"], em.e_t))
    check("s = 1", em.s == 1, f"s = {em.s}")
    check("delta = 2", em.delta == 2, f"delta = {em.delta}")

    eg = gfmat.mat_mul(fx["e_t"], fx["g_r"])
    check("E_T G_r in M-form", gfmat.is_m_form(eg), f"E_T G_r = {eg.arr.tolist()}")
    lam_expected = FieldMatrix(np.diag([0, 1, 1, 1]).astype(np.int64), 2)
    lam = gfmat.mat_mul(gfmat.mat_mul(fx["g_l"], fx["e_t"]), fx["g_r"])
    check("Lambda as printed", lam == lam_expected, _diff(lam_expected, lam))

    rec = endo.reconstruction(ccm, em, gr=fx["g_r"], gl=fx["g_l"])
    check("J = {1} (1-indexed)", rec.j_set == (0,), f"J (0-indexed) = {rec.j_set}")
    nb_ok = len(rec.null_basis) == 1 and tuple(rec.null_basis[0].arr) == NULL_VECTOR
    check(
        "null basis = {(0,0,1,1,0,1,0)}",
        nb_ok,
        f"got {[v.arr.tolist() for v in rec.null_basis]}",
    )
    check("R as printed", rec.r == fx["r"], _diff(fx["r"], rec.r))

    x = FieldVector(np.array(ALL_ONES), 2)
    x_tau = em.t @ x
    check("T maps all-ones to the printed image", tuple(x_tau.arr) == X_TAU, f"{x_tau.arr.tolist()}")
    coset = endo.coset_expand(rec, x_tau)
    got = {tuple(v.arr) for v in coset}
    check(
        "coset of the all-ones codeword",
        got == set(COSET),
        f"got {sorted(got)}",
    )
    return steps
