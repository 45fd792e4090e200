import numpy as np
import pytest

from endocode import appendix, codes


@pytest.fixture(scope="session")
def fx():
    """Worked-example fixture matrices (H, A, A_inv, Z_T, T, W, ...)."""
    return appendix.load_fixtures()


@pytest.fixture(scope="session")
def hamming():
    return codes.hamming_7_4()


@pytest.fixture(scope="session")
def golay():
    return codes.extended_golay()


@pytest.fixture(scope="session")
def polar():
    return codes.polar_32_16()


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)


def random_full_rank_pcm(rng, n_max=10):
    """Random binary PCM with full row rank, 1 <= k < n <= n_max."""
    from endocode import gfmat

    while True:
        n = int(rng.integers(4, n_max + 1))
        m = int(rng.integers(1, n))
        h = rng.integers(0, 2, (m, n)).astype(np.int64)
        hm = gfmat.FieldMatrix(h, 2)
        if gfmat.rank(hm) == m:
            return hm
