import random
from pathlib import Path

import pytest

from ecsvc.group import named_group

VECTORS = Path(__file__).parent / "vectors"


@pytest.fixture
def tiny():
    return named_group("tiny")


@pytest.fixture(scope="session")
def medium():
    return named_group("medium")


@pytest.fixture(scope="session")
def default_group():
    return named_group("default")


@pytest.fixture
def rng():
    return random.Random(1234)


def read_vectors(name):
    """Blank-line separated cases of hex lines; '-' stands for empty."""
    cases, cur = [], []
    for line in (VECTORS / name).read_text().splitlines():
        line = line.strip()
        if line.startswith("#"):
            continue
        if not line:
            if cur:
                cases.append(cur)
            cur = []
            continue
        cur.append(b"" if line == "-" else bytes.fromhex(line))
    if cur:
        cases.append(cur)
    return cases


def random_policy(n, rng):
    trits = [rng.choice((1, 0, -1)) for _ in range(n)]
    trits[rng.randrange(n)] = 1
    return trits


def run_pipeline(params, n, policy, i_r, rng, M=None):
    """setup -> keygen -> encrypt -> shuffle -> transform -> extract -> PD1 -> PD2; returns (M, output)."""
    from ecsvc import eabehp as E
    from ecsvc.group import random_element, random_scalar

    mk = E.setup(params, n, rng)
    attrs = E.AttributeSet.of(i_r, n)
    uk = E.keygen(mk, 7, attrs, rng)
    omega = random_scalar(params, rng)
    M = random_element(params, rng) if M is None else M
    c = E.encrypt(mk.mpk, E.Policy(policy), omega, M, rng)
    sc2 = E.transform_ciphertext(E.shuffle(c, omega), mk.tk, params)
    i_hat = E.inverse_permute_attrs(attrs, omega, n)
    pd = E.proxy_decrypt1(E.extract(sc2, i_hat, params), E.transform_user_key(omega, uk, params), uk.rk, mk.tk,
                          params)
    return M, E.proxy_decrypt2(pd, attrs, i_hat, params)
