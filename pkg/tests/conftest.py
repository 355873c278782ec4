import numpy as np
import pytest

from scflp import Instance

# 3-customer / 3-site instance with a known full solution: classic-cut LP
# relaxation 25/18 at x = (2/3, 2/3, 2/3), anchor-cut and assignment LP
# relaxations 4/3, bilevel optimum 4/3 attained by three leader sets.
GOLDEN_TEXT = """\
scflp 1
3 3 2 3
1 1 1
1 2 1
2 1 1
1 1 2
"""


def golden_instance() -> Instance:
    return Instance(
        m=3,
        n=3,
        w=np.ones(3),
        v=np.array([[1.0, 2.0, 1.0], [2.0, 1.0, 1.0], [1.0, 1.0, 2.0]]),
        p=2,
        r=3,
    )


@pytest.fixture
def golden() -> Instance:
    return golden_instance()


def random_instance(rng: np.random.Generator, m=None, n=None, p=None, r=None) -> Instance:
    m = int(m if m is not None else rng.integers(2, 6))
    n = int(n if n is not None else rng.integers(2, 6))
    p = int(p if p is not None else rng.integers(1, n + 1))
    r = int(r if r is not None else rng.integers(1, n + 1))
    w = rng.integers(1, 11, size=m).astype(float)
    v = rng.uniform(0.1, 3.0, size=(m, n))
    return Instance(m=m, n=n, w=w, v=v, p=p, r=r)


def random_choice(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    y = np.zeros(n, dtype=np.int8)
    y[rng.choice(n, size=k, replace=False)] = 1
    return y
