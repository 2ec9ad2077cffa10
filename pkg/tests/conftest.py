from __future__ import annotations

import numpy as np
import pytest

from rulerank import PairedSample


def make_sample(d, rules, ids=None) -> PairedSample:
    d = np.asarray(d, dtype=float)
    if ids is None:
        ids = np.arange(d.size)
    return PairedSample(pair_ids=ids, d=d, rules=np.asarray(rules))


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
