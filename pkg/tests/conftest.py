from __future__ import annotations

import os
import sys

from hypothesis import settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def moduli(draw, max_order: int = 60, alphabet=(2, 3, 4, 5, 6), max_factors: int = 3):
    out = []
    for _ in range(draw(st.integers(1, max_factors))):
        n = draw(st.sampled_from(alphabet))
        prod = n
        for m in out:
            prod *= m
        if prod > max_order:
            break
        out.append(n)
    return tuple(out or [draw(st.sampled_from(alphabet))])


@st.composite
def group_and_elements(draw, count: int = 2, **kw):
    from hypersplit.core import Group

    g = Group(draw(moduli(**kw)))
    elts = [tuple(draw(st.integers(0, n - 1)) for n in g.moduli) for _ in range(count)]
    return g, elts
