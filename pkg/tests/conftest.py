from __future__ import annotations

import hypothesis.strategies as st
from hypothesis import HealthCheck, settings

from plmonodromy.group_ring import GeneratorSet, GroupElem, RingElem
from plmonodromy.omega_linalg import OmegaMatrix, OmegaVector

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FREE3 = GeneratorSet.free("g1", "g2", "g3")
TORSION = GeneratorSet(["g1", "g2", "g3"], [None, 2, 3])


def exponents(gens: GeneratorSet, lo: int = -3, hi: int = 3):
    return st.tuples(*[st.integers(lo, hi) for _ in gens.names])


def group_elems(gens: GeneratorSet = FREE3, lo: int = -3, hi: int = 3):
    return exponents(gens, lo, hi).map(lambda e: GroupElem(gens, e))


def ring_elems(gens: GeneratorSet = FREE3, max_terms: int = 4, lo: int = -3, hi: int = 3):
    terms = st.dictionaries(exponents(gens, lo, hi), st.integers(-5, 5), max_size=max_terms)
    return terms.map(lambda d: RingElem(gens, d))


def vectors(gens: GeneratorSet, labels, max_terms: int = 3):
    return st.lists(ring_elems(gens, max_terms), min_size=len(labels), max_size=len(labels)).map(
        lambda xs: OmegaVector(gens, labels, xs)
    )


def matrices(gens: GeneratorSet, labels, max_terms: int = 3):
    k = len(labels)
    rows = st.lists(st.lists(ring_elems(gens, max_terms), min_size=k, max_size=k), min_size=k, max_size=k)
    return rows.map(lambda r: OmegaMatrix(gens, labels, r))
