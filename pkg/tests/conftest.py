"""Shared fixtures: the hand-checked triangle bifiltration and random corpora."""

from __future__ import annotations

from dataclasses import dataclass

import pytest

import morsebetti as mb

# The standing small fixture: triangle boundary, vertices entering at the
# origin and the two unit grades, edges at the joins.  Cell ids follow the
# dotted-vertex convention of the simplicial builder.
T_VERTEX_GRADES = {"v1": (0, 0), "v2": (1, 0), "v3": (0, 1)}
T_EDGES = [("v1", "v2"), ("v1", "v3"), ("v2", "v3")]


def make_triangle_fixture(p: int = 2) -> mb.FiltrationDocument:
    return mb.lower_star(T_EDGES, T_VERTEX_GRADES, n=2, p=p)


@pytest.fixture(scope="session")
def triangle_doc() -> mb.FiltrationDocument:
    return make_triangle_fixture(2)


@pytest.fixture(scope="session")
def triangle_doc_f3() -> mb.FiltrationDocument:
    return make_triangle_fixture(3)


def bifil_params(seed: int) -> mb.GeneratorParams:
    return mb.GeneratorParams(
        n=2,
        vertices=5 + seed % 6,
        top_dim=2,
        fill_probs=(0.55, 0.35),
        grade_range=4,
        seed=seed,
    )


def trifil_params(seed: int) -> mb.GeneratorParams:
    return mb.GeneratorParams(
        n=3,
        vertices=5 + seed % 4,
        top_dim=2,
        fill_probs=(0.5, 0.3),
        grade_range=3,
        seed=seed,
    )


def oneparam_params(seed: int) -> mb.GeneratorParams:
    return mb.GeneratorParams(
        n=1,
        vertices=6 + seed % 5,
        top_dim=2,
        fill_probs=(0.5, 0.35),
        grade_range=6,
        seed=seed,
    )


BIFIL_SEEDS = tuple(range(1000, 1200))  # 200 bifiltrations, <= 10 vertices
TRIFIL_SEEDS = tuple(range(3000, 3100))  # 100 3-parameter, <= 8 vertices
ONEPARAM_SEEDS = tuple(range(5000, 5100))  # 100 1-parameter


@dataclass
class FixtureBundle:
    """One corpus member with everything cheap enough to keep around."""

    seed: int
    p: int
    doc: mb.FiltrationDocument
    matching: mb.DiscreteVectorField
    morse: mb.MorseComplexResult
    table: mb.BettiTable
    morse_table: mb.BettiTable

    @property
    def filtration(self) -> mb.OneCriticalFiltration:
        return self.doc.filtration

    @property
    def qmax(self) -> int:
        return self.table.qmax


def build_bundle(params: mb.GeneratorParams, p: int) -> FixtureBundle:
    doc = mb.generate_random(params, p=p)
    F = doc.filtration
    qmax = max(F.complex.top_dim, 0)
    table = mb.betti_tables(F, qmax)
    V = mb.build_matching(F)
    morse = mb.morse_complex(F, V)
    morse_table = mb.betti_tables(morse.filtration(), qmax)
    return FixtureBundle(params.seed, p, doc, V, morse, table, morse_table)


@pytest.fixture(scope="session")
def bifil_corpus() -> dict[int, list[FixtureBundle]]:
    return {
        p: [build_bundle(bifil_params(seed), p) for seed in BIFIL_SEEDS]
        for p in (2, 3)
    }


@pytest.fixture(scope="session")
def trifil_corpus() -> dict[int, list[FixtureBundle]]:
    return {
        p: [build_bundle(trifil_params(seed), p) for seed in TRIFIL_SEEDS]
        for p in (2, 3)
    }


@pytest.fixture(scope="session")
def oneparam_corpus() -> list[FixtureBundle]:
    return [build_bundle(oneparam_params(seed), 2) for seed in ONEPARAM_SEEDS]
