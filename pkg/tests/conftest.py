import pytest

from llschain import ChainCurve, GenSpec, all_multidegrees, from_chain, gen_simple
from llschain.chain_model import canonical_matrix
from llschain.exactla import Subspace

# (d, r) combinations for the seeded corpus: d = 1..5, r = 0..min(2, d).
CORPUS_COMBOS = [(d, r) for d in range(1, 6) for r in range(0, min(2, d) + 1)]
CORPUS_SIZE = 100


def corpus_specs() -> list[GenSpec]:
    specs = []
    idx = 0
    while len(specs) < CORPUS_SIZE:
        d, r = CORPUS_COMBOS[idx % len(CORPUS_COMBOS)]
        specs.append(GenSpec(d=d, r=r, seed=10_000 + 97 * idx))
        idx += 1
    return specs


@pytest.fixture(scope="session")
def corpus():
    """100 seeded simple-by-construction series across all (d, r) combos."""
    return [gen_simple(spec) for spec in corpus_specs()]


@pytest.fixture(scope="session")
def worked_instance():
    """The hand-checked degree-1 series: one section (1, 1, 1) at (1, 0, 0),
    spaces spanned by its canonical pushes."""
    chain = ChainCurve(1)
    grid = all_multidegrees(1)
    start = grid[0]
    section = (1, 0)  # coordinates of the constant section (1, 1, 1)
    spaces = {
        md: Subspace.span([section], 2).apply(canonical_matrix(chain, start, md))
        for md in grid
    }
    return from_chain(chain, 0, spaces)
