import numpy as np
import pytest

from gwsplice.nodal_surface import DomainComponent, NodedSurface, SpecialPoint


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def P(comp, point):
    return SpecialPoint(comp, point)


def surface(genera: dict, marked=(), nodes=(), ordered=True, energy=None) -> NodedSurface:
    """Build a surface from {id: genus}, [(comp, point)] and [((c, p), (c, p))]."""
    comps = tuple(DomainComponent(cid, g) for cid, g in genera.items())
    mk = tuple(P(*m) for m in marked)
    nd = tuple((P(*x), P(*y)) for x, y in nodes)
    return NodedSurface(comps, mk, nd, ordered, energy)
