import numpy as np
import pytest

from hyperstokes import (
    HyperKernel,
    bent_rod,
    discretize,
    helix,
    octahedron_frame,
    resistance,
    rod,
    tripod_tetrahedron,
)

ELL = 0.1
SUITE_RESOLUTIONS = (8, 16)


def suite_bodies():
    return {
        "rod": rod(1.0),
        "bent_rod": bent_rod(90.0, 0.5),
        "tripod": tripod_tetrahedron(1.0),
        "octahedron": octahedron_frame(1.0),
        "helix": helix(0.2, 0.1, 3),
    }


@pytest.fixture(scope="session")
def kernel():
    return HyperKernel(ell=ELL)


@pytest.fixture(scope="session")
def bodies():
    return suite_bodies()


@pytest.fixture(scope="session")
def suite_solutions(bodies, kernel):
    """(dbody, ResistanceSet) for every suite body at resolutions 8 and 16."""
    out = {}
    for name, body in bodies.items():
        for res in SUITE_RESOLUTIONS:
            dbody = discretize(body, res)
            out[(name, res)] = (dbody, resistance(dbody, kernel))
    return out


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
