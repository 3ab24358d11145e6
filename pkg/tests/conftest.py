import pytest

from src.constructions import FamilyKind, build_default, regular_octagon_surface, square_torus
from src.geom_core import PlanarPolygon, get_epsilon, regular_polygon, set_epsilon
from src.surface import EdgePairing, build_surface


@pytest.fixture(autouse=True)
def restore_epsilon():
    eps = get_epsilon()
    yield
    set_epsilon(eps)


@pytest.fixture(scope="session")
def torus():
    return square_torus()


@pytest.fixture(scope="session")
def marked_torus():
    return square_torus(marked=True)


@pytest.fixture(scope="session")
def octagon():
    return regular_octagon_surface()


@pytest.fixture(scope="session")
def dihedral4():
    return build_default(FamilyKind.DIHEDRAL, 4)


@pytest.fixture(scope="session")
def dihedral3():
    return build_default(FamilyKind.DIHEDRAL, 3)


@pytest.fixture(scope="session")
def cyclic4():
    return build_default(FamilyKind.CYCLIC, 4)


@pytest.fixture(scope="session")
def cyclic3():
    return build_default(FamilyKind.CYCLIC, 3)


@pytest.fixture(scope="session")
def split_octagon():
    """Regular octagon with side 0 cut at 1/3 and side 4 at 2/3, so the cut
    points glue into one flat vertex class."""
    v = regular_polygon(8, 1.0).vertices
    cut0 = v[0] + (v[1] - v[0]) * (1 / 3)
    cut4 = v[4] + (v[5] - v[4]) * (2 / 3)
    polygon = PlanarPolygon((v[0], cut0, v[1], v[2], v[3], v[4], cut4, v[5], v[6], v[7]))
    pairs = [((0, a), (0, b)) for a, b in ((0, 6), (1, 5), (2, 7), (3, 8), (4, 9))]
    return build_surface([polygon], EdgePairing(pairs))
