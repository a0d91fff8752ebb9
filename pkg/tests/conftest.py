import pytest

from cylstereo import cavern_screen, centered_head, load_bundled_scene


@pytest.fixture(scope="session")
def desk_screen():
    """CAVERN geometry at 1 px/degree, 10 px/m: the culling-test scale."""
    return cavern_screen(270, 23)


@pytest.fixture(scope="session")
def full_screen():
    return cavern_screen()


@pytest.fixture(scope="session")
def center_head(desk_screen):
    return centered_head(desk_screen)


@pytest.fixture(scope="session")
def depth_rings():
    return load_bundled_scene("depth-rings")


@pytest.fixture(scope="session")
def checker_room():
    return load_bundled_scene("checker-room")


@pytest.fixture(scope="session")
def marker_sweep():
    return load_bundled_scene("marker-sweep")
