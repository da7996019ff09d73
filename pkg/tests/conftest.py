import pytest

from lrrfuse import make_focus_pair, save_image, synthetic_pattern


@pytest.fixture(scope="session")
def pattern():
    """Deterministic 128x128 structured test image."""
    return synthetic_pattern(0)


@pytest.fixture(scope="session")
def focus_pair(pattern):
    """Noiseless (focus-right, focus-left) sources for the pattern."""
    return make_focus_pair(pattern)


@pytest.fixture()
def small_pair_paths(tmp_path):
    """A 48x48 synthetic focus pair plus its ground truth, on disk."""
    gt = synthetic_pattern(3, 48, 48)
    right, left = make_focus_pair(gt)
    paths = {}
    for name, img in (("gt", gt), ("right", right), ("left", left)):
        p = tmp_path / f"{name}.png"
        save_image(img, p)
        paths[name] = p
    return paths
