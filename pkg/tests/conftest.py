import numpy as np
import pytest

from sc2pcr.geometry import CorrespondenceSet
from sc2pcr.synthetic import random_rotation

# Five exact inliers (identity transform) plus two outliers crafted so that
# outlier 5 is first-order compatible with inliers 0 and 1 only, outlier 6
# with inlier 0 only, and the two outliers are mutually incompatible at
# d_thr = 0.1. Found by seeded search, frozen here; verified in test_compat.
TOY_D_THR = 0.1

TOY_SOURCE = np.array([
    [0.0, 0.0, 0.0],
    [2.0, 0.0, 0.0],
    [0.0, 2.0, 0.0],
    [0.0, 0.0, 2.0],
    [1.5, 1.5, 1.5],
    [1.9175143572206919, 1.12369681633453, -0.25105834825620743],
    [2.035788221060587, 2.567499096931014, 1.505030506585972],
])

TOY_TARGET = np.array([
    [0.0, 0.0, 0.0],
    [2.0, 0.0, 0.0],
    [0.0, 2.0, 0.0],
    [0.0, 0.0, 2.0],
    [1.5, 1.5, 1.5],
    [1.8985122495427613, 0.23270318365761788, 1.124186055956943],
    [-0.06800354759937699, 1.970733272604233, 2.946917112548396],
])


@pytest.fixture
def toy_corrs() -> CorrespondenceSet:
    return CorrespondenceSet(TOY_SOURCE, TOY_TARGET)


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def random_transform(rng: np.random.Generator):
    from sc2pcr.geometry import RigidTransform

    return RigidTransform(random_rotation(rng), rng.uniform(-2.0, 2.0, size=3))


def rotation_angle_rad(r_a: np.ndarray, r_b: np.ndarray) -> float:
    """Geodesic angle between rotations, accurate near zero.

    Uses ||Ra^T Rb - I||_F = 2*sqrt(2)*sin(theta/2), which resolves angles
    far below the ~1e-8 rad floor of the arccos-of-trace formula.
    """
    q = r_a.T @ r_b
    s = np.linalg.norm(q - np.eye(3)) / (2.0 * np.sqrt(2.0))
    return 2.0 * np.arcsin(min(1.0, s))
