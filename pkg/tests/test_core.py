import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dgsnmf.core import (
    DgMap,
    FactorPair,
    HyperCube,
    SolverConfig,
    grid_to_index,
    index_to_grid,
    validate_cube,
)
from dgsnmf.errors import NegativeValueError, NonFiniteError, OutOfRangeError, ShapeMismatchError
from dgsnmf.synth import SceneSpec, generate


def test_valid_constant_cube():
    validate_cube(HyperCube(np.full((3, 4), 0.5), 2, 2))


def test_shape_mismatch():
    with pytest.raises(ShapeMismatchError):
        validate_cube(HyperCube(np.full((3, 3), 0.5), 2, 2))


def test_negative_entry_reports_index():
    data = np.full((3, 4), 0.5)
    data[1, 2] = -0.1
    with pytest.raises(NegativeValueError) as err:
        validate_cube(HyperCube(data, 2, 2))
    assert err.value.index == (1, 2)


@pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
def test_non_finite(bad):
    data = np.full((3, 4), 0.5)
    data[0, 3] = bad
    with pytest.raises(NonFiniteError):
        validate_cube(HyperCube(data, 2, 2))


def test_values_above_one_are_accepted():
    validate_cube(HyperCube(np.full((2, 4), 1.7), 2, 2))


@given(st.integers(1, 50), st.integers(1, 50), st.data())
def test_pixel_grid_round_trip(width, height, data):
    n = data.draw(st.integers(0, width * height - 1))
    row, col = index_to_grid(n, width)
    assert 0 <= row < height and 0 <= col < width
    assert grid_to_index(row, col, width) == n


def test_image_layout_is_row_major():
    image = np.arange(2 * 3 * 4, dtype=float).reshape(2, 3, 4)
    cube = HyperCube.from_image(image)
    assert (cube.width, cube.height, cube.channels) == (3, 2, 4)
    for n in range(6):
        row, col = index_to_grid(n, cube.width)
        np.testing.assert_array_equal(cube.data[:, n], image[row, col])
    np.testing.assert_array_equal(cube.to_image(), image)


def test_cube_is_immutable():
    cube = HyperCube(np.ones((2, 4)), 2, 2)
    with pytest.raises(ValueError):
        cube.data[0, 0] = 3.0


def test_factor_pair_checks():
    with pytest.raises(ShapeMismatchError):
        FactorPair(np.ones((4, 2)), np.ones((3, 5)))
    with pytest.raises(NegativeValueError):
        FactorPair(np.ones((4, 2)), -np.ones((2, 5)))
    with pytest.warns(UserWarning):
        FactorPair(np.ones((2, 3)), np.ones((3, 5)))


def test_dgmap_range_enforced():
    with pytest.raises(OutOfRangeError):
        DgMap(np.ones(3), np.array([0.0, 0.5, 1.0]))
    m = DgMap.from_raw(np.array([1.0, 2.0, 3.0]))
    assert m.scaled[0] == 0.0 and m.scaled[-1] < 1.0


def test_solver_config_defaults_in_documented_ranges():
    c = SolverConfig()
    assert 0.005 <= c.sigma <= 0.08
    assert 1e-6 <= c.alpha <= 1e-4
    assert 1e-7 <= c.epsilon <= 1e-4
    assert c.beta == 1e-8
    assert 0.005 <= c.lam <= 0.9
    assert c.window == 3
    with pytest.raises(OutOfRangeError):
        SolverConfig(window=4)
    with pytest.raises(ValueError):
        SolverConfig(regularizer="l2")


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("noise", [0.0, 0.05])
def test_synth_cubes_validate(seed, noise):
    cube, _ = generate(SceneSpec(12, 9, 8, 3, 2, noise, seed))
    validate_cube(cube)
