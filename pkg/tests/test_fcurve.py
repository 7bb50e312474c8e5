import numpy as np
import pytest

from fsieve.fcurve import (
    Curve,
    FunctionalSeries,
    Grid,
    GridMismatchError,
    center,
    fourier_basis,
    fourier_basis_matrix,
    gram,
    inner_product,
    norm,
    read_csv,
    synthesize,
    write_csv,
)


def trapezoid_error_bound(f2_max, T):
    # |E| <= (b - a) h^2 max|f''| / 12
    h = 1.0 / (T - 1)
    return h**2 * f2_max / 12


def curve(grid, f):
    return Curve(grid, f(grid.points))


class TestGrid:
    def test_uniform_weights_sum_to_one(self, grid):
        assert grid.points[0] == 0.0 and grid.points[-1] == 1.0
        assert abs(grid.weights.sum() - 1.0) < 1e-12
        assert grid.weights[0] == pytest.approx(0.025)
        assert grid.weights[1] == pytest.approx(0.05)

    @pytest.mark.parametrize(
        "points, weights",
        [
            ([0.0, 0.5, 0.9], [0.25, 0.5, 0.25]),  # does not end at 1
            ([0.0, 0.6, 0.5, 1.0], [0.1, 0.4, 0.4, 0.1]),  # not increasing
            ([0.0, 0.5, 1.0], [0.25, 0.0, 0.25]),  # zero weight
        ],
    )
    def test_invalid(self, points, weights):
        with pytest.raises(ValueError):
            Grid(np.array(points), np.array(weights))

    def test_equality_by_value(self):
        assert Grid.uniform(11) == Grid.uniform(11)
        assert Grid.uniform(11) != Grid.uniform(21)
        assert hash(Grid.uniform(11)) == hash(Grid.uniform(11))


class TestInnerProduct:
    def test_constants(self, grid):
        one = curve(grid, np.ones_like)
        assert abs(inner_product(one, one) - 1.0) < 1e-12

    def test_sin_cos_orthogonal(self, grid):
        s = curve(grid, lambda t: np.sqrt(2) * np.sin(2 * np.pi * t))
        c = curve(grid, lambda t: np.sqrt(2) * np.cos(2 * np.pi * t))
        assert abs(inner_product(s, c)) < 1e-3

    def test_tau_times_tau_squared(self, grid):
        # oracle: int_0^1 t^3 dt = 1/4; (t^3)'' = 6t <= 6
        x = curve(grid, lambda t: t)
        y = curve(grid, lambda t: t**2)
        assert abs(inner_product(x, y) - 0.25) <= trapezoid_error_bound(6.0, grid.size)

    def test_grid_mismatch(self, grid):
        other = Grid.uniform(11)
        with pytest.raises(GridMismatchError):
            inner_product(curve(grid, np.ones_like), curve(other, np.ones_like))


class TestNorm:
    def test_zero_and_constant(self, grid):
        assert norm(curve(grid, np.zeros_like)) == 0.0
        assert norm(curve(grid, lambda t: 2 + 0 * t)) == pytest.approx(2.0, abs=1e-12)

    def test_identity_function(self, grid):
        # oracle: sqrt(int t^2) = 3^-1/2; (t^2)'' = 2
        val = norm(curve(grid, lambda t: t))
        bound = trapezoid_error_bound(2.0, grid.size)
        assert abs(val**2 - 1 / 3) <= bound * (1 + 1e-9)
        assert abs(val - 3**-0.5) < 1e-3

    def test_cauchy_schwarz_and_bilinearity(self, grid, rng):
        for _ in range(50):
            x, y, z = (Curve(grid, rng.standard_normal(grid.size)) for _ in range(3))
            assert abs(inner_product(x, y)) <= norm(x) * norm(y) * (1 + 1e-12)
            a, b = rng.standard_normal(2)
            lhs = inner_product(a * x + b * y, z)
            rhs = a * inner_product(x, z) + b * inner_product(y, z)
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


class TestCenter:
    def test_identical_curves(self, grid):
        c = curve(grid, np.sin)
        series = FunctionalSeries.from_curves([c] * 4)
        centred, mean = center(series)
        assert np.all(centred.values == 0)
        np.testing.assert_allclose(mean.values, c.values)

    def test_plus_minus(self, grid):
        v = curve(grid, lambda t: t - 0.3)
        series = FunctionalSeries.from_curves([v, -1 * v])
        centred, mean = center(series)
        np.testing.assert_array_equal(centred.values, series.values)
        np.testing.assert_array_equal(mean.values, 0)

    def test_column_sums_vanish(self, grid, rng):
        series = FunctionalSeries(grid, rng.standard_normal((5, grid.size)) + 3)
        centred, _ = center(series)
        assert np.max(np.abs(centred.values.sum(axis=0))) <= 1e-12


class TestFourierBasis:
    def test_single_constant(self, grid):
        (f1,) = fourier_basis(grid, 1)
        np.testing.assert_array_equal(f1.values, 1.0)

    def test_gram_near_identity(self, grid):
        B = fourier_basis_matrix(grid, 3)
        G = gram(B, B, grid)
        assert np.max(np.abs(G - np.eye(3))) < 1e-2

    def test_f2_quarter(self):
        g = Grid.uniform(5)  # contains 0.25
        f2 = fourier_basis(g, 2)[1]
        assert f2.values[1] == pytest.approx(np.sqrt(2), abs=1e-15)

    def test_ordering(self, grid):
        B = fourier_basis_matrix(grid, 5)
        t = grid.points
        np.testing.assert_allclose(B[2], np.sqrt(2) * np.cos(2 * np.pi * t))
        np.testing.assert_allclose(B[3], np.sqrt(2) * np.sin(4 * np.pi * t))
        np.testing.assert_allclose(B[4], np.sqrt(2) * np.cos(4 * np.pi * t))


class TestSynthesize:
    def test_zero_and_unit(self, grid):
        basis = fourier_basis(grid, 4)
        assert np.all(synthesize(np.zeros(4), basis).values == 0)
        np.testing.assert_array_equal(synthesize([1, 0, 0, 0], basis).values, basis[0].values)

    def test_sum(self, grid):
        basis = fourier_basis(grid, 2)
        t = grid.points
        np.testing.assert_allclose(synthesize([1, 1], basis).values, 1 + np.sqrt(2) * np.sin(2 * np.pi * t))

    def test_length_mismatch(self, grid):
        with pytest.raises(ValueError):
            synthesize([1.0, 2.0], fourier_basis(grid, 3))

    def test_project_back(self, grid, rng):
        # recovery is exact up to the Gram matrix of the sampled basis
        basis = fourier_basis(grid, 5)
        c = rng.standard_normal(5)
        x = synthesize(c, basis)
        proj = np.array([inner_product(x, f) for f in basis])
        G = gram(fourier_basis_matrix(grid, 5), fourier_basis_matrix(grid, 5), grid)
        np.testing.assert_allclose(proj, G @ c, atol=1e-12)
        assert np.max(np.abs(proj - c)) < 0.05 * np.max(np.abs(c)) + 1e-2


class TestCsv:
    def test_round_trip_exact(self, tmp_path, random_series):
        path = tmp_path / "x.csv"
        write_csv(random_series, path)
        back = read_csv(path)
        np.testing.assert_array_equal(back.values, random_series.values)
        assert back.grid == random_series.grid
        assert path.read_text().startswith("tau,0,")

    def test_comment_lines_skipped(self, tmp_path, random_series):
        path = tmp_path / "x.csv"
        write_csv(random_series, path)
        path.write_text("# manifest abc\n" + path.read_text())
        assert read_csv(path).n == random_series.n

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,0,1\n1,2,3\n")
        with pytest.raises(ValueError):
            read_csv(path)
