import numpy as np
import pytest

from cascadesim import (ConfigurationError, InitialLaw, QuantileTableLaw,
                        UniformPiece, law_mean, load_quantile_table,
                        sample_initial)
from cascadesim.streams import INIT, substream


def example_density_f():
    # quarter of the mass near the boundary, the rest comfortably away
    return InitialLaw((UniformPiece(0.05, 0.15, 0.25),
                       UniformPiece(0.60, 1.00, 0.75)))


def example_density_g():
    return InitialLaw((UniformPiece(0.10, 0.30, 1.0),))


def test_law_validation():
    with pytest.raises(ConfigurationError):
        UniformPiece(0.5, 0.5, 1.0)          # empty interval
    with pytest.raises(ConfigurationError):
        UniformPiece(0.1, 0.2, 0.0)          # zero weight
    with pytest.raises(ConfigurationError):
        InitialLaw((UniformPiece(0.1, 0.2, 0.5),))   # weights not normalized
    with pytest.raises(ConfigurationError):
        InitialLaw((UniformPiece(-0.1, 0.2, 1.0),))  # off the positive axis
    with pytest.raises(ConfigurationError):
        InitialLaw((UniformPiece(0.0, 0.2, 1.0),))   # boundary mass needs the flag
    InitialLaw((UniformPiece(0.0, 0.2, 1.0),), allow_boundary=True)


def test_degenerate_interval_sampling():
    law = InitialLaw((UniformPiece(0.5, 0.5 + 1e-12, 1.0),))
    draws = sample_initial(law, 3, substream(1, 0, INIT))
    assert np.all(np.abs(draws - 0.5) <= 1e-12)


def test_example_density_piece_mass():
    law = example_density_f()
    draws = sample_initial(law, 10**5, substream(7, 0, INIT))
    mass = np.mean((draws >= 0.05) & (draws <= 0.15))
    assert abs(mass - 0.25) < 0.01


def test_two_piece_mixture_mean():
    law = InitialLaw((UniformPiece(1.0, 2.0, 0.3), UniformPiece(3.0, 4.0, 0.7)))
    draws = sample_initial(law, 10**5, substream(11, 0, INIT))
    assert abs(draws.mean() - 2.90) < 0.02    # 0.3*1.5 + 0.7*3.5
    assert law_mean(law) == pytest.approx(2.90, abs=1e-15)


def test_law_mean_values():
    # integral of x f(x): 2.5*(0.15^2-0.05^2)/2 + 1.875*(1.0^2-0.6^2)/2
    assert law_mean(example_density_f()) == pytest.approx(0.625, abs=1e-15)
    assert law_mean(example_density_g()) == pytest.approx(0.2, abs=1e-15)
    eps = 1e-6
    law = InitialLaw((UniformPiece(1.0, 1.0 + eps, 1.0),))
    assert law_mean(law) == pytest.approx(1.0 + eps / 2, abs=1e-15)


def test_sampling_determinism_and_seed_sensitivity():
    law = example_density_f()
    a = sample_initial(law, 1000, substream(42, 0, INIT))
    b = sample_initial(law, 1000, substream(42, 0, INIT))
    c = sample_initial(law, 1000, substream(43, 0, INIT))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_samples_in_support_and_off_boundary():
    law = example_density_f()
    draws = sample_initial(law, 10**5, substream(3, 1, INIT))
    in_first = (draws >= 0.05) & (draws <= 0.15)
    in_second = (draws >= 0.60) & (draws <= 1.00)
    assert np.all(in_first | in_second)
    assert np.all(draws != 0.0)


def test_empirical_mean_matches_analytic():
    law = example_density_f()
    draws = sample_initial(law, 10**6, substream(5, 0, INIT))
    tol = 4.0 * draws.std() / 10**3
    assert abs(draws.mean() - law_mean(law)) < tol


def test_quantile_table_law(tmp_path):
    # inverse CDF of Uniform[2, 4]
    path = tmp_path / "table.txt"
    path.write_text("0.0,2.0\n0.5,3.0\n1.0,4.0\n")
    law = load_quantile_table(path)
    assert law.mean() == pytest.approx(3.0)
    draws = law.sample(20000, substream(9, 0, INIT))
    assert draws.min() >= 2.0 and draws.max() <= 4.0
    assert abs(draws.mean() - 3.0) < 0.02


def test_quantile_table_rejects_bad_input(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("0.0,0.0\n1.0,1.0\n")   # mass touching the boundary
    with pytest.raises(ConfigurationError):
        load_quantile_table(bad)
    with pytest.raises(ConfigurationError):
        QuantileTableLaw(u=(0.0, 0.4, 0.4, 1.0), q=(1.0, 2.0, 3.0, 4.0))
    with pytest.raises(ConfigurationError):
        QuantileTableLaw(u=(0.1, 1.0), q=(1.0, 2.0))


def test_sample_size_validation():
    with pytest.raises(ConfigurationError):
        sample_initial(example_density_f(), 0, substream(1, 0, INIT))
