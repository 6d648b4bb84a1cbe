import math

import numpy as np
import pytest

import dante


def test_onset_and_peak():
    pct = [1.0] * 35
    for t in range(9, 14):
        pct[t] = 5.0
    pct[11] = 6.04
    assert dante.compute_onset(pct, 2.0) == 10
    intensity, weeks = dante.compute_peak(pct)
    assert intensity == pytest.approx(6.0)
    assert weeks == [12]
    assert dante.compute_onset(pct, 7.0) is None


def test_multibin_score_window():
    probs = [1.0 / 131] * 131
    pct = [1.0] * 35
    pct[5] = 2.5
    assert dante.multibin_score("1 wk ahead", probs, pct, nobs=5) == pytest.approx(11 / 131)
    with pytest.raises(ValueError):
        dante.multibin_score("6 wk ahead", probs, pct)


def test_region9_aggregation():
    ili = np.array([3.284, 2.498, 4.341, 1.434]).reshape(4, 1, 1) / 100
    out = dante.aggregate(ili, ["Arizona", "California", "Hawaii", "Nevada"], [9, 9, 9, 9],
                          [6407774, 37320903, 1363963, 2702464])
    assert out["regions"] == ["HHS Region 9", "US National"]
    assert 100 * out["values"][0, 0, 0] == pytest.approx(2.596, abs=1e-3)


def test_prior_and_fit():
    prior = dante.sample_prior(2, 2, 6, seed=3)
    assert len(prior["names"]) == len(prior["values"])
    assert np.all(np.isfinite(prior["values"]))

    rng = np.random.default_rng(0)
    y = 0.02 + 0.01 * rng.random((2, 2, 6))
    y[1, 1, 4:] = np.nan
    res = dante.fit(y, chains=2, iterations=400, thin=2, burnin=50, seed=5)
    assert res["draws"].shape == (2 * 150, len(res["names"]))
    lam = res["draws"][:, res["names"].index("lambda[1]")]
    assert np.all(lam > 0)
    again = dante.fit(y, chains=2, iterations=400, thin=2, burnin=50, seed=5)
    assert np.array_equal(res["draws"], again["draws"])


def test_volatility():
    v = dante.season_volatility([1.0, 2.0, 4.0, 3.0])
    assert v == pytest.approx(math.sqrt(2.0) / math.sqrt(5.0 / 3.0))


def test_cli_exit_codes(tmp_path):
    code, _, err = dante.run_cli(["bogus"])
    assert code == 1
    code, _, err = dante.run_cli(["clean", "--input", str(tmp_path / "none.csv"), "--out", str(tmp_path / "o.csv")])
    assert code == 2
    assert "none.csv" in err
