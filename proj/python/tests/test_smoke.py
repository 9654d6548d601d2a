import os
from fractions import Fraction
from pathlib import Path

import pytest

import cwmarket as cw

FIXTURE = Path(os.environ.get("CWM_DATA_DIR", Path(__file__).resolve().parents[2] / "data")) / "steel_synthetic_2008-10-22.csv"


def test_distribution_table():
    t = cw.independent_pmf(10)
    assert t.pair_sums == [-5, -3, 3, 13, 27, 45]
    assert t.counts == [252, 420, 240, 90, 20, 2]
    assert sum(t.probs) == pytest.approx(1.0)
    assert t.to_csv().startswith("T,H,abs_spin_sum,count,probability\n")


def test_spin_core():
    assert cw.pair_sum([1] * 10) == 45
    assert cw.hamiltonian([1] * 10) == Fraction(-9, 2)
    assert cw.enumerate_shells(100)[0].multiplicity == 100891344545564193334812497256
    with pytest.raises(cw.DomainError):
        cw.pair_sum([1, 0, -1])


def test_kernels_and_stationarity():
    k = cw.hamiltonian_kernel(6, 2.0, 6)
    assert sum(k.row.probs) == pytest.approx(1.0)
    assert cw.detailed_balance_residual(8, 1.0) < 1e-12
    direct = cw.conditional_moments(10, 1.0, 10)
    logz = cw.conditional_moments(10, 1.0, 10, "logZ-derivative")
    assert logz.mean == pytest.approx(direct.mean, rel=1e-6)
    with pytest.raises(cw.SingularityError):
        cw.conditional_moments(4, 1.0, 2, "logZ-derivative")


def test_meanfield():
    r = cw.solve_magnetization(4.0, 1.0)
    assert len(r.roots) == 3
    assert r.roots[0] == -r.roots[2]
    assert cw.stability_threshold(2.0) == 1.0
    assert cw.locate_bifurcation(1.0, 1.0, 3.0) == pytest.approx(2.0, abs=1e-6)


def test_simulation_is_seeded():
    a = cw.simulate(8, 1.0, 200, seed=5)
    b = cw.simulate(8, 1.0, 200, seed=5)
    assert len(a) == 201
    assert a.configs == b.configs
    assert a.generator == "mt19937_64"


def test_fixture_independence_test():
    series = cw.load_series(str(FIXTURE))
    assert len(series) == 20
    report = cw.test_independence(series.pair_sums(), 10, "-5|-3|3|13..45", 0.05)
    assert report.observed == [2, 13, 4, 1]
    assert report.statistic == pytest.approx(5.29, abs=0.01)
    assert report.p_value == pytest.approx(0.15175, abs=5e-4)
    assert not report.reject


def test_errors():
    with pytest.raises(cw.FormatError):
        cw.load_series("/nonexistent.csv")
    with pytest.raises(cw.Error):
        cw.ClassScheme.parse(10, "-5|-3")
