import math

import pytest

import qpr

CONFIG = {
    "system": {
        "n": 2,
        "d": 2,
        "omega": [1.0, (1.0 + math.sqrt(5.0)) / 2.0],
        "gamma": 0.1,
        "tau": 1.2,
        "a": 1.0,
        "b": 2.0,
        "rho": 1.0,
        "r": 1.0,
        "f": [
            {"alpha": [1, 0], "k": [0, 0], "re": [0.0, -1.0]},
            {"alpha": [0, 1], "k": [0, 0], "re": [1.0, 0.0]},
            {"alpha": [0, 0], "k": [1, 0], "re": [0.5, 0.0]},
            {"alpha": [0, 0], "k": [-1, 0], "re": [0.5, 0.0]},
        ],
        "g": [],
    },
    "schedule": {"rho0": 1.0, "c0": 0.2, "kappa": 1.5, "K_trunc": 30,
                 "deg_max": 6, "m_max": 12, "p_tol": 1e-14},
    "epsilon": 0.001,
    "oracles": {"grid_size": 32, "residual_bound": 1e-8},
}


def test_average():
    out = qpr.average(CONFIG)
    assert max(abs(x) for x in out["x_star"]) < 1e-12
    imags = sorted(l["im"] for l in out["lambdas"])
    assert imags[0] == pytest.approx(-1.0)
    assert imags[1] == pytest.approx(1.0)
    assert out["beta0"] == pytest.approx(2.0)


def test_run_and_verify():
    rep = qpr.run(CONFIG)
    assert rep["converged"]
    assert rep["ledger_all_ok"]
    assert rep["residual"] <= 1e-8
    # effective forcing norms decrease strictly
    effs = [row["eff_p"] for row in rep["table"]]
    assert all(b < a for a, b in zip(effs, effs[1:]))
    resp = {"epsilon": rep["epsilon"], "response": rep["response"]}
    assert qpr.verify(CONFIG, resp) <= 1e-8


def test_sweep():
    cfg = dict(CONFIG)
    cfg["epsilon"] = {"hi": 0.05, "cells": 16}
    out = qpr.sweep(cfg, threads=2)
    assert len(out["cells"]) == 16
    flagged = sum(1 for c in out["cells"] if c["flagged"])
    width = 0.05 / 16
    assert out["excluded_measure"] == pytest.approx(flagged * width)


def test_utilities():
    closed = 2.0 * math.exp(-1.0) / (1.0 - math.exp(-1.0)) ** 2
    assert qpr.varpi(1, 1.0, 1.0) == pytest.approx(closed, abs=1e-6)
    assert qpr.varpi_upper_bound(1, 1.0, 1.0) >= qpr.varpi(1, 1.0, 1.0)

    plan = qpr.rescale_general(0.5, 1.0)
    assert plan["delta"] == pytest.approx(2.0)
    assert plan["a0"] == pytest.approx(1.0)
    assert plan["b0"] == pytest.approx(2.0)

    with pytest.raises(qpr.ConfigError):
        qpr.rescale_general(1.0, 0.5)


def test_config_error():
    bad = dict(CONFIG)
    bad["schedule"] = dict(CONFIG["schedule"], c0=0.7)
    with pytest.raises(qpr.ConfigError):
        qpr.run(bad)
