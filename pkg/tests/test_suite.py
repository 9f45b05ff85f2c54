import math

import pytest

from contactroll import suite as S
from contactroll.errors import ConfigError
from contactroll.identities import identity_suite
from contactroll.report import ResidualReport


def test_identity_suite_passes():
    rep = identity_suite(seed=3, samples=200)
    assert rep.all_passed, [r.check_id for r in rep if not r.passed]


def test_identity_suite_tight_tolerance_fails():
    # 1e-14 is below the rounding floor of the wedge identities
    rep = identity_suite(seed=0, samples=1000, tol=1e-14, correspondence=False)
    assert not rep.all_passed


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        S.ScenarioConfig.from_dict({"grid": "2x2x2", "colour": "red"})


def test_config_echo_round_trip():
    cfg = S.ScenarioConfig.from_dict({"sigma": "1-0.5i", "grid": [2, 3, 1], "checks": "eq4,R1"})
    echo = cfg.echo()
    again = S.ScenarioConfig.from_dict(echo)
    assert again.sigma == cfg.sigma and again.grid == (2, 3, 1) and again.checks == ("eq4", "R1")


def test_nonfinite_records_fail_and_serialize():
    rep = ResidualReport()
    rep.add("R3", (0, 0, 0), math.nan, 1.0, math.nan, 1e-5)
    rep.add("R1.1", (0, 0, 0), 0.0, 1.0, 0.0, 1e-7)
    d = rep.to_dict()
    assert d["summary"] == {"total": 2, "passed": 1, "max_rel_residual": None}
    assert d["records"][1]["rel"] is None


def test_cascade_records_at_one_point():
    cfg = S.ScenarioConfig(grid=(1, 1, 1), checks=("F",)).normalized()
    rep = S.run_report(cfg)
    assert rep.by_id("F.rank1")[0].passed
    assert rep.by_id("F.det.leading.abs")[0].passed
    assert not rep.by_id("R3")[0].passed


def test_sphere_default_checks_pass():
    cfg = S.ScenarioConfig(scenario="sphere", sigma="0.5i", grid=(1, 2, 1)).normalized()
    assert S.run_report(cfg).all_passed
