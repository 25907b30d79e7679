"""
Gradient-check suite and parameter accounting
"""

import pytest

from irconstyle.diagnostics import GRADIENT_SUITE, parameter_report, run_gradient_suite

from conftest import tiny_train_config


class TestGradientSuite:

    def test_every_check_passes(self):
        results = run_gradient_suite()
        assert set(results) == set(GRADIENT_SUITE)
        failed = {name: r["max_rel_err"] for name, r in results.items() if not r["passed"]}
        assert not failed

    def test_unknown_check(self):
        with pytest.raises(KeyError):
            run_gradient_suite(["no_such_check"])


class TestParameterReport:

    def test_totals_add_up(self):
        report = parameter_report(tiny_train_config())
        assert report["inference_total"] == report["constyle"] + report["restoration"] + report["injectors"]
        assert report["momentum_encoder"] == report["constyle"]
        assert set(report["reference_net"]) >= {"restoration", "injectors"}
