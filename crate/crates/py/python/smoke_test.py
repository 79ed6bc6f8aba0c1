"""Smoke test for the concat_calc extension module."""

import json
import math

import concat_calc as cc


def main():
    heat = cc.Operator("t - x1^2")
    assert heat.dim == 1 and heat.t_degree == 1
    assert heat.decide()

    wave = cc.Operator("t^2 - x1^2")
    assert not wave.decide()
    cert = wave.certify()
    assert not cert.is_closure
    assert cert.xi == ["0"]
    ok, checks = cert.verify(wave)
    assert ok, checks
    assert all(status == "pass" for _, status, _ in checks)

    c = cc.Operator("t^2 - 1").certify()
    assert c.residual_comb == ["-2"]
    doc = json.loads(c.to_json())
    assert doc["schema"] == "concat-cert/1"
    again = cc.Certificate.from_json(c.to_json())
    assert again.verify(cc.Operator("t^2 - 1"))[0]
    assert not again.verify(cc.Operator("t^2 - 4"), crosscheck=False)[0]

    schrodinger = cc.Operator("t - i*x1^2")
    assert schrodinger.certify(mode="oscillatory").is_closure

    assert cc.normalize("1*t^2 - 1") == "t^2 - 1"

    re, im, err = cc.pair("exp(2*t)", "bump(1)")
    assert math.isclose(re, 0.601022792406636885, rel_tol=1e-13) and im == 0.0 and err < 1e-12

    try:
        cc.Operator("t^-1")
    except ValueError as e:
        assert "syntax" in str(e)
    else:
        raise AssertionError("expected a syntax error")

    results = cc.selftest()
    assert all(passed for _, passed, _ in results), results
    print("smoke test passed:", len(results), "selftest properties")


if __name__ == "__main__":
    main()
