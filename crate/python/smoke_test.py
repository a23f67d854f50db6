"""Smoke test for the locvol extension module.

Build and install with `pip install --no-build-isolation crates/py`, then run
`python python/smoke_test.py`.
"""

import math

import locvol


def main() -> None:
    market = locvol.MarketParams(r=0.05, q=0.0, s_star=100.0, t_star=0.0, expiry=1.0)
    flat = locvol.VolCurve.constant(0.2)

    exact = locvol.bs_closed_form(market, 0.2, 100.0, 1.0)
    assert abs(exact - 10.450583572185565) < 1e-9, exact
    fd = locvol.price(flat, market, 100.0)
    assert abs(fd - exact) / exact < 1e-3, (fd, exact)

    strikes, prices = locvol.dupire_slice(flat, market, 70.0, 135.0)
    assert len(strikes) == len(prices) > 10
    assert all(b < a for a, b in zip(prices, prices[1:]))

    recovered = locvol.invert_dupire(flat, market, 70.0, 135.0)
    worst = max(abs(s - 0.2) for s in recovered.sigma())
    assert worst < 2e-3, worst

    weights = locvol.carleman_weights()
    assert weights["psi0"][0] == 0.0 and weights["psi0"][-1] == 0.0
    assert weights["separation_holds"]

    rows = locvol.stability(locvol.MarketParams(), epsilons=[0.01])
    assert len(rows) == 3 and all(math.isfinite(r["ratio"]) for r in rows)

    try:
        locvol.price(flat, market, 0.0)
    except ValueError:
        pass
    else:
        raise AssertionError("zero strike accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
