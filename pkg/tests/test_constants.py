import math

import mpmath as mp
import numpy as np

from chensieve.constants import (
    ConstantsLedger,
    compute_c0,
    compute_c1,
    compute_c2,
    eps0,
    ledger,
    zeta,
)
from chensieve.primes import build_prime_table, chebyshev


def test_zeta_closed_forms():
    assert abs(zeta(2).value - math.pi**2 / 6.0) < 1e-14
    mp.mp.dps = 30
    for s in (2, 3, 6, 4):
        b = zeta(s)
        assert abs(b.value - float(mp.zeta(s))) <= b.radius + 1e-15
        assert b.radius < 1e-12


def test_c0_below_pinned_bound(table_1m):
    b = compute_c0(table_1m)
    assert b.strictly_below(48.83215)
    assert b.radius < 1e-8
    # the pinned bound is tight: the value must sit just under it
    assert 48.83 < b.value < 48.83215


def test_c0_psi_delegation(table_1m):
    # the psi(113) sub-value equals direct prime-power summation
    direct = 0.0
    for p in [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59,
              61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113]:
        m = p
        while m <= 113:
            direct += math.log(p)
            m *= p
    assert abs(chebyshev(113, "psi", table_1m) - direct) < 1e-12


def test_c0_high_precision_recomputation(table_1m):
    """Recompute c0 with 50-digit arithmetic; must land inside the Ball."""
    mp.mp.dps = 50
    psi = mp.mpf(0)
    for p in [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59,
              61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113]:
        m = p
        while m <= 113:
            psi += mp.log(p)
            m *= p
    log2 = mp.log(2)
    c0 = (
        mp.mpf(2) ** mp.mpf("6.5")
        / (9 * mp.pi * log2)
        * (mp.mpf(1) / 3 + 3 / (2 * log2))
        * ((2 + mp.log(log2 / mp.log(mp.mpf(4) / 3))) / log2)
        * mp.sqrt(psi / 113)
    )
    b = compute_c0(table_1m)
    assert abs(float(c0) - b.value) <= b.radius


def test_c1_below_pinned_bound():
    b = compute_c1()
    assert b.strictly_below(1.9436)
    assert b.radius < 1e-8
    assert 1.9435 < b.value < 1.9436


def test_c1_euler_product_oracle():
    """prod_{p<=1e7}(1 + 1/(p(p-1))) with a telescoping tail enclosure."""
    t = build_prime_table(10_000_000)
    ps = t.primes.astype(np.float64)
    partial = float(np.prod(1.0 + 1.0 / (ps * (ps - 1.0))))
    # tail: 0 < log(c1/partial) < sum_{n>P} 1/(n(n-1)) = 1/P
    b = compute_c1()
    assert partial < b.value + b.radius
    assert b.value - b.radius < partial * math.exp(1.0 / 10_000_000)
    # the true prime tail at P = 1e7 is ~1/(P log P) ~ 6e-9 of the value
    assert abs(b.value - partial) < 3e-8


def test_c2_below_pinned_bound():
    b = compute_c2()
    assert b.strictly_below(0.36309)
    assert b.radius < 1e-8


def test_c2_integrand_endpoint_zero():
    beta = 1.0 / 3.0
    assert math.log(2.0 - 3.0 * beta) == 0.0


def test_c2_simpson_oracle():
    """Composite Simpson at 2e5 panels, independent of the GK machinery."""
    a, b = 0.125, 1.0 / 3.0
    n = 200_000
    h = (b - a) / n
    f = lambda x: math.log(2.0 - 3.0 * x) / (x * (1.0 - x))
    xs = [a + i * h for i in range(n + 1)]
    total = f(xs[0]) + f(xs[-1])
    total += 4.0 * math.fsum(f(x) for x in xs[1:-1:2])
    total += 2.0 * math.fsum(f(x) for x in xs[2:-1:2])
    simpson = total * h / 3.0 + 1e-8
    ball = compute_c2()
    assert abs(ball.value - simpson) < 1e-9


def test_eps0():
    assert eps0(36.0) == 1.0 / 57.0
    assert eps0(57.0) == 1.0 / 57.0
    assert eps0(100.0) == 1.0 / 100.0


def test_ledger_all_pass(table_1m):
    led = ledger(table_1m)
    assert isinstance(led, ConstantsLedger)
    assert led.all_pass
    for name in ("c0", "c1", "c2"):
        assert led[name].passes
        assert led[name].ball.radius < 1e-8
    assert led["lit_headline_coeff"].ball.value == 0.007


def test_ledger_rows_sorted_and_deterministic(table_1m):
    led1 = ledger(table_1m)
    led2 = ledger(table_1m)
    rows1, rows2 = led1.rows(), led2.rows()
    assert rows1 == rows2
    names = [r["name"] for r in rows1]
    assert names == sorted(names)


def test_ledger_radii_shrink_with_tighter_tolerance(table_1m):
    loose = ledger(table_1m, tol=1e-8)
    tight = ledger(table_1m, tol=1e-13)
    assert tight["c2"].ball.radius <= loose["c2"].ball.radius


def test_exp_gamma_self_consistency(table_1m):
    led = ledger(table_1m)
    eg = led["exp_gamma"].ball
    eng = led["exp_neg_gamma"].ball
    prod = eg * eng
    assert abs(prod.value - 1.0) < 1e-14
