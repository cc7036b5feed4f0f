"""Linear-sieve error functions f1, F1 via their delay differential system.

The pair satisfies
    F1(s) = 2 e^gamma - s            on 0 <= s <= 3,
    F1'(s) = -f1(s-1)/(s-1)          for s >= 3,
    f1'(s) = -F1(s-1)/(s-1)          for s >= 2,
with the boundary convention f1(s) = s on (0, 2] (equivalent to the
classical pair f = 0, F = 2 e^gamma / s below the crossover under
f1(s) = s (1 - f(s)), F1(s) = s (F(s) - 1)).

The solver marches unit interval by unit interval.  On each interval the
integrand references only the previous interval, which is already held as a
Chebyshev polynomial, so the new piece is the exact antiderivative of a
Chebyshev interpolant: dense, cheap to evaluate, and with an interpolation
tail that is easy to estimate.  Each interval's partial integral is
cross-checked against an independent adaptive Gauss-Kronrod pass and the
difference is folded into the piece radius, together with the propagated
radius of the delayed source.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import Chebyshev

from .ball import EPS, Ball, exp_gamma_ball
from .errors import ConfigError, DomainError
from .quadrature import integrate

S_MAX_CAP = 12.0


@dataclass(frozen=True)
class _Piece:
    lo: float
    hi: float
    poly: Chebyshev
    radius: float  # uniform enclosure radius valid on [lo, hi]

    def __call__(self, s):
        # works elementwise on arrays too (quadrature and interpolation
        # both probe the piece in vector form)
        return self.poly(s)


def _interp_tail(poly: Chebyshev) -> float:
    """Crude uniform bound on the truncation error of a Chebyshev interpolant.

    For the steadily decaying coefficient sequences produced by these smooth
    integrands, the discarded tail is comparable to the last kept
    coefficients; a 10x safety factor keeps the estimate honest.
    """
    c = np.abs(poly.coef)
    tail = float(np.sum(c[-4:]))
    return 10.0 * max(tail, EPS * float(np.max(c)))


class SieveFunctionSystem:
    """Dense evaluator for f1 and F1 on (0, s_max]."""

    def __init__(self, s_max: float = 12.0, tol: float = 1e-12, degree: int = 48):
        if not (3.0 <= s_max <= S_MAX_CAP):
            raise ConfigError(f"s_max must be in [3, {S_MAX_CAP}], got {s_max}")
        if not (1e-15 <= tol <= 1e-6):
            raise ConfigError(f"tol must be in [1e-15, 1e-6], got {tol}")
        self.s_max = float(s_max)
        self.tol = float(tol)
        self.degree = int(degree)

        two_eg = exp_gamma_ball() * 2.0
        self._two_eg = two_eg.value
        # Closed-form seeds: f1 linear on [0, 2]; F1 linear on [0, 3].
        self._f1_pieces: list[_Piece] = [
            _Piece(0.0, 2.0, Chebyshev([1.0, 1.0], domain=[0.0, 2.0]), 0.0)
        ]
        self._F1_pieces: list[_Piece] = [
            _Piece(
                0.0,
                3.0,
                Chebyshev([two_eg.value - 1.5, -1.5], domain=[0.0, 3.0]),
                two_eg.radius,
            )
        ]
        self._build()

    # -- construction ---------------------------------------------------------

    def _march(self, start_value: float, start_radius: float, k: int, source) -> _Piece:
        """Build V on [k, k+1] with V(s) = V(k) - int_k^s source(t-1)/(t-1) dt."""
        lo, hi = float(k), float(k + 1)
        src_piece, src_radius = source

        def integrand(t: float) -> float:
            return src_piece(t - 1.0) / (t - 1.0)

        p_g = Chebyshev.interpolate(integrand, self.degree, domain=[lo, hi])
        partial = p_g.integ(lbnd=lo)
        poly = -partial + start_value

        gk_value, gk_err = integrate(integrand, lo, hi, self.tol)
        cross = abs(float(partial(hi)) - gk_value) + gk_err
        # The delayed source's radius integrates against 1/(t-1).
        propagated = src_radius * math.log(k / (k - 1.0))
        radius = (
            start_radius
            + propagated
            + _interp_tail(p_g)
            + cross
            + 8.0 * EPS * (abs(start_value) + 1.0)
        )
        return _Piece(lo, hi, poly, radius)

    def _build(self) -> None:
        top = int(math.ceil(self.s_max))
        # f1 on [2, 3] integrates the closed-form F1 over [1, 2].
        F1_seed = self._F1_pieces[0]
        self._f1_pieces.append(
            self._march(2.0, 0.0, 2, (F1_seed, F1_seed.radius))
        )
        for k in range(3, top):
            f1_prev = self._f1_pieces[-1]  # covers [k-1, k]
            F1_prev = self._F1_pieces[-1]  # covers [k-1, k] (or [0,3] for k=3)
            F1_start = self._F1_pieces[-1]
            F1_val = float(F1_start.poly(float(k)))
            self._F1_pieces.append(
                self._march(F1_val, F1_start.radius, k, (f1_prev, f1_prev.radius))
            )
            f1_val = float(self._f1_pieces[-1].poly(float(k)))
            self._f1_pieces.append(
                self._march(f1_val, self._f1_pieces[-1].radius, k, (F1_prev, F1_prev.radius))
            )

    # -- lookup ---------------------------------------------------------------

    @staticmethod
    def _find(pieces: list[_Piece], s: float) -> _Piece:
        for piece in pieces:
            if piece.lo <= s <= piece.hi:
                return piece
        return pieces[-1]

    def f1(self, s: float) -> Ball:
        if not (s > 0.0):
            raise DomainError(f"f1 needs s > 0, got {s}")
        if s > self.s_max:
            raise DomainError(f"f1 built up to s_max={self.s_max}, got {s}")
        if s <= 2.0:
            return Ball(float(s), 0.0)
        piece = self._find(self._f1_pieces[1:], s)
        return Ball(float(piece.poly(s)), piece.radius)

    def F1(self, s: float) -> Ball:
        if s < 0.0:
            raise DomainError(f"F1 needs s >= 0, got {s}")
        if s > self.s_max:
            raise DomainError(f"F1 built up to s_max={self.s_max}, got {s}")
        if s <= 3.0:
            return Ball(self._two_eg - s, self._F1_pieces[0].radius)
        piece = self._find(self._F1_pieces[1:], s)
        return Ball(float(piece.poly(s)), piece.radius)

    def f1_deriv(self, s: float, side: str = "right") -> float:
        """f1'(s) from the delay relation; `side` picks the branch at the
        s = 2 kink (the only point where the two one-sided slopes differ)."""
        if s < 2.0 or (s == 2.0 and side == "left"):
            return 1.0
        return -self.F1(s - 1.0).value / (s - 1.0)

    def F1_deriv(self, s: float, side: str = "right") -> float:
        if s < 3.0 or (s == 3.0 and side == "left"):
            return -1.0
        return -self.f1(s - 1.0).value / (s - 1.0)

    def _fourth_bound(self, pieces: list[_Piece], lo: float, hi: float) -> float:
        """Safe sup of |d^4/ds^4| over [lo, hi] from the polynomial pieces."""
        best = 0.0
        for piece in pieces:
            a, b = max(lo, piece.lo), min(hi, piece.hi)
            if a >= b or len(piece.poly.coef) <= 4:
                continue
            d4 = piece.poly.deriv(4)
            xs = np.linspace(a, b, 65)
            best = max(best, float(np.max(np.abs(d4(xs)))))
        return 1.5 * best

    def f1_fourth_bound(self, lo: float, hi: float) -> float:
        return self._fourth_bound(self._f1_pieces, lo, hi)

    def F1_fourth_bound(self, lo: float, hi: float) -> float:
        return self._fourth_bound(self._F1_pieces, lo, hi)


@lru_cache(maxsize=8)
def get_system(s_max: float = 12.0, tol: float = 1e-12) -> SieveFunctionSystem:
    return SieveFunctionSystem(s_max=s_max, tol=tol)


def eval_f1(s: float, *, s_max: float = 12.0, tol: float = 1e-12) -> Ball:
    """f1(s) as a Ball; s must lie in (0, s_max]."""
    return get_system(s_max, tol).f1(s)


def eval_F1(s: float, *, s_max: float = 12.0, tol: float = 1e-12) -> Ball:
    """F1(s) as a Ball; s must lie in [0, s_max]."""
    return get_system(s_max, tol).F1(s)


# -- tabulation ----------------------------------------------------------------


# Slope/derivative breakpoints of the delay system: the f1 slope jumps at
# s = 2, and each later integer carries a (successively milder) jump in some
# higher derivative as the pieces hand over.
_KINK = 2.0
_SLOPE_JUMP_BOUND = 4.0  # |f1'(2+) - f1'(2-)| = 2 e^gamma - 2 < 4
_THIRD_JUMP_BOUND = 16.0  # safe bound on third-derivative jumps at integers


@dataclass
class SieveFunctionGrid:
    """Tabulated f1/F1 on a uniform s-grid with per-node radii.

    Queries between nodes use cubic Hermite interpolation with side-aware
    delay-relation slopes; the h^4/384 * sup|f''''| interpolation error
    (per unit interval) is folded into the returned radius, plus explicit
    pads for the rare node intervals that straddle a breakpoint.
    """

    s_min: float
    s_max: float
    step: float
    s: np.ndarray
    f1_values: np.ndarray
    f1_radii: np.ndarray
    F1_values: np.ndarray
    F1_radii: np.ndarray
    f1_slopes_right: np.ndarray
    f1_slopes_left: np.ndarray
    F1_slopes_right: np.ndarray
    F1_slopes_left: np.ndarray
    f1_fourth_bounds: dict
    F1_fourth_bounds: dict

    def __len__(self) -> int:
        return len(self.s)

    def nodes(self):
        for i in range(len(self.s)):
            yield (
                float(self.s[i]),
                Ball(float(self.f1_values[i]), float(self.f1_radii[i])),
                Ball(float(self.F1_values[i]), float(self.F1_radii[i])),
            )

    def _interp_pad(self, lo: float, hi: float, kind: str, m4: float) -> float:
        h = hi - lo
        pad = h ** 4 / 384.0 * m4
        if kind == "f1" and lo < _KINK < hi:
            pad += 0.25 * h * _SLOPE_JUMP_BOUND
        else:
            k = math.ceil(lo)
            if lo < k < hi and k >= 3:
                pad += 0.5 * h ** 3 * _THIRD_JUMP_BOUND
        return pad

    def _hermite(self, s, kind: str) -> Ball:
        if not (self.s_min <= s <= self.s_max):
            raise DomainError(f"s={s} outside grid [{self.s_min}, {self.s_max}]")
        if kind == "f1":
            values, radii = self.f1_values, self.f1_radii
            sr, sl = self.f1_slopes_right, self.f1_slopes_left
            m4s = self.f1_fourth_bounds
        else:
            values, radii = self.F1_values, self.F1_radii
            sr, sl = self.F1_slopes_right, self.F1_slopes_left
            m4s = self.F1_fourth_bounds
        i = min(int((s - self.s_min) / self.step), len(self.s) - 2)
        lo, hi = float(self.s[i]), float(self.s[i + 1])
        h = hi - lo
        t = (s - lo) / h
        h00 = (1.0 + 2.0 * t) * (1.0 - t) ** 2
        h10 = t * (1.0 - t) ** 2
        h01 = t * t * (3.0 - 2.0 * t)
        h11 = t * t * (t - 1.0)
        value = (
            h00 * float(values[i])
            + h10 * h * float(sr[i])
            + h01 * float(values[i + 1])
            + h11 * h * float(sl[i + 1])
        )
        m4 = m4s.get(int(lo), 0.0)
        radius = (
            max(float(radii[i]), float(radii[i + 1]))
            + self._interp_pad(lo, hi, kind, m4)
            + 4.0 * EPS * (abs(value) + 1.0)
        )
        return Ball(value, radius)

    def f1_at(self, s: float) -> Ball:
        return self._hermite(s, "f1")

    def F1_at(self, s: float) -> Ball:
        return self._hermite(s, "F1")


def build_grid(
    s_max: float = 12.0, step: float = 1e-3, *, tol: float = 1e-12
) -> SieveFunctionGrid:
    """Tabulate f1/F1 at s = step, 2*step, ..., s_max.

    The first node sits at s = step because f1 is undefined at s = 0.
    """
    if not (1e-4 <= step <= 0.1):
        raise ConfigError(f"step must be in [1e-4, 0.1], got {step}")
    if not (3.0 <= s_max <= S_MAX_CAP):
        raise ConfigError(f"s_max must be in [3, {S_MAX_CAP}], got {s_max}")
    system = get_system(s_max, tol)
    n = int(math.floor(s_max / step + 1e-9))
    s = np.arange(1, n + 1, dtype=np.float64) * step
    while len(s) and float(s[-1]) > s_max:
        s = s[:-1]
        n -= 1

    f1_values = np.empty(n)
    f1_radii = np.empty(n)
    F1_values = np.empty(n)
    F1_radii = np.empty(n)
    f1_sr = np.empty(n)
    f1_sl = np.empty(n)
    F1_sr = np.empty(n)
    F1_sl = np.empty(n)
    for i, si in enumerate(s):
        si = float(si)
        b = system.f1(si)
        f1_values[i], f1_radii[i] = b.value, b.radius
        b = system.F1(si)
        F1_values[i], F1_radii[i] = b.value, b.radius
        f1_sr[i] = system.f1_deriv(si, "right")
        f1_sl[i] = system.f1_deriv(si, "left")
        F1_sr[i] = system.F1_deriv(si, "right")
        F1_sl[i] = system.F1_deriv(si, "left")

    f1_m4 = {k: system.f1_fourth_bound(k, k + 1.0) for k in range(int(math.ceil(s_max)))}
    F1_m4 = {k: system.F1_fourth_bound(k, k + 1.0) for k in range(int(math.ceil(s_max)))}
    return SieveFunctionGrid(
        s_min=float(s[0]),
        s_max=float(s[-1]),
        step=float(step),
        s=s,
        f1_values=f1_values,
        f1_radii=f1_radii,
        F1_values=F1_values,
        F1_radii=F1_radii,
        f1_slopes_right=f1_sr,
        f1_slopes_left=f1_sl,
        F1_slopes_right=F1_sr,
        F1_slopes_left=F1_sl,
        f1_fourth_bounds=f1_m4,
        F1_fourth_bounds=F1_m4,
    )


def write_grid_csv(grid: SieveFunctionGrid, fh: io.TextIOBase) -> None:
    """Export `s,f1,f1_radius,F1,F1_radius` rows at 17 significant digits."""
    fh.write("s,f1,f1_radius,F1,F1_radius\n")
    for i in range(len(grid)):
        fh.write(
            ",".join(
                format(v, ".17g")
                for v in (
                    grid.s[i],
                    grid.f1_values[i],
                    grid.f1_radii[i],
                    grid.F1_values[i],
                    grid.F1_radii[i],
                )
            )
            + "\n"
        )
