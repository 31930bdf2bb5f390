"""Independent oracle for star discrepancies of {s_i alpha mod 1}.

Fractional parts are taken with mpmath at 60 significant digits (no fixed-point
tricks), then the sorted-points formula is evaluated in exact rationals.

Run:  python tests/oracles/weyl_oracle.py
"""
from fractions import Fraction
import json

import mpmath

mpmath.mp.dps = 60


def star(points):
    x = sorted(points)
    N = len(x)
    best = Fraction(0)
    for i, v in enumerate(x, start=1):
        best = max(best, Fraction(i, N) - v, v - Fraction(i - 1, N))
    return best


def frac_points(seq, alpha):
    out = []
    for s in seq:
        y = mpmath.mpf(s) * alpha
        f = y - mpmath.floor(y)
        out.append(Fraction(mpmath.nstr(f, 30, min_fixed=-1, max_fixed=1)))
    return out


def main():
    root2 = mpmath.sqrt(2)
    golden = (mpmath.sqrt(5) - 1) / 2
    res = {}
    for N in (100, 10**5):
        res[f"squares_sqrt2_{N}"] = float(star(frac_points([i * i for i in range(1, N + 1)], root2)))
    res["naturals_golden_10000"] = float(star(frac_points(range(1, 10**4 + 1), golden)))
    print(json.dumps(res))


if __name__ == "__main__":
    main()
