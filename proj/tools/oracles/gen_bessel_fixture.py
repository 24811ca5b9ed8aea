#!/usr/bin/env python3
"""Writes the J0/Y0 reference table used by the special-function tests.

Abscissae are 200 log-spaced doubles in [1e-3, 500]; each is evaluated by
mpmath at 40-digit working precision on the exact binary value, and the
results are printed with 30 significant digits.
"""
import sys

import mpmath
import numpy as np

mpmath.mp.dps = 40


def main(path):
    xs = np.logspace(np.log10(1e-3), np.log10(500.0), 200)
    with open(path, "w") as out:
        out.write("# x  j0(x)  y0(x)  (mpmath, 40-digit working precision)\n")
        for x in xs:
            xv = float(x)
            xm = mpmath.mpf(xv)
            j0 = mpmath.besselj(0, xm)
            y0 = mpmath.bessely(0, xm)
            out.write("%s  %s  %s\n" % (repr(xv), mpmath.nstr(j0, 30), mpmath.nstr(y0, 30)))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "bessel_j0_y0.txt")
