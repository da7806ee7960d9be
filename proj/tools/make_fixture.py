#!/usr/bin/env python3
"""Write a synthetic one-port Touchstone file for a single parallel RLC.

Z(s) = (w R / Q) s / (s^2 + (w / Q) s + w^2), converted to S with a 50 ohm
reference. Used as the bundled end-to-end fixture.
"""

import argparse
import math


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--r-ohm", type=float, default=100.0)
    ap.add_argument("--f0-ghz", type=float, default=5.0)
    ap.add_argument("--q", type=float, default=50.0)
    ap.add_argument("--fmin-ghz", type=float, default=1.0)
    ap.add_argument("--fmax-ghz", type=float, default=10.0)
    ap.add_argument("--points", type=int, default=401)
    ap.add_argument("--ref-ohm", type=float, default=50.0)
    ap.add_argument("out")
    args = ap.parse_args()

    w0 = 2 * math.pi * args.f0_ghz * 1e9
    with open(args.out, "w") as fh:
        fh.write("! synthetic parallel RLC: R=%g ohm, f0=%g GHz, Q=%g\n" % (args.r_ohm, args.f0_ghz, args.q))
        fh.write("# GHZ S RI R %g\n" % args.ref_ohm)
        for k in range(args.points):
            f_ghz = args.fmin_ghz + (args.fmax_ghz - args.fmin_ghz) * k / (args.points - 1)
            s = 1j * 2 * math.pi * f_ghz * 1e9
            z = (w0 * args.r_ohm / args.q) * s / (s * s + (w0 / args.q) * s + w0 * w0)
            sp = (z - args.ref_ohm) / (z + args.ref_ohm)
            fh.write("%.17g %.17g %.17g\n" % (f_ghz, sp.real, sp.imag))


if __name__ == "__main__":
    main()
