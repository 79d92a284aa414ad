#!/usr/bin/env python3
"""Write the imaginary parts of the first N nontrivial zeta zeros, one per line.

Uses python-flint (Arb) for certified zero isolation. The output matches the
plain-text table format read by spectra::load_zeta_zeros.
"""
import argparse

import flint


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=10100)
    parser.add_argument("--output", default="data/zeta_zeros.txt")
    parser.add_argument("--digits", type=int, default=12)
    args = parser.parse_args()

    flint.ctx.prec = 96
    zeros = flint.acb.zeta_zeros(1, args.count)
    with open(args.output, "w", encoding="ascii") as out:
        for z in zeros:
            out.write(f"{float(z.imag.mid()):.{args.digits}f}\n")


if __name__ == "__main__":
    main()
