"""Watch the finite-temperature picture sharpen into the exact one.

At inverse temperature beta the transfer operator e^{beta A} has a
leading eigenvalue lambda(beta); as beta grows, (1/beta) log lambda
drops to the best mean value m, the anchored eigenfunction log tends to
the calibrated subaction, and the Gibbs measure piles onto the
maximizing orbit.  Everything here is float, but it converges to
quantities the exact layer computes in rationals — so each row can be
checked against a known answer.

Run with:  python3 demos/temperature_ladder.py
"""

import math

from shiftopt import (beta_scan, build_ruelle_matrix, canonical_a2,
                      ldp_rate_check, leading_eigs)


def main():
    a = canonical_a2()
    betas = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0]

    print("closed form for this potential: lambda(beta) = 1 + e^(-beta)\n")
    for beta in betas:
        lam = math.exp(leading_eigs(build_ruelle_matrix(a, beta)).log_lambda)
        print(f"  beta {beta:5.0f}: lambda = {lam:.12f}   "
              f"1 + e^-beta = {1 + math.exp(-beta):.12f}")

    rep = beta_scan(a, betas)
    print("\nconvergence ladder (gaps against the exact layer):")
    print("  beta   pressure/beta - m    sup|eigenfunction - V|   TV to orbit")
    for row in rep.rows:
        print(f"  {row.beta:4.0f}   {row.pressure_gap:.3e}            "
              f"{row.subaction_gap:.3e}              {row.tv_distance:.3e}")

    print("\nhow unlikely is it to see a given window under the Gibbs state?")
    for cyl in ((0, 1), (0, 0)):
        ldp = ldp_rate_check(a, cyl, [8.0, 16.0, 32.0, 64.0])
        word = "".join(str(s) for s in cyl)
        print(f"  window {word}: exact decay rate {ldp.exact_inf}")
        for row in ldp.rows:
            print(f"    beta {row.beta:4.0f}: measured rate {row.rate_estimate:.6f} "
                  f"(gap {row.gap:.2e}, allowed {ldp.bound_constant / row.beta:.2e})")


if __name__ == "__main__":
    main()
