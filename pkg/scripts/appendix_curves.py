"""Tabulate the chi-square CDF, its small-T asymptote and the G function."""

import argparse

import numpy as np

from rootldpc.analysis import Chi2Params, chi2_cdf, chi2_coding_loss_db, chi2_small_t_coefficient, g_function


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--splits", type=float, nargs="+", default=[0.5, 0.75, 0.9])
    args = ap.parse_args()
    print("a,T,cdf,asymptote")
    for a in args.splits:
        p = Chi2Params.from_a(a)
        c = chi2_small_t_coefficient(p)
        for t in np.geomspace(1e-3, 3, 12):
            print(f"{a:g},{t:.4g},{chi2_cdf(t, p):.6e},{c * t * t:.6e}")
        print(f"# coding loss at a={a:g}: {chi2_coding_loss_db(p):.4f} dB")
    print("alpha1,sigma2,G")
    for s2 in (0.1, 0.5, 1.0):
        for a1 in np.linspace(0.25, 2.5, 10):
            print(f"{a1:.3f},{s2:g},{g_function(a1, 1.0, s2):.6e}")


if __name__ == "__main__":
    main()
