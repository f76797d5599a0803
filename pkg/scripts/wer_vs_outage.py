"""Finite-length BP word-error rate of root and random codes next to the outage bound."""

import argparse
import os
import sys

from rootldpc.channel import ChannelConfig
from rootldpc.construct import build_root_regular, random_regular_ldpc
from rootldpc.decoder import DecoderConfig, StopRule, simulate_wer


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, default=400)
    ap.add_argument("--ebn0", type=float, nargs="+", default=[5.0, 10.0, 15.0, 20.0])
    ap.add_argument("--min-errors", type=int, default=100)
    ap.add_argument("--max-trials", type=int, default=1_000_000)
    ap.add_argument("--variant", default="bp", choices=("bp", "min-sum"))
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    args = ap.parse_args()

    stop = StopRule(args.min_errors, args.max_trials)
    dec = DecoderConfig(args.variant)
    for name, code in (("root", build_root_regular(args.N, seed=args.seed)),
                       ("random", random_regular_ldpc(args.N, 3, 6, seed=args.seed))):
        ch = ChannelConfig(nc=2, rate=0.5, ebn0_db=args.ebn0[0])
        curve = simulate_wer(code, ch, dec, args.ebn0, stop, seed=args.seed, workers=args.workers)
        sys.stdout.write(curve.to_csv(header=f"code={name} N={args.N} decoder={args.variant}"))


if __name__ == "__main__":
    main()
