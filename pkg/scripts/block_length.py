"""Root (3,6) word-error rate at one Eb/N0 for a range of block lengths."""

import argparse
import os

from rootldpc.channel import ChannelConfig
from rootldpc.construct import build_root_regular
from rootldpc.decoder import DecoderConfig, StopRule, simulate_wer


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, nargs="+", default=[200, 400, 1000, 2000])
    ap.add_argument("--ebn0", type=float, default=15.0)
    ap.add_argument("--min-errors", type=int, default=100)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    args = ap.parse_args()

    ch = ChannelConfig(nc=2, rate=0.5, ebn0_db=args.ebn0)
    print("N,trials,word_errors,wer,ci_low,ci_high,outage")
    for n in args.N:
        code = build_root_regular(n, seed=args.seed)
        p = simulate_wer(code, ch, DecoderConfig("bp"), [args.ebn0], StopRule(args.min_errors),
                         seed=args.seed + n, workers=args.workers).points[0]
        print(f"{n},{p.trials},{p.word_errors},{p.wer:.4e},{p.ci_low:.4e},{p.ci_high:.4e},{p.outage:.4e}")


if __name__ == "__main__":
    main()
