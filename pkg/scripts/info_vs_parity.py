"""Information-bit versus all-bit word-error rate of a root code under BP.

Only the information bits own a rootcheck, so counting parity errors too
brings back the diversity-one slope.
"""

import argparse
import os

import numpy as np

from rootldpc.channel import ChannelConfig
from rootldpc.construct import build_root_regular
from rootldpc.decoder import DecoderConfig, StopRule, simulate_wer
from rootldpc.stats import loglog_slope


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=400)
    ap.add_argument("--ebn0", type=float, nargs="+", default=[10.0, 12.5, 15.0, 17.5, 20.0])
    ap.add_argument("--min-errors", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    args = ap.parse_args()

    code = build_root_regular(args.N, seed=args.seed)
    ch = ChannelConfig(nc=2, rate=0.5, ebn0_db=args.ebn0[0])
    print("ebn0_db,wer_info,wer_all_bits")
    rows = {}
    for all_bits in (False, True):
        curve = simulate_wer(code, ch, DecoderConfig("bp"), args.ebn0, StopRule(args.min_errors),
                             seed=args.seed, all_bits=all_bits, with_outage=False, workers=args.workers)
        rows[all_bits] = [p.wer for p in curve.points]
    for k, db in enumerate(args.ebn0):
        print(f"{db:g},{rows[False][k]:.4e},{rows[True][k]:.4e}")
    for all_bits, label in ((False, "info"), (True, "all bits")):
        vals = np.array(rows[all_bits])
        if (vals > 0).all():
            print(f"# slope {label}: {loglog_slope(args.ebn0, vals):.2f}")


if __name__ == "__main__":
    main()
