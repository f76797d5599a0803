"""Command-line front end: ``rootldpc <command> [--config file.json] [overrides]``.

Every command writes a CSV or text report whose leading ``#`` lines record
the resolved configuration and master seed.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis, channel, construct, decoder, density, gf2

COMMANDS = ("construct", "analyze", "simulate", "outage", "de-threshold", "de-wer", "appendix")
WORKERS_ENV = "ROOTLDPC_WORKERS"

log = logging.getLogger("rootldpc")


@dataclass
class CodeSpec:
    family: str = "root"        # root | root-irregular | random | wstar2 | wstar3 | full-rank-halves | alist
    N: int = 400
    dv: int = 3
    dc: int = 6
    m: int = 3
    seed: int = 0
    path: str = ""
    meta: str = ""


@dataclass
class SweepSpec:
    ebn0_db: list = field(default_factory=lambda: [10.0])
    min_errors: int = 100
    max_trials: int = 10_000_000
    fading_samples: int = 10_000
    outage_samples: int = 1_000_000
    method: str = "conditional"
    all_bits: bool = False
    ensemble: str = "regular"   # regular | irregular (density-evolution commands)
    root: bool = True


@dataclass
class ExperimentConfig:
    command: str = "simulate"
    code: CodeSpec = field(default_factory=CodeSpec)
    channel: dict = field(default_factory=dict)
    decoder: dict = field(default_factory=dict)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    out: str = ""
    seed: int = 0
    workers: int = 1

    def channel_config(self) -> channel.ChannelConfig:
        kw = dict(self.channel)
        if "alpha" in kw:
            kw["alpha"] = tuple(kw["alpha"])
        return channel.ChannelConfig(**kw)

    def decoder_config(self) -> decoder.DecoderConfig:
        return decoder.DecoderConfig(**self.decoder)

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True)


def _merge(dc_type, base, values: dict):
    known = {f.name for f in dataclasses.fields(dc_type)}
    extra = set(values) - known
    if extra:
        raise ValueError(f"unknown {dc_type.__name__} keys: {sorted(extra)}")
    return dataclasses.replace(base, **values)


def load_config(path: str | None) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if not path:
        return cfg
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if "code" in raw:
        cfg.code = _merge(CodeSpec, cfg.code, raw.pop("code"))
    if "sweep" in raw:
        cfg.sweep = _merge(SweepSpec, cfg.sweep, raw.pop("sweep"))
    cfg.channel = dict(raw.pop("channel", {}))
    cfg.decoder = dict(raw.pop("decoder", {}))
    return _merge(ExperimentConfig, cfg, raw)


# ------------------------------------------------------------------ commands

def build_code(spec: CodeSpec):
    fam = spec.family
    if fam == "root":
        return construct.build_root_regular(spec.N, seed=spec.seed)
    if fam == "root-irregular":
        return construct.build_root_irregular(spec.N, construct.IRREGULAR_RATE_HALF, seed=spec.seed)
    if fam == "random":
        return construct.random_regular_ldpc(spec.N, spec.dv, spec.dc, seed=spec.seed)
    if fam == "wstar2":
        return construct.build_wstar2(spec.N)
    if fam == "wstar3":
        return construct.build_wstar3(spec.m, seed=spec.seed)
    if fam == "full-rank-halves":
        return construct.random_full_diversity_half_rate(spec.N, seed=spec.seed)
    if fam == "alist":
        H = gf2.read_alist(spec.path)
        return construct.load_root_metadata(spec.meta, H) if spec.meta else H
    raise ValueError(f"unknown code family {fam!r}")


def _ensemble(sweep: SweepSpec) -> construct.DegreeDistribution:
    if sweep.ensemble == "irregular":
        return construct.IRREGULAR_RATE_HALF
    if sweep.ensemble == "regular":
        return construct.REGULAR_36
    raise ValueError(f"unknown ensemble {sweep.ensemble!r}")


def cmd_construct(cfg: ExperimentConfig) -> dict[str, str]:
    code = build_code(cfg.code)
    H = decoder.parity_matrix(code)
    out = {".alist": gf2.to_alist(H)}
    meta = code.metadata() if isinstance(code, construct.RootLdpcCode) else {"N": H.cols, "M": H.rows}
    meta["config"] = json.loads(cfg.to_json())
    out[".json"] = json.dumps(meta, indent=2, sort_keys=True) + "\n"
    return out


def cmd_analyze(cfg: ExperimentConfig) -> str:
    code = build_code(cfg.code)
    H = decoder.parity_matrix(code)
    nc = cfg.channel_config().nc
    r = gf2.rank(H)
    rate = gf2.code_rate(H)
    lines = [f"N={H.cols}", f"M={H.rows}", f"rank={r}", f"K={H.cols - r}", f"rate={float(rate):.6f}",
             f"singleton_bound={gf2.singleton_bound(rate, nc) if rate > 0 else 'n/a'}",
             f"four_cycles={construct.count_four_cycles(H)}"]
    try:
        rep = gf2.diversity_analysis(H, nc)
        lines += [f"d={rep.d}", f"wstar={rep.wstar}", f"codewords={rep.n_codewords}"]
    except gf2.BudgetExceededError as exc:
        lines += [f"wstar=unknown ({exc})"]
    lines.append(f"ml_full_diversity={construct.is_ml_full_diversity(H, nc)}")
    return "\n".join(lines) + "\n"


def cmd_simulate(cfg: ExperimentConfig) -> str:
    code = build_code(cfg.code)
    s = cfg.sweep
    ch = cfg.channel_config()
    if "rate" not in cfg.channel:
        # Eb/N0 is converted with the rate of the code actually simulated
        ch = dataclasses.replace(ch, rate=float(gf2.code_rate(decoder.parity_matrix(code))))
    curve = decoder.simulate_wer(code, ch, cfg.decoder_config(), s.ebn0_db,
                                 decoder.StopRule(s.min_errors, s.max_trials), seed=cfg.seed,
                                 all_bits=s.all_bits, outage_samples=s.outage_samples,
                                 workers=cfg.workers)
    return curve.to_csv()


def cmd_outage(cfg: ExperimentConfig) -> str:
    ch = cfg.channel_config()
    buf = io.StringIO()
    buf.write("ebn0_db,p_out,ci_low,ci_high,samples,quadrature\n")
    for k, db in enumerate(cfg.sweep.ebn0_db):
        c = ch.at(db)
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(k,)))
        est = channel.outage_probability(c.gamma, c.rate, c.nc, cfg.sweep.outage_samples, rng,
                                         c.mode, c.epsilon)
        quad = channel.outage_quadrature(c.gamma, c.rate) if (c.nc == 2 and c.mode == "rayleigh") else float("nan")
        buf.write(f"{db:.6g},{est.p:.6e},{est.ci_low:.6e},{est.ci_high:.6e},{est.samples},{quad:.6e}\n")
    return buf.getvalue()


def cmd_de_threshold(cfg: ExperimentConfig) -> str:
    dd = _ensemble(cfg.sweep)
    rep = density.awgn_threshold(dd, root=cfg.sweep.root)
    return ("ensemble,root,threshold_ebn0_db,capacity_db,gap_db,ratio,ratio_gap_reading\n"
            f"{cfg.sweep.ensemble},{cfg.sweep.root},{rep.ebn0_db:.4f},{rep.capacity_db:.4f},"
            f"{rep.gap_db:.4f},{rep.ratio:.4f},{rep.ratio_gap_reading:.4f}\n")


def cmd_de_wer(cfg: ExperimentConfig) -> str:
    dd = _ensemble(cfg.sweep)
    ch = cfg.channel_config()
    rows = density.de_asymptotic_wer(dd, cfg.sweep.root, cfg.sweep.ebn0_db, cfg.sweep.fading_samples,
                                     seed=cfg.seed, mode=ch.mode, epsilon=ch.epsilon,
                                     method=cfg.sweep.method)
    return density.wer_to_csv(rows)


def cmd_appendix(cfg: ExperimentConfig) -> str:
    buf = io.StringIO()
    buf.write("function,p1,p2,p3,value\n")
    for a in (0.5, 0.75, 0.9, 1.0):
        p = analysis.Chi2Params.from_a(a)
        for T in np.geomspace(1e-3, 10, 25):
            buf.write(f"chi2_cdf,{a:g},{1 - a:g},{T:.6g},{analysis.chi2_cdf(T, p):.10e}\n")
    for sigma2 in (0.1, 0.5, 1.0):
        for a1 in np.linspace(0.2, 3.0, 15):
            g = analysis.g_function(float(a1), 1.0, sigma2)
            buf.write(f"g_function,{a1:.6g},1,{sigma2:g},{g:.10e}\n")
    return buf.getvalue()


HANDLERS = {"construct": cmd_construct, "analyze": cmd_analyze, "simulate": cmd_simulate,
            "outage": cmd_outage, "de-threshold": cmd_de_threshold, "de-wer": cmd_de_wer,
            "appendix": cmd_appendix}


def run(cfg: ExperimentConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    if cfg.command not in HANDLERS:
        raise ValueError(f"unknown command {cfg.command!r}")
    result = HANDLERS[cfg.command](cfg)
    header = f"# config: {cfg.to_json()}\n# seed: {cfg.seed}\n"
    if isinstance(result, dict):
        if not cfg.out:
            raise ValueError("construct needs --out PREFIX")
        for suffix, text in result.items():
            Path(cfg.out + suffix).write_text(text, encoding="utf-8")
        return 0
    if cfg.out:
        Path(cfg.out).write_text(header + result, encoding="utf-8")
    else:
        stdout.write(header + result)
    return 0


# ------------------------------------------------------------------ argv

def _floats(text: str) -> list[float]:
    return [float(x) for x in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rootldpc", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="JSON config file; flags override its values")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--workers", type=int)
    ap.add_argument("--out")
    ap.add_argument("-v", "--verbose", action="store_true")
    g = ap.add_argument_group("code")
    g.add_argument("--family")
    g.add_argument("--N", type=int, dest="N")
    g.add_argument("--dv", type=int)
    g.add_argument("--dc", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--code-seed", type=int)
    g.add_argument("--alist")
    g.add_argument("--meta")
    g = ap.add_argument_group("channel")
    g.add_argument("--nc", type=int)
    g.add_argument("--rate", type=float)
    g.add_argument("--mode", choices=("rayleigh", "erasure", "fixed"))
    g.add_argument("--epsilon", type=float)
    g.add_argument("--alpha", type=_floats)
    g = ap.add_argument_group("decoder")
    g.add_argument("--variant", choices=decoder.VARIANTS)
    g.add_argument("--max-iter", type=int)
    g.add_argument("--llr-clip", type=float)
    g.add_argument("--no-early-stop", action="store_true")
    g = ap.add_argument_group("sweep")
    g.add_argument("--ebn0", type=_floats, help="Eb/N0 list in dB, e.g. '5,10,15'")
    g.add_argument("--min-errors", type=int)
    g.add_argument("--max-trials", type=int)
    g.add_argument("--fading-samples", type=int)
    g.add_argument("--outage-samples", type=int)
    g.add_argument("--method", choices=("conditional", "montecarlo", "quadrature"))
    g.add_argument("--all-bits", action="store_true")
    g.add_argument("--ensemble", choices=("regular", "irregular"))
    g.add_argument("--random-ensemble", action="store_true", help="DE for the random instead of the root ensemble")
    return ap


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    cfg = load_config(args.config)
    cfg.command = args.command
    top = {"seed": args.seed, "out": args.out, "workers": args.workers}
    code = {"family": args.family, "N": args.N, "dv": args.dv, "dc": args.dc, "m": args.m,
            "seed": args.code_seed, "path": args.alist, "meta": args.meta}
    ch = {"nc": args.nc, "rate": args.rate, "mode": args.mode, "epsilon": args.epsilon, "alpha": args.alpha}
    dec = {"variant": args.variant, "max_iter": args.max_iter, "llr_clip": args.llr_clip}
    sweep = {"ebn0_db": args.ebn0, "min_errors": args.min_errors, "max_trials": args.max_trials,
             "fading_samples": args.fading_samples, "outage_samples": args.outage_samples,
             "method": args.method, "ensemble": args.ensemble}
    if args.alist and not args.family:
        code["family"] = "alist"
    if args.no_early_stop:
        dec["early_stop"] = False
    if args.all_bits:
        sweep["all_bits"] = True
    if args.random_ensemble:
        sweep["root"] = False
    drop = lambda d: {k: v for k, v in d.items() if v is not None}
    cfg = dataclasses.replace(cfg, **drop(top))
    cfg.code = dataclasses.replace(cfg.code, **drop(code))
    cfg.sweep = dataclasses.replace(cfg.sweep, **drop(sweep))
    cfg.channel = {**cfg.channel, **drop(ch)}
    cfg.decoder = {**cfg.decoder, **drop(dec)}
    if args.workers is None and not (args.config and "workers" in json.loads(Path(args.config).read_text())):
        cfg.workers = int(os.environ.get(WORKERS_ENV, os.cpu_count() or 1))
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(config_from_args(args))
    except Exception as exc:  # noqa: BLE001 - every failure becomes one parseable line
        sys.stderr.write("error " + json.dumps({"type": type(exc).__name__, "message": str(exc)}) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
