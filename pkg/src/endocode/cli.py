"""Command-line entry point: fixture verification, endomorphism search,
Monte-Carlo simulation, and code/CCM utilities.

Every command is a thin wrapper over the library; the CLI only parses
arguments and formats output.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import appendix, codes, endo, gfmat, sim

_CODES = {
    "hamming74": codes.hamming_7_4,
    "golay24": codes.extended_golay,
    "polar32": codes.polar_32_16,
}


def _parse_s_range(text: str) -> tuple[int, int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return int(lo), int(hi)
    v = int(text)
    return v, v


def cmd_verify_appendix(args) -> int:
    steps = appendix.run_checks(args.fixtures)
    for step in steps:
        mark = "PASS" if step.passed else "FAIL"
        line = f"[{mark}] {step.name}"
        if step.detail:
            line += f" -- {step.detail}"
        print(line)
    failed = [s for s in steps if not s.passed]
    print(f"{len(steps) - len(failed)}/{len(steps)} steps passed")
    return 1 if failed else 0


def cmd_endo_search(args) -> int:
    code = _CODES[args.code]()
    s_min, s_max = _parse_s_range(args.s)
    result = endo.sample_endomorphisms(
        code,
        source=args.source,
        delta_max=args.delta_max,
        s_min=s_min,
        s_max=s_max,
        count=args.count,
        seed=args.seed,
        max_attempts=args.budget,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    ccm = endo.compute_ccm(code)
    for i, em in enumerate(result.endomorphisms):
        rec = endo.reconstruction(ccm, em)
        path = out_dir / f"endo-{i:03d}.txt"
        endo.bundle_write(path, rec)
        print(f"wrote {path} (delta={em.delta}, s={em.s})")
    print(f"{len(result.endomorphisms)} endomorphisms after {result.attempts} attempts")
    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return 2 if result.exhausted else 0


def cmd_sim(args) -> int:
    try:
        cfg = sim.SimConfig.from_json(args.config)
        records = sim.run_fer(cfg)
    except sim.SimConfigError as exc:
        print(exc, file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sim.write_csv(records, args.out)
    for r in records:
        note = "  (capped)" if r.capped else ""
        print(
            f"{r.ebno_db:5.2f} dB  frames={r.frames:<9d} errors={r.frame_errors:<6d} "
            f"fer={r.fer:.6g}  ber={r.ber:.6g}{note}"
        )
    print(f"wrote {args.out}")
    return 0


def cmd_code_info(args) -> int:
    code = _CODES[args.code]()
    print(f"name:      {code.name}")
    print(f"length n:  {code.n}")
    print(f"dim k:     {code.k}")
    print(f"rate:      {code.k / code.n:.4f}")
    print(f"modulus:   {code.modulus}")
    self_dual = code.n - code.k == code.k and not ((code.h.arr @ code.h.arr.T) % 2).any()
    print(f"self-dual: {self_dual}")
    if code.k <= 16:
        print(f"d_min:     {code.min_distance()}")
        dist = code.weight_distribution()
        print("weights:   " + ", ".join(f"{w}:{c}" for w, c in sorted(dist.items())))
    return 0


def cmd_ccm(args) -> int:
    try:
        h = gfmat.dense_read(args.pcm)
        code = codes.code_from_pcm(h)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    ccm = endo.compute_ccm(code)
    gfmat.dense_write(ccm.a, args.out)
    print(f"wrote CCM A ({ccm.a.rows}x{ccm.a.cols}) to {args.out}; H A = [I | 0] verified")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="endocode",
        description="code endomorphisms and endomorphism ensemble decoding",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-appendix", help="run the worked Hamming(7,4) fixture chain")
    p.add_argument("--fixtures", default=None, help="override the fixture directory")
    p.set_defaults(func=cmd_verify_appendix)

    p = sub.add_parser("endo-search", help="search endomorphisms and write bundle files")
    p.add_argument("--code", required=True, choices=sorted(_CODES))
    p.add_argument("--source", default="superpose", choices=["superpose", "lta", "ce-sample"])
    p.add_argument("--delta-max", type=int, default=None)
    p.add_argument("--s", default="1..128", help="rank deficiency, N or LO..HI")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=endo.DEFAULT_ATTEMPT_BUDGET)
    p.add_argument("--out", required=True, help="output directory for bundles")
    p.set_defaults(func=cmd_endo_search)

    p = sub.add_parser("sim", help="run a Monte-Carlo FER simulation from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("code-info", help="print parameters of a shipped code")
    p.add_argument("--code", required=True, choices=sorted(_CODES))
    p.set_defaults(func=cmd_code_info)

    p = sub.add_parser("ccm", help="compute a code characterization matrix from a PCM file")
    p.add_argument("--pcm", required=True, help="dense-text PCM file")
    p.add_argument("--out", required=True, help="output dense-text file for A")
    p.set_defaults(func=cmd_ccm)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
