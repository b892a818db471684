"""
``c2f-mc``: simulate, build a spectrum, reconstruct, register and score from
the command line. Every subcommand reads all of its inputs before it writes
anything, and exits with status 1 and an ``error:`` line on failure.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any
import numpy as np
from pydantic import BaseModel, ValidationError
from . import __version__
from .core.forward import zero_filled
from .core.numerics import fft2c
from .diffusion.denoiser import WienerDenoiser, estimate_spectrum
from .diffusion.schedule import ShellSchedule
from .io.cfl import cfl_read, cfl_write, atomic_write_bytes
from .io.keyvalue import build_config, dump_config, merge_overrides, parse_key_values, write_config
from .io.render import encode_png
from .io.store import (
    FIELDS, MANIFEST, TRUTH, load_problem, load_spectrum, read_image, save_problem, save_spectrum,
    write_fields,
)
from .pipeline.metrics import magnitude_nrmse, nrmse
from .pipeline.reconstruct import reconstruct
from .registration.solver import register_state
from .simulation.scenario import simulate_scan
from .types import (
    MotionProblem, ReconConfig, RegistrationConfig, SamplingMask, SensitivityMaps,
    SimulationConfig, IoException, ReconException, check_fields, zero_field,
)
from .logger import enable_logging, logger

def _load_config[M: BaseModel](model: type[M], args: argparse.Namespace) -> M:
    tree: dict[str, Any] = {}
    if args.config is not None:
        tree = parse_key_values(Path(args.config).read_text(encoding="utf-8"))
    overrides = list(args.set)
    if getattr(args, "seed", None) is not None:
        overrides.append(f"seed={args.seed}")
    return build_config(model, merge_overrides(tree, overrides))

def _key_values(lines: dict[str, str]) -> bytes:
    return "".join(f"{key} = {value}\n" for key, value in lines.items()).encode("utf-8")

# ---------------------------------------------------------------------------

def cmd_simulate(args: argparse.Namespace) -> int:
    truth = read_image(args.truth)
    cfg = _load_config(SimulationConfig, args)

    scan = simulate_scan(truth, cfg)
    out = Path(args.out)
    save_problem(out, scan.problem)
    write_fields(out / FIELDS, scan.fields)
    cfl_write(out / TRUTH, truth)
    write_config(out / MANIFEST, cfg, comments={
        "command": "simulate",
        "truth": str(args.truth),
        "version": __version__,
    })
    logger.info(f"Problem written to {out}")
    return 0

def cmd_spectrum(args: argparse.Namespace) -> int:
    stems = sorted(path.with_suffix("") for path in Path(args.corpus).glob("*.cfl"))
    corpus = []
    for stem in stems:
        array = cfl_read(stem).astype(np.complex128)
        match array.ndim:
            case 2:
                corpus.append(array)
            case 3:
                corpus.extend(array)
            case _:
                raise IoException(f"{stem}: expected an H×W image or an N×H×W stack")
    spectrum = estimate_spectrum(corpus)
    save_spectrum(args.out, spectrum)
    logger.info(f"Spectrum of {len(corpus)} images written to {args.out}")
    return 0

def cmd_reconstruct(args: argparse.Namespace) -> int:
    problem_dir = Path(args.problem)
    prob = load_problem(problem_dir)
    spectrum = load_spectrum(args.spectrum)
    cfg = _load_config(ReconConfig, args)
    truth = None
    if args.truth is not None:
        truth = read_image(args.truth)
    elif (problem_dir / f"{TRUTH}.cfl").exists():
        truth = read_image(problem_dir / TRUTH)

    denoiser = WienerDenoiser(spectrum=spectrum,
                              noise_schedule=ShellSchedule.from_config(cfg.schedule),
                              kind="empirical")
    result = reconstruct(prob, denoiser, cfg)
    baseline = zero_filled(prob)

    # every payload is encoded before the first file is written
    check_fields(result.fields, prob.shape)
    files = {
        "recon.png": encode_png(result.image),
        "zero_filled.png": encode_png(baseline),
    }
    if truth is not None:
        files["error.png"] = encode_png(result.image, mode="error", reference=truth)
        files["metrics.txt"] = _key_values({
            "nrmse": f"{nrmse(result.image, truth):.6f}",
            "magnitude_nrmse": f"{magnitude_nrmse(result.image, truth):.6f}",
            "zero_filled_nrmse": f"{nrmse(baseline, truth):.6f}",
            "duration": f"{result.duration:.3f}",
        })
    files[MANIFEST] = dump_config(cfg, comments={
        "command": "reconstruct",
        "problem": str(problem_dir),
        "spectrum": str(args.spectrum),
        "version": __version__,
    }).encode("utf-8")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfl_write(out / "recon", result.image)
    write_fields(out / FIELDS, result.fields)
    cfl_write(out / "zero_filled", baseline)
    for name, payload in files.items():
        atomic_write_bytes(out / name, payload)
    logger.info(f"Reconstruction written to {out}")
    return 0

def _pair_problem(reference: np.ndarray, moving: np.ndarray) -> MotionProblem:
    # fully sampled single flat coil: state 0 holds the reference, state 1 the moving image
    full = SamplingMask(keep=np.ones(reference.shape, dtype=np.bool_))
    return MotionProblem(
        masks=(full, full),
        measurements=np.stack([fft2c(reference)[None], fft2c(moving)[None]]),
        maps=SensitivityMaps(maps=np.ones((1, *reference.shape), dtype=np.complex128)))

def cmd_register(args: argparse.Namespace) -> int:
    reference = read_image(args.reference)
    if args.moving is not None:
        prob = _pair_problem(reference, read_image(args.moving))
    else:
        prob = load_problem(args.problem)
    cfg = _load_config(RegistrationConfig, args)

    states = range(1, prob.n_states) if args.state is None else [args.state]
    fields = [zero_field(prob.shape) for _ in range(prob.n_states)]
    for state in states:
        if not 1 <= state < prob.n_states:
            raise IoException(f"state {state} outside [1, {prob.n_states})")
        fields[state] = register_state(reference, state, prob, cfg)
    write_fields(args.out, fields)
    return 0

def cmd_metrics(args: argparse.Namespace) -> int:
    estimate = read_image(args.estimate)
    reference = read_image(args.reference)
    print(f"nrmse = {nrmse(estimate, reference):.6f}")
    print(f"magnitude_nrmse = {magnitude_nrmse(estimate, reference):.6f}")
    return 0

# ---------------------------------------------------------------------------

def _add_config_flags(parser: argparse.ArgumentParser, seeded: bool = True):
    parser.add_argument("--config", default=None,
                        help="key=value configuration file (a manifest works too).")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="Override one configuration key; repeatable.")
    if seeded:
        parser.add_argument("--seed", type=int, default=None,
                            help="Overrides the configured seed.")

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="c2f-mc",
        description="Joint MRI reconstruction and non-rigid motion estimation "
                    "with a coarse-to-fine diffusion sampler.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="Log every reverse step and optimizer iteration.")
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="Corrupt a ground-truth image into a motion problem.")
    simulate.add_argument("truth", help="Ground-truth image CFL stem.")
    simulate.add_argument("--out", required=True, help="Output problem directory.")
    _add_config_flags(simulate)
    simulate.set_defaults(handler=cmd_simulate)

    spectrum = sub.add_parser("spectrum", help="Estimate a power spectrum from a corpus directory.")
    spectrum.add_argument("corpus", help="Directory of CFL images or image stacks.")
    spectrum.add_argument("--out", required=True, help="Output spectrum CFL stem.")
    spectrum.set_defaults(handler=cmd_spectrum)

    recon = sub.add_parser("reconstruct", help="Jointly reconstruct the image and the motion.")
    recon.add_argument("problem", help="Problem directory written by 'simulate'.")
    recon.add_argument("spectrum", help="Power spectrum CFL stem.")
    recon.add_argument("--out", required=True, help="Output directory.")
    recon.add_argument("--truth", default=None,
                       help="Ground-truth CFL stem; defaults to the problem's own when present.")
    _add_config_flags(recon)
    recon.set_defaults(handler=cmd_reconstruct)

    register = sub.add_parser("register", help="Estimate displacement fields against k-space.")
    register.add_argument("reference", help="Reference image CFL stem.")
    source = register.add_mutually_exclusive_group(required=True)
    source.add_argument("--problem", help="Problem directory whose states are registered.")
    source.add_argument("--moving", help="Moving image CFL stem, compared fully sampled.")
    register.add_argument("--state", type=int, default=None, help="Register only this state.")
    register.add_argument("--out", required=True, help="Output fields CFL stem.")
    _add_config_flags(register, seeded=False)
    register.set_defaults(handler=cmd_register)

    metrics = sub.add_parser("metrics", help="NRMSE of an estimate against a reference.")
    metrics.add_argument("estimate", help="Estimated image CFL stem.")
    metrics.add_argument("reference", help="Reference image CFL stem.")
    metrics.set_defaults(handler=cmd_metrics)
    return parser

def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    enable_logging(logging.DEBUG if args.verbose else logging.INFO)
    try:
        return args.handler(args)
    except (ReconException, IoException, FileNotFoundError, ValidationError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1

if __name__ == "__main__":
    sys.exit(main())
