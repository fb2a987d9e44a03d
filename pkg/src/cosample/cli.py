"""Command line front end.

Subcommands: sample (image -> measurement file), reconstruct (measurement ->
image), extract (operator -> explicit matrix file), analyze (isometry / power /
response-field reports over a corpus), channel (noise + quantization on a
measurement file), export-dmd (matrix file -> pattern stack).

Exit codes: 0 success, 2 validation or file-format failure, 3 numerical abort.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__, backend
from .analysis import erf_row, measurement_power, psnr, rip_constant, ssim
from .channel import add_awgn, quantize, quantizer_params
from .extraction import extract, save_system, verify_linearity
from .formats import (read_matrix_file, read_measurement_file, write_measurement_file,
                      write_pattern_file)
from .imageio import center_crop, load_corpus, load_image, save_image, save_image_with_sidecar
from .pgd import PgdConfig, pgd_solve
from .sampling import (VARIANTS, CosoConfig, back_project, build_coso, combine_init,
                       config_from_dict, config_to_dict, sample_image, split_measurement,
                       with_variant)

_COMPARE_VARIANTS = "block_gaussian,g_scrambled,dct_only"


def _add_config_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("sampling configuration")
    g.add_argument("--config", metavar="JSON", help="config file; explicit flags override it")
    g.add_argument("--height", type=int)
    g.add_argument("--width", type=int)
    g.add_argument("--gamma", type=float, help="total sampling ratio M/N")
    g.add_argument("--gamma-d", type=float, help="transform-branch share of gamma")
    g.add_argument("--gamma-g", type=float, help="gaussian-branch share of gamma")
    g.add_argument("--block", type=int, help="gaussian branch block side (default 32)")
    g.add_argument("--seed-perm", type=int, help="pixel permutation seed")
    g.add_argument("--seed-gauss", type=int, help="gaussian matrix seed")
    g.add_argument("--variant", choices=sorted(VARIANTS))
    g.add_argument("--weights", metavar="CSWT", help="filter weights file (filtered variants)")
    g.add_argument("--filter-seed", type=int, help="seed for a fresh filter when no weights file")
    g.add_argument("--filter-channels", type=int, help="filter width C (default 16)")
    g.add_argument("--shared-filter", action="store_true",
                   help="drive both branches from the filter's first output channel")


_FLAG_TO_FIELD = {
    "height": "height", "width": "width", "gamma": "gamma", "gamma_d": "gamma_d",
    "gamma_g": "gamma_g", "block": "block", "seed_perm": "perm_seed",
    "seed_gauss": "gauss_seed", "variant": "variant", "weights": "weights_path",
    "filter_seed": "filter_seed", "filter_channels": "filter_channels",
}


def _build_config(args, fallback: dict = None) -> CosoConfig:
    d = dict(fallback or {})
    if args.config:
        with open(args.config) as f:
            d.update(json.load(f))
    for flag, field in _FLAG_TO_FIELD.items():
        v = getattr(args, flag, None)
        if v is not None:
            d[field] = v
    if getattr(args, "shared_filter", False):
        d["shared_filter"] = True
    if "weights_path" in d and d["weights_path"] is not None and "variant" not in d:
        d["variant"] = "full_coso"
    for required in ("height", "width", "gamma"):
        if d.get(required) is None:
            raise ValueError(f"missing required config value: {required}")
    return config_from_dict(d)


def _seeds_of(config: CosoConfig) -> dict:
    return {"perm_seed": config.perm_seed, "gauss_seed": config.gauss_seed,
            "filter_seed": config.filter_seed}


def _write_manifest(primary_out: str, command: str, argv, config, inputs, outputs,
                    seeds: dict, timings: dict) -> str:
    path = str(primary_out) + ".manifest.json"
    doc = {
        "command": command,
        "argv": list(argv),
        "version": __version__,
        "backend": backend.current(),
        "config": config_to_dict(config) if isinstance(config, CosoConfig) else config,
        "inputs": [str(p) for p in inputs],
        "outputs": [str(p) for p in outputs],
        "seeds": seeds,
        "timings_s": {k: round(v, 6) for k, v in timings.items()},
    }
    with open(path, "w") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def _load_cropped(path, height: int, width: int) -> np.ndarray:
    img = load_image(path)
    if img.shape != (height, width):
        img = center_crop(img, height, width)
    return img


# ---- subcommands ----------------------------------------------------------

def cmd_sample(args) -> int:
    img = load_image(args.image)
    fallback = {}
    if args.height is None and args.width is None and args.config is None:
        fallback = {"height": img.shape[0], "width": img.shape[1]}
    config = _build_config(args, fallback)
    if img.shape != (config.height, config.width):
        img = center_crop(img, config.height, config.width)
    if config.gamma == 0.0:
        print("warning: gamma = 0 produces an empty measurement", file=sys.stderr)
    t0 = time.perf_counter()
    meas = sample_image(img, config)
    dt = time.perf_counter() - t0
    write_measurement_file(args.out, meas.y, config_to_dict(config))
    manifest = _write_manifest(args.out, "sample", args.argv, config,
                               [args.image], [args.out], _seeds_of(config),
                               {"sample": dt})
    print(f"sampled {config.height}x{config.width} -> {meas.m} measurements "
          f"({config.variant}) -> {args.out}")
    print(f"manifest: {manifest}")
    return 0


def cmd_reconstruct(args) -> int:
    y, cfg_dict = read_measurement_file(args.measurement)
    config = config_from_dict(cfg_dict)
    op = build_coso(config)
    meas = split_measurement(y, config)
    init = combine_init(*back_project(meas))
    solver = PgdConfig(iters=args.iters, lam=args.lam, step=args.step,
                       tol=args.tol, clamp=args.clamp)
    t0 = time.perf_counter()
    recon, trace = pgd_solve(op, y, init, solver)
    dt = time.perf_counter() - t0

    img_path, sidecar = save_image_with_sidecar(args.out, recon)
    trace_path = str(args.out) + ".trace.csv"
    init_resid = float(np.linalg.norm(op.apply(init.ravel()) - y))
    with open(trace_path, "w") as f:
        f.write("iteration,objective,residual_norm\n")
        f.write(f"0,{trace.initial_objective!r},{init_resid!r}\n")
        for k in range(trace.iterations):
            f.write(f"{k + 1},{float(trace.objectives[k])!r},"
                    f"{float(trace.residual_norms[k])!r}\n")

    outputs = [img_path, sidecar, trace_path]
    print(f"reconstructed {config.height}x{config.width} from {meas.m} measurements "
          f"in {trace.iterations} iterations (step {trace.step:.6g}) -> {img_path}")
    if args.truth:
        truth = _load_cropped(args.truth, config.height, config.width)
        print(f"psnr: {psnr(truth, recon):.4f} dB  ssim: {ssim(truth, recon):.6f}")
    manifest = _write_manifest(args.out, "reconstruct", args.argv, config,
                               [args.measurement] + ([args.truth] if args.truth else []),
                               outputs, _seeds_of(config), {"solve": dt})
    print(f"manifest: {manifest}")
    return 0


def cmd_extract(args) -> int:
    config = _build_config(args)
    op = build_coso(config)
    report = verify_linearity(op, config.height, config.width)
    if not report.passed:
        print(f"linearity check failed: max residual {report.max_residual:.3e} "
              f"over {report.trials} trials (tolerance {report.tolerance:.1e})",
              file=sys.stderr)
        return 2
    t0 = time.perf_counter()
    system = extract(op, config.height, config.width, parallel=not args.serial)
    dt = time.perf_counter() - t0
    save_system(system, args.out)
    outputs = [args.out]
    if args.dmd:
        dmd_path = os.path.splitext(str(args.out))[0] + ".csmp"
        write_pattern_file(dmd_path, system.patterns(), system.bias)
        outputs.append(dmd_path)
    manifest = _write_manifest(args.out, "extract", args.argv, config, [],
                               outputs, _seeds_of(config),
                               {"extract": dt})
    mode = "serial" if args.serial else "parallel"
    print(f"extracted {system.m}x{system.n} system ({config.variant}, {mode}) "
          f"in {dt:.2f}s -> {args.out}")
    print(f"linearity residual: {report.max_residual:.3e}")
    print(f"manifest: {manifest}")
    return 0


def cmd_analyze(args) -> int:
    config = _build_config(args)
    h, w = config.height, config.width
    images = [img if img.shape == (h, w) else center_crop(img, h, w)
              for img in load_corpus(args.corpus)]
    variants = [v.strip() for v in args.variants.split(",") if v.strip()]
    for v in variants:
        if v not in VARIANTS:
            raise ValueError(f"unknown variant {v!r}")
    erf_rows = [int(r) for r in args.erf_rows.split(",") if r.strip()] if args.erf_rows else []
    os.makedirs(args.out_dir, exist_ok=True)

    deltas = {}
    outputs = []
    timings = {}
    rip_path = os.path.join(args.out_dir, "rip.csv")
    with open(rip_path, "w") as rip_f:
        rip_f.write("variant,delta,ratio_min,ratio_max,images\n")
        for v in variants:
            vcfg = with_variant(config, v)
            op = build_coso(vcfg)
            t0 = time.perf_counter()
            rip = rip_constant(op, images)
            system = extract(op, h, w, parallel=not args.serial)
            timings[f"analyze_{v}"] = time.perf_counter() - t0
            deltas[v] = rip.delta
            rip_f.write(f"{v},{rip.delta!r},{float(rip.ratios.min())!r},"
                        f"{float(rip.ratios.max())!r},{len(rip.ratios)}\n")

            power = measurement_power(system.phi, images)
            p_path = os.path.join(args.out_dir, f"power_{v}.csv")
            with open(p_path, "w") as f:
                f.write("row,mean_log_amplitude\n")
                for i, val in enumerate(power.values):
                    f.write(f"{i},{float(val)!r}\n")
            outputs.append(p_path)

            for r in erf_rows:
                field = erf_row(system.phi, r, h, w)
                peak = np.max(np.abs(field))
                rendered = 0.5 + 0.5 * (field / peak if peak > 0 else field)
                e_path = os.path.join(args.out_dir, f"erf_{v}_row{r}.pgm")
                save_image(e_path, rendered)
                outputs.append(e_path)
            print(f"{v}: delta = {rip.delta:.4f}, M = {system.m}")
    outputs.insert(0, rip_path)

    if args.assert_trend:
        need = ("g_scrambled", "block_gaussian")
        if any(v not in deltas for v in need):
            raise ValueError("--assert-trend needs variants g_scrambled and block_gaussian")
        if deltas["g_scrambled"] >= deltas["block_gaussian"]:
            print(f"trend violated: delta(g_scrambled) = {deltas['g_scrambled']:.4f} >= "
                  f"delta(block_gaussian) = {deltas['block_gaussian']:.4f}", file=sys.stderr)
            return 2
        print(f"trend holds: delta(g_scrambled) = {deltas['g_scrambled']:.4f} < "
              f"delta(block_gaussian) = {deltas['block_gaussian']:.4f}")

    manifest = _write_manifest(rip_path, "analyze", args.argv, config,
                               [args.corpus], outputs, _seeds_of(config), timings)
    print(f"manifest: {manifest}")
    return 0


def cmd_channel(args) -> int:
    y, cfg_dict = read_measurement_file(args.measurement)
    t0 = time.perf_counter()
    noisy = add_awgn(y, args.sigma, args.seed)
    params = quantizer_params(noisy, args.qbits)
    degraded = quantize(noisy, args.qbits, **params)
    dt = time.perf_counter() - t0
    out_cfg = dict(cfg_dict)
    out_cfg.update({"sigma": args.sigma, "noise_seed": args.seed,
                    "qbits": args.qbits, "quantizer": params})
    write_measurement_file(args.out, degraded, out_cfg)
    manifest = _write_manifest(args.out, "channel", args.argv, out_cfg,
                               [args.measurement], [args.out],
                               {"noise_seed": args.seed}, {"channel": dt})
    print(f"degraded {y.size} measurements (sigma={args.sigma}, q={args.qbits}) -> {args.out}")
    print(f"manifest: {manifest}")
    return 0


def cmd_export_dmd(args) -> int:
    phi, bias = read_matrix_file(args.matrix)
    n = args.height * args.width
    if phi.shape[1] != n:
        raise ValueError(f"matrix has {phi.shape[1]} columns but geometry "
                         f"{args.height}x{args.width} = {n}")
    patterns = phi.reshape(phi.shape[0], args.height, args.width)
    write_pattern_file(args.out, patterns, bias)
    manifest = _write_manifest(args.out, "export-dmd", args.argv, None,
                               [args.matrix], [args.out], {}, {})
    print(f"wrote {phi.shape[0]} patterns of {args.height}x{args.width} -> {args.out}")
    print(f"manifest: {manifest}")
    return 0


# ---- parser ---------------------------------------------------------------

def _make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cosample",
        description="Dual-branch compressed sampling, matrix extraction, and reconstruction.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("sample", help="measure an image into a measurement file")
    s.add_argument("image")
    _add_config_flags(s)
    s.add_argument("--out", required=True, help="output measurement file")
    s.set_defaults(fn=cmd_sample)

    s = sub.add_parser("reconstruct", help="solve a measurement file back to an image")
    s.add_argument("measurement")
    s.add_argument("--iters", type=int, default=20)
    s.add_argument("--lambda", dest="lam", type=float, default=1e-3)
    s.add_argument("--step", type=float, default=0.0, help="0 selects the automatic step")
    s.add_argument("--tol", type=float, default=0.0, help="relative objective change for early stop")
    s.add_argument("--clamp", action="store_true", help="clip iterates to [0, 1]")
    s.add_argument("--truth", help="reference image for psnr/ssim")
    s.add_argument("--out", required=True, help="output image path")
    s.set_defaults(fn=cmd_reconstruct)

    s = sub.add_parser("extract", help="probe the configured operator into a matrix file")
    _add_config_flags(s)
    s.add_argument("--serial", action="store_true", help="disable threaded probing")
    s.add_argument("--dmd", action="store_true", help="also write the pattern stack (.csmp)")
    s.add_argument("--out", required=True, help="output matrix file")
    s.set_defaults(fn=cmd_extract)

    s = sub.add_parser("analyze", help="isometry, row power, and response fields over a corpus")
    _add_config_flags(s)
    s.add_argument("--corpus", required=True, help="directory of images")
    s.add_argument("--variants", default=_COMPARE_VARIANTS,
                   help=f"comma list (default {_COMPARE_VARIANTS})")
    s.add_argument("--erf-rows", default="", help="comma list of matrix rows to render")
    s.add_argument("--assert-trend", action="store_true",
                   help="exit 2 unless delta(g_scrambled) < delta(block_gaussian)")
    s.add_argument("--serial", action="store_true", help="disable threaded probing")
    s.add_argument("--out-dir", required=True)
    s.set_defaults(fn=cmd_analyze)

    s = sub.add_parser("channel", help="apply noise and quantization to a measurement file")
    s.add_argument("measurement")
    s.add_argument("--sigma", type=float, default=0.0, help="noise level on the 0..255 scale")
    s.add_argument("--qbits", type=int, default=32, help="quantizer depth, 1..32")
    s.add_argument("--seed", type=int, default=0, help="noise seed")
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_channel)

    s = sub.add_parser("export-dmd", help="matrix file to physical pattern stack")
    s.add_argument("matrix")
    s.add_argument("--height", type=int, required=True)
    s.add_argument("--width", type=int, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_export_dmd)
    return p


def main(argv=None) -> int:
    effective = list(sys.argv[1:] if argv is None else argv)
    args = _make_parser().parse_args(effective)
    args.argv = effective
    try:
        return args.fn(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ArithmeticError as e:
        print(f"numerical abort: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
