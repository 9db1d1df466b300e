"""Command-line entry point: ``spatialqudit <command> ...``.

Exit codes: 0 success (including flagged non-convergence), 1 runtime or
numerical failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__, bitcommit, entanglement, modes, tomography
from .core import (PostselectionError, StateValidationError, bell_phi_plus,
                   depolarize_to_linear_entropy, fidelity, sqrt_fidelity)
from .io import (SCHEMA_VERSION, SchemaError, counts_from_dict, counts_to_dict,
                 density_to_dict, load_density, read_json, save_density, set_flavor,
                 settings_for, write_curves_csv, write_json, write_pgm)


def _warn(msg: str):
    print(f"warning: {msg}", file=sys.stderr)


# -- modes -----------------------------------------------------------------------

def cmd_modes(args) -> int:
    if args.action == "decompose":
        w = args.waist
        x0 = args.displacement * w
        c_g, c_v = modes.displaced_vortex_decomposition(x0, w)
        out = {"schema": f"decomposition/{SCHEMA_VERSION}", "displacement_waists": args.displacement,
               "waist": w, "c_G": [c_g.real, c_g.imag], "c_V": [c_v.real, c_v.imag]}
        if args.check:
            n_g, n_v = modes.displaced_vortex_numeric(x0, w)
            out["quadrature"] = {"c_G": [n_g.real, n_g.imag], "c_V": [n_v.real, n_v.imag]}
        write_json(out, args.out)
    elif args.action == "gouy":
        phase = modes.gouy_phase(args.order, args.z, args.zr)
        write_json({"schema": f"gouy/{SCHEMA_VERSION}", "order": args.order, "z": args.z,
                    "z_r": args.zr, "gouy_phase": phase}, args.out)
    else:
        beam = _parse_beam(args)
        intensity, phase, meta = modes.raster(beam, n=args.size, extent=args.extent)
        prefix = Path(args.out)
        write_pgm(intensity, prefix.with_name(prefix.name + "_intensity.pgm"), lo=0.0)
        write_pgm(phase, prefix.with_name(prefix.name + "_phase.pgm"), lo=-np.pi, hi=np.pi)
        meta.update({"schema": f"raster/{SCHEMA_VERSION}", "beam": args.mode or "displaced-vortex",
                     "intensity_max": float(intensity.max()), "phase_range": [-np.pi, np.pi],
                     "images": [prefix.name + "_intensity.pgm", prefix.name + "_phase.pgm"]})
        write_json(meta, prefix.with_name(prefix.name + ".json"))
    return 0


def _parse_beam(args):
    if args.mode is None:
        return modes.DisplacedVortex(args.displacement * args.waist, args.waist)
    text = args.mode.upper().replace(" ", "")
    try:
        if text.startswith("HG"):
            a, b = text[2:].split(",") if "," in text else (text[2], text[3:])
            return modes.FieldSuperposition.single(modes.HG(int(a), int(b), args.waist))
        if text.startswith("LGV"):
            a, b = text[3:].split(",")
            return modes.FieldSuperposition.single(modes.LGV(int(a), int(b), args.waist))
    except (ValueError, IndexError):
        pass
    raise SchemaError("--mode", f"cannot parse mode {args.mode!r} (try HG1,0 or LGV0,+1)")


# -- states ----------------------------------------------------------------------

def cmd_state(args) -> int:
    if args.kind == "phi-plus":
        rho = bell_phi_plus(args.dim).density()
    else:
        family = "qubit" if args.kind == "nonmax-qubit" else "qutrit"
        eps = args.epsilon * np.exp(1j * np.pi * args.phase)
        rho = entanglement.nonmax_state(family, eps).density()
    if args.linear_entropy is not None:
        rho = depolarize_to_linear_entropy(rho, args.linear_entropy)
    save_density(rho, args.out)
    return 0


# -- tomography ------------------------------------------------------------------

def cmd_tomo(args) -> int:
    if args.action == "simulate":
        rho = load_density(args.state)
        if len(set(rho.dims)) != 1:
            raise SchemaError("$.dims", "all arms must share one dimension")
        settings = tomography.measurement_set(rho.dims[0], len(rho.dims),
                                              overcomplete=(args.set == "overcomplete"))
        probs = tomography.born_probabilities(rho, settings)
        records = tomography.simulate_counts(probs, args.shots, args.seed, settings)
        write_json(counts_to_dict(records, rho.dims, args.set), args.out)
        return 0

    records, dims = counts_from_dict(read_json(args.counts))
    settings = settings_for(records, dims)
    rec = tomography.reconstruct_mle(records, settings, model=args.model, method=args.method,
                                     max_iters=args.max_iters, seed=args.seed)
    report = {
        "schema": f"reconstruction/{SCHEMA_VERSION}",
        "density_matrix": density_to_dict(rec.rho),
        "log_likelihood": -rec.neg_log_likelihood,
        "likelihood_model": rec.model,
        "optimizer": rec.method,
        "iterations": rec.iterations,
        "converged": rec.converged,
        "measurement_set": {"dims": list(dims), "flavor": set_flavor(settings),
                            "settings": len(settings)},
        "error_bars": None,
    }
    if args.truth:
        truth = load_density(args.truth)
        report["fidelity_with_truth"] = {"squared": fidelity(rec.rho, truth),
                                         "sqrt": sqrt_fidelity(rec.rho, truth)}
    write_json(report, args.out)
    summary = f"reconstructed {dims} state: converged={rec.converged} iterations={rec.iterations}"
    if args.truth:
        summary += f" fidelity={report['fidelity_with_truth']['squared']:.6f}"
    print(summary, file=sys.stderr)
    return 0


# -- analysis --------------------------------------------------------------------

def cmd_analyze(args) -> int:
    rho = load_density(args.rho)
    report = entanglement.analyze(rho)
    if report.tangle is None:
        _warn("tangle is defined for two qubits only; omitted")
    write_json(report.to_dict(), args.out)
    return 0


def cmd_bc(args) -> int:
    if args.action == "curves":
        write_curves_csv(bitcommit.curves_table(args.step), args.out)
        return 0
    rho = load_density(args.rho)
    report = bitcommit.security_point_from_source(rho)
    out = report.to_dict()
    out["inside_qubit_region_rule"] = "K^2 + C^2 >= 1/4"
    write_json(out, args.out)
    return 0


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spatialqudit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version",
                        version=f"spatialqudit {__version__} (schema version {SCHEMA_VERSION})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("modes", help="spatial-mode calculations")
    msub = p.add_subparsers(dest="action", required=True)
    d = msub.add_parser("decompose", help="displaced vortex in the {G, LGV0,+1} basis")
    d.add_argument("--displacement", type=float, required=True, help="x0 in units of the waist")
    d.add_argument("--waist", type=float, default=1.0)
    d.add_argument("--check", action="store_true", help="add quadrature cross-check")
    d.add_argument("--out")
    g = msub.add_parser("gouy", help="Gouy phase of an order-N mode")
    g.add_argument("--order", type=int, required=True)
    g.add_argument("--z", type=float, required=True)
    g.add_argument("--zr", type=float, default=1.0)
    g.add_argument("--out")
    r = msub.add_parser("raster", help="intensity/phase images of a beam")
    r.add_argument("--mode", help="e.g. HG1,0 or LGV0,+1; default is a displaced vortex")
    r.add_argument("--displacement", type=float, default=0.0, help="vortex offset in waists")
    r.add_argument("--waist", type=float, default=1.0)
    r.add_argument("--size", type=int, default=128)
    r.add_argument("--extent", type=float, default=3.0)
    r.add_argument("--out", required=True, help="output prefix")
    p.set_defaults(func=cmd_modes)

    p = sub.add_parser("state", help="write a reference density matrix")
    p.add_argument("kind", choices=["phi-plus", "nonmax-qubit", "nonmax-qutrit"])
    p.add_argument("--dim", type=int, default=2, choices=[2, 3])
    p.add_argument("--epsilon", type=float, default=1.0, help="|eps|")
    p.add_argument("--phase", type=float, default=0.0, help="arg(eps) in units of pi")
    p.add_argument("--linear-entropy", type=float, help="mix in white noise to this S_L")
    p.add_argument("--out")
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("tomo", help="simulate counts and reconstruct states")
    tsub = p.add_subparsers(dest="action", required=True)
    s = tsub.add_parser("simulate")
    s.add_argument("--state", required=True)
    s.add_argument("--set", choices=["minimal", "overcomplete"], default="overcomplete")
    s.add_argument("--shots", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    c = tsub.add_parser("reconstruct")
    c.add_argument("--counts", required=True)
    c.add_argument("--out")
    c.add_argument("--max-iters", type=int, default=50_000)
    c.add_argument("--seed", type=int, default=0, help="seed for restart perturbations")
    c.add_argument("--method", choices=["lbfgs", "simplex"], default="lbfgs")
    c.add_argument("--model", choices=["poisson", "lsq"], default="poisson")
    c.add_argument("--truth", help="density matrix to report fidelity against")
    p.set_defaults(func=cmd_tomo)

    p = sub.add_parser("analyze", help="entanglement report for a density matrix")
    p.add_argument("--rho", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("bc", help="bit-commitment security analysis")
    bsub = p.add_subparsers(dest="action", required=True)
    a = bsub.add_parser("analyze")
    a.add_argument("--rho", required=True)
    a.add_argument("--out")
    cv = bsub.add_parser("curves")
    cv.add_argument("--out")
    cv.add_argument("--step", type=float, default=0.01)
    p.set_defaults(func=cmd_bc)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, StateValidationError, PostselectionError,
            tomography.InsufficientDataError, modes.QuadratureError, OSError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
