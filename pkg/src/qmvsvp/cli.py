"""Command-line front end: ``qmvsvp {gen,sweep,optimize,reproduce,spectrum,sample}``."""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, analytic, simulator
from .encoding import DEFAULT_ENUMERATION_GUARD, QuditLayout, spectrum_enumerate, encode_coefficients
from .lattice import (DEFAULT_ENTRY_BOUND, LatticeBasis, generate_random_lattice, gram_from_basis,
                      load_lattice, save_lattice)
from .optimize import DEFAULT_GRID_SIZE, minimize_curve, ratio_report, sweep_gamma, write_minima_csv
from .stats import EnsembleConfig, ensemble_run, load_manifest_config, write_bundle

OUTPUT_ENV = "QMVSVP_OUTPUT_DIR"
ORACLE_TOL = 1e-9


class CheckFailed(RuntimeError):
    pass


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _nonneg(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return v


def _int_list(text):
    """``"5"``, ``"1,3,5"`` or ``"1..7"``."""
    out = []
    for part in text.split(","):
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out or min(out) < 0:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}")
    return out


def _order_list(text):
    out = []
    for part in text.split(","):
        if part in ("half", "full"):
            out.append(part)
        else:
            out.extend(_int_list(part))
    return out


def _out_dir(args) -> Path:
    base = Path(args.out) if args.out else Path(os.environ.get(OUTPUT_ENV, "."))
    base.mkdir(parents=True, exist_ok=True)
    return base


def _lattice_args(p, multiple=False):
    p.add_argument("--lattice", action="append" if multiple else "store",
                   help="lattice JSON file" + (" (repeatable)" if multiple else ""))
    p.add_argument("--dim", type=_positive, default=2)
    p.add_argument("--seed", type=_nonneg, default=0)
    p.add_argument("--entry-bound", type=_positive, default=DEFAULT_ENTRY_BOUND)


def _load_lattices(args) -> list[tuple[str, LatticeBasis]]:
    paths = args.lattice if isinstance(args.lattice, list) else ([args.lattice] if args.lattice else [])
    if paths:
        return [(Path(p).stem, load_lattice(p)) for p in paths]
    basis = generate_random_lattice(args.dim, args.entry_bound, args.seed)
    return [(f"seed{args.seed}", basis)]


def cmd_gen(args):
    out = _out_dir(args)
    seeds = np.random.SeedSequence(args.seed).spawn(args.count)
    written = []
    for n, child in enumerate(seeds):
        seed = int(child.generate_state(1, dtype=np.uint64)[0])
        basis = generate_random_lattice(args.dim, args.entry_bound, seed)
        written.append(str(save_lattice(basis, out / f"lattice_{n:03d}.json")))
    print(json.dumps({"written": len(written), "dir": str(out)}))


def cmd_sweep(args):
    (name, basis), = _load_lattices(args)
    G = gram_from_basis(basis)
    layout = QuditLayout(basis.dim, args.k)
    orders = [A for A in args.orders if A <= layout.qubits_per_qudit]
    curve = sweep_gamma(G, layout, args.grid_size, orders, name)
    extra = {}
    summary = {"lattice_id": name, "k": args.k, "rows": len(curve.gammas)}
    if args.oracle:
        if layout.total_qubits > args.guard:
            raise CheckFailed(f"--oracle needs {layout.total_qubits} qubits, guard is {args.guard}")
        oracle = simulator.oracle_curve(G, layout, curve.gammas, guard=args.guard)
        extra["mu_oracle"] = oracle
        err = float(np.max(np.abs(curve.mu - oracle) / np.maximum(1.0, np.abs(curve.mu))))
        summary["max_oracle_error"] = err
    path = Path(args.output) if args.output else _out_dir(args) / f"sweep_{name}_k{args.k}.csv"
    curve.write_csv(path, extra)
    summary["csv"] = str(path)
    print(json.dumps(summary))
    if args.oracle and summary["max_oracle_error"] > ORACLE_TOL:
        raise CheckFailed(f"oracle mismatch {summary['max_oracle_error']:.3e} > {ORACLE_TOL}")


def cmd_optimize(args):
    reports = []
    for name, basis in _load_lattices(args):
        G = gram_from_basis(basis)
        layout = QuditLayout(basis.dim, args.k)
        orders = [A for A in args.orders if A <= layout.qubits_per_qudit]
        reports.append(ratio_report(G, layout, args.grid_size, orders, not args.no_refine, lattice_id=name))
    path = Path(args.output) if args.output else _out_dir(args) / f"minima_k{args.k}.csv"
    write_minima_csv(reports, path)
    print(json.dumps({"csv": str(path), "lattices": len(reports)}))


def _oracle_validate(stats, ks, guard):
    worst = 0.0
    for (lat, k), curve in sorted(stats.curves.items()):
        if k not in ks:
            continue
        basis = stats.lattices[lat]
        G = gram_from_basis(basis)
        layout = QuditLayout(basis.dim, k)
        if layout.total_qubits > guard:
            raise CheckFailed(f"oracle validation at k={k} needs {layout.total_qubits} qubits, guard is {guard}")
        oracle = simulator.oracle_curve(G, layout, curve.gammas, guard=guard)
        worst = max(worst, float(np.max(np.abs(curve.mu - oracle) / np.maximum(1.0, np.abs(curve.mu)))))
    return worst


def cmd_reproduce(args):
    if args.manifest:
        config = load_manifest_config(args.manifest)
    else:
        kw = dict(num_lattices=args.num_lattices, dim=args.dim, ks=tuple(args.k),
                  grid_size=args.grid_size, base_seed=args.seed, entry_bound=args.entry_bound,
                  refine=args.refine)
        if args.orders:
            kw["approx_orders"] = tuple(args.orders)
        config = EnsembleConfig(**kw)
    too_big = [k for k in config.ks if config.dim * (k + 1) > args.analytic_guard]
    if too_big:
        raise CheckFailed(f"k={too_big} exceeds the analytic resource guard of {args.analytic_guard} qubits")
    out = _out_dir(args)
    stats = ensemble_run(config, jobs=args.jobs)
    manifest = write_bundle(stats, out)
    if args.oracle_validate:
        ks = set(args.oracle_validate)
        err = _oracle_validate(stats, ks, args.guard)
        manifest["oracle_validation"] = {"ks": sorted(ks), "max_relative_error": err}
    if not args.no_plots:
        from .plotting import render_figures
        manifest["figures"] = render_figures(stats, out)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(json.dumps({"dir": str(out), "files": manifest["files"], "figures": manifest.get("figures", {})}))
    if args.oracle_validate and manifest["oracle_validation"]["max_relative_error"] > ORACLE_TOL:
        raise CheckFailed(f"oracle validation failed: {manifest['oracle_validation']['max_relative_error']:.3e}")


def cmd_spectrum(args):
    (name, basis), = _load_lattices(args)
    G = gram_from_basis(basis)
    layout = QuditLayout(basis.dim, args.k)
    spectrum = spectrum_enumerate(G, layout, args.guard)
    if args.limit:
        spectrum = spectrum[:args.limit]
    path = Path(args.output) if args.output else _out_dir(args) / f"spectrum_{name}_k{args.k}.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bits", *[f"x{i}" for i in range(layout.num_qudits)], "energy"])
        for x, energy in spectrum:
            bits = "".join(map(str, encode_coefficients(layout, x)))
            w.writerow([bits, *x, energy])
    shortest = next((e for x, e in spectrum if any(x)), None)
    print(json.dumps({"csv": str(path), "rows": len(spectrum), "shortest_norm_sq": shortest}))


def cmd_sample(args):
    (name, basis), = _load_lattices(args)
    G = gram_from_basis(basis)
    layout = QuditLayout(basis.dim, args.k)
    if args.gamma is None:
        curve = sweep_gamma(G, layout, args.grid_size)
        gamma, _ = minimize_curve(curve.gammas, curve.mu, lambda g: analytic.mean_value(G, layout, g).mu)
    else:
        gamma = args.gamma
    state = simulator.build_state(G, layout, simulator.AngleParams(gamma, args.beta), args.guard)
    if args.dump_state:
        simulator.dump_state(state, args.dump_state)
    samples = simulator.sample_bitstrings(state, G, layout, args.count, args.sample_seed)
    path = Path(args.output) if args.output else _out_dir(args) / f"samples_{name}_k{args.k}.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bits", *[f"x{i}" for i in range(layout.num_qudits)], "energy"])
        for bits, x, e in samples:
            w.writerow(["".join(map(str, bits)), *x.tolist(), e.item()])
    nonzero = samples.energies[samples.energies > 0]
    print(json.dumps({
        "csv": str(path), "gamma": gamma, "count": len(samples),
        "mean_energy": float(samples.energies.mean()),
        "expected_energy": simulator.expectation_hp(state, G, layout),
        "shortest_sampled": nonzero.min().item() if len(nonzero) else None,
    }))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmvsvp", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate random lattice JSON files")
    p.add_argument("--dim", type=_positive, default=2)
    p.add_argument("--count", type=_positive, default=45)
    p.add_argument("--seed", type=_nonneg, default=0)
    p.add_argument("--entry-bound", type=_positive, default=DEFAULT_ENTRY_BOUND)
    p.add_argument("--out", help=f"output directory (default ${OUTPUT_ENV} or .)")
    p.set_defaults(func=cmd_gen)

    def common(p, multiple=False):
        _lattice_args(p, multiple)
        p.add_argument("--k", type=_nonneg, default=1, help="qudit size (k+1 qubits per qudit)")
        p.add_argument("--out", help=f"output directory (default ${OUTPUT_ENV} or .)")
        p.add_argument("--output", help="explicit output file")
        p.add_argument("--guard", type=_positive, default=simulator.MEMORY_GUARD,
                       help="max qubits for statevector / enumeration")

    p = sub.add_parser("sweep", help="tabulate mu and mu_A over a gamma grid")
    common(p)
    p.add_argument("--grid-size", type=_positive, default=DEFAULT_GRID_SIZE)
    p.add_argument("--orders", type=_int_list, default=[1, 2, 3])
    p.add_argument("--oracle", action="store_true", help="add a statevector mu_oracle column")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", help="minima ratios mu(gamma_A)/mu(gamma_opt)")
    common(p, multiple=True)
    p.add_argument("--grid-size", type=_positive, default=DEFAULT_GRID_SIZE)
    p.add_argument("--orders", type=_int_list, default=[1, 2, 3])
    p.add_argument("--no-refine", action="store_true", help="grid-only minimisers")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("reproduce", help="ensemble figure data (CSV + manifest + PNG)")
    p.add_argument("--num-lattices", type=_positive, default=45)
    p.add_argument("--dim", type=_positive, default=2)
    p.add_argument("--k", type=_int_list, default=list(range(1, 8)))
    p.add_argument("--orders", type=_order_list, default=None)
    p.add_argument("--grid-size", type=_positive, default=DEFAULT_GRID_SIZE)
    p.add_argument("--seed", type=_nonneg, default=EnsembleConfig.base_seed)
    p.add_argument("--entry-bound", type=_positive, default=EnsembleConfig.entry_bound)
    p.add_argument("--refine", action="store_true", help="golden-section refined minimisers")
    p.add_argument("--jobs", type=_positive, default=1)
    p.add_argument("--manifest", help="replay the configuration stored in a manifest.json")
    p.add_argument("--oracle-validate", type=_int_list, default=None, metavar="KS",
                   help="check every curve at these k against the statevector")
    p.add_argument("--guard", type=_positive, default=simulator.MEMORY_GUARD)
    p.add_argument("--analytic-guard", type=_positive, default=24)
    p.add_argument("--no-plots", action="store_true")
    p.add_argument("--out", help=f"output directory (default ${OUTPUT_ENV} or .)")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("spectrum", help="enumerate all (x, energy) pairs")
    common(p)
    p.add_argument("--limit", type=_nonneg, default=0)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("sample", help="sample lattice vectors from the QAOA state")
    common(p)
    p.add_argument("--gamma", type=float, default=None, help="default: optimised gamma")
    p.add_argument("--beta", type=float, default=math.pi / 4)
    p.add_argument("--grid-size", type=_positive, default=DEFAULT_GRID_SIZE)
    p.add_argument("--count", type=_positive, default=1000)
    p.add_argument("--sample-seed", type=_nonneg, default=0)
    p.add_argument("--dump-state", help="write raw amplitudes to this file")
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (CheckFailed, ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
