"""Command-line front end.

    gravaudit <subcommand> --config run.toml [--out DIR] [--format csv,json]

Exit codes: 0 success, 1 configuration error, 2 numerical failure (a
``diagnostic.json`` is written to the output directory).
"""

from __future__ import annotations

import argparse
import sys
import traceback
from pathlib import Path

import numpy as np

from . import __version__, amplitudes, entanglement, firstq, fock, model
from .config import ConfigError, RunConfig, load_config
from .potential import PotentialField, radial_profile
from .quadrature import QuadratureSpec, ball_pair_coulomb, mc_oracle
from .report import SCHEMA_VERSION, Rows, to_json, write_reports

SUBCOMMANDS = ("verdict", "integral", "fock", "firstq", "sweep")
EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2
BR = model.BRANCHES


def _suite_block(result: entanglement.SuiteResult, rows: Rows, prefix: str = "") -> dict:
    V = result.V
    for i in range(2):
        for j in range(2):
            rows.add(f"{prefix}V_{BR[i]}{BR[j]}", V.provenance, V.entries[i, j], f"scale={V.scale}")
    t = result.tensor.entries
    for idx in np.ndindex(2, 2, 2, 2):
        i, j, m, k = idx
        rows.add(f"{prefix}tensor_{BR[i]}{BR[j]};{BR[m]}{BR[k]}", "exchange", t[idx],
                 f"scale={result.tensor.scale}")
    block = {"V": {"provenance": V.provenance, "scale": V.scale, "entries": V.entries},
             "tensor": t, "betas": {}, "reports": {}, "degenerate": list(result.degenerate),
             "dominant_tie": result.dominant_tie, "conclusion_holds": result.conclusion_holds}
    for mode, beta in result.betas.items():
        block["betas"][mode] = {"scale": beta.scale, "tie": beta.tie, "entries": beta.entries}
        for i in range(2):
            for j in range(2):
                rows.add(f"{prefix}beta_{BR[i]}{BR[j]}", mode, beta.entries[i, j], f"scale={beta.scale}")
    for mode, rep in result.reports.items():
        block["reports"][mode] = rep.to_dict()
        rows.add(f"{prefix}concurrence", mode, rep.concurrence, f"verdict={rep.verdict}")
        rows.add(f"{prefix}det", mode, rep.det, "")
    for mode in result.degenerate:
        rows.add(f"{prefix}concurrence", mode, float("nan"), "verdict=degenerate-state")
    return block


def _run_suite(cfg: RunConfig, geometry) -> entanglement.SuiteResult:
    v = cfg.section("verdict")
    return entanglement.verdict_suite(
        geometry, cfg.params, cfg.quadrature, v_source=v["v_source"], scale=v["scale"],
        tolerance=v["tolerance"], modes=tuple(v["modes"]))


def cmd_verdict(cfg: RunConfig, rows: Rows) -> dict:
    block = _suite_block(_run_suite(cfg, cfg.geometry), rows)
    block["branch_distances"] = model.branch_distances(cfg.geometry)
    try:
        block["kappa"] = model.kappa(cfg.params)
    except model.NumericalError:
        block["kappa"] = None  # out of double range; log10_abs_kappa still reported
    block["log10_abs_kappa"] = model.log10_abs_kappa(cfg.params)
    return block


def cmd_integral(cfg: RunConfig, rows: Rows) -> dict:
    params = cfg.params
    R = params.R
    spec = cfg.quadrature
    if spec.method != "gauss-product":
        spec = QuadratureSpec("gauss-product", spec.radial_nodes, spec.angular_nodes,
                              spec.mc_samples, spec.rng_seed)
    mc_spec = QuadratureSpec("monte-carlo", spec.radial_nodes, spec.angular_nodes,
                             max(spec.mc_samples, 1000), spec.rng_seed)
    profile = lambda c: (lambda x: radial_profile(params, np.linalg.norm(x - c, axis=-1)))
    table = []
    for ratio in cfg.section("integral")["d_over_R"]:
        cA, cB = np.zeros(3), np.array([ratio * R, 0.0, 0.0])
        ballA, ballB = (cA, R), (cB, R)
        quad = ball_pair_coulomb(profile(cA), profile(cB), ballA, ballB, spec)
        far = model.farfield_coupling(params) / (ratio * R)
        rel = abs(quad / far - 1.0)
        entry = {"d_over_R": ratio, "quadrature": quad, "farfield": far, "rel_dev": rel}
        meta = f"d_over_R={ratio!r};quadrature={quad!r};farfield={far!r}"
        if cfg.section("integral")["monte_carlo"]:
            est, se = mc_oracle(profile(cA), profile(cB), ballA, ballB, mc_spec)
            entry.update(mc_estimate=est, mc_std_error=se)
            meta += f";mc={est!r};mc_stderr={se!r}"
        table.append(entry)
        rows.add("rel_dev_vs_farfield", "gauss-product", rel, meta)
    devs = [e["rel_dev"] for e in table]
    return {"table": table, "nodes": [spec.radial_nodes, spec.angular_nodes],
            "mc_samples": mc_spec.mc_samples,
            "rel_dev_non_increasing": all(b <= a for a, b in zip(devs, devs[1:]))}


def _fock_hamiltonian(f: dict, grid: fock.ModeGrid, rng, coupling: float = 1.0):
    if f["potential"] == "random":
        H = fock.random_quad_hamiltonian(grid, rng, coupling)
        if f["pair_coupling"]:
            C = coupling * (rng.standard_normal((grid.D, grid.D)) + 1j * rng.standard_normal((grid.D, grid.D)))
            H = fock.QuadHamiltonian(H.A, H.B, C, H.energies)
        return H
    return fock.build_kernels(grid, fock.gaussian_phi_hat(f["amplitude"], f["width"]), coupling)


def cmd_fock(cfg: RunConfig, rows: Rows) -> dict:
    f = cfg.section("fock")
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 1]))
    grid = (fock.ModeGrid(f["momenta"], f["mass"]) if f["momenta"]
            else fock.ModeGrid.symmetric(f["D"], f["p_max"], f["mass"]))
    H = _fock_hamiltonian(f, grid, rng).without_pairs()
    F = rng.standard_normal(2 * grid.D) + 1j * rng.standard_normal(2 * grid.D)
    fid = fock.theorem_check(H, F, f["N"], f["duration"])
    rows.add("theorem_fidelity", "hartree", fid, f"D={grid.D};N={f['N']};duration={f['duration']!r}")
    out = {"grid": {"momenta": grid.momenta, "mass": grid.m}, "theorem_fidelity": fid}
    if f["random_draws"]:
        suite_rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 2]))
        fids = []
        for _ in range(f["random_draws"]):
            Hr = fock.random_quad_hamiltonian(grid, suite_rng)
            Fr = suite_rng.standard_normal(2 * grid.D) + 1j * suite_rng.standard_normal(2 * grid.D)
            fids.append(fock.theorem_check(Hr, Fr, f["N"], f["duration"]))
        out["random_suite_min_fidelity"] = min(fids)
        rows.add("theorem_fidelity_min", "random-suite", min(fids), f"draws={len(fids)}")
    if f["pair_coupling"]:
        out["pair_demo"] = _pair_block(f, grid, cfg.seed, rows)
    return out


def _pair_block(f: dict, grid, seed: int, rows: Rows) -> dict:
    runs = []
    for eps in f["pair_epsilons"]:
        rng = np.random.default_rng(np.random.SeedSequence([seed, 3]))
        H = _fock_hamiltonian({**f, "pair_coupling": True}, grid, rng, eps)
        res = fock.pair_demo(H, f["pair_duration"], f["pair_N_max"])
        runs.append({"epsilon": eps, **res.to_dict()})
        rows.add("pair_mean_total_number", f"epsilon={eps!r}", res.mean_total_number,
                 f"sector_entropy={res.sector_entropy!r};charge_drift={res.charge_drift!r}")
    eps = np.array([r["epsilon"] for r in runs])
    growth = np.array([r["mean_total_number"] - r["initial_total_number"] for r in runs])
    slope = float(np.polyfit(np.log(eps), np.log(growth), 1)[0]) if np.all(growth > 0) else float("nan")
    rows.add("pair_growth_loglog_slope", "pair-demo", slope, "")
    return {"runs": runs, "loglog_slope": slope}


def cmd_firstq(cfg: RunConfig, rows: Rows) -> dict:
    fq = cfg.section("firstq")
    params, geom = cfg.params, cfg.geometry
    integrals = firstq.packet_integrals(geom, params, spec=cfg.quadrature, v_source=fq["v_source"])
    U = firstq.propagators_by_order(geom, params, integrals=integrals)
    ident = firstq.beta_identical(U, fq["max_order"])
    dist = firstq.beta_distinguishable(U, fq["max_order"])
    exch4 = firstq.beta_identical(U, 4, exact=True).diagonal_exchange
    for i in range(2):
        for j in range(2):
            name = f"{BR[i]}{BR[j]}"
            rows.add(f"beta_{name}", "firstq-identical", ident.beta.entries[i, j], f"max_order={fq['max_order']}")
            rows.add(f"beta_{name}", "firstq-distinguishable", dist.beta.entries[i, j], f"max_order={fq['max_order']}")
            rows.add(f"exchange4_{name}", "diagonal-approximation", exch4[i, j], "")
    params1 = params if params.N == 1 else params.replace(N=1)
    cross = firstq.cross_framework_check(geom, params1, cfg.quadrature, fq["v_source"])
    rows.add("cross_framework_max_rel_dev", "q1-vs-q2", cross.max_rel_dev,
             f"N_used=1;v_source={fq['v_source']}")
    return {
        "max_order": fq["max_order"],
        "identical": {"beta": ident.beta.entries, "full_exchange": ident.full_exchange,
                      "diagonal_exchange": ident.diagonal_exchange,
                      "concurrence": _safe_concurrence(ident.beta)},
        "distinguishable": {"beta": dist.beta.entries, "exchange": dist.exchange,
                            "row_factor": dist.row_factor, "col_factor": dist.col_factor,
                            "concurrence": _safe_concurrence(dist.beta)},
        "exchange_order4": exch4,
        "cross_framework": {"q1_exchange": cross.q1_exchange,
                            "q2_diagonal_exchange": cross.q2_diagonal_exchange,
                            "max_rel_dev": cross.max_rel_dev, "N_used": 1},
        "caveat": "order-2 propagator uses the instantaneous Coulomb-kernel substitution",
    }


def _safe_concurrence(beta) -> float:
    try:
        return entanglement.analyze(beta).concurrence
    except entanglement.DegenerateStateError:
        return float("nan")


def cmd_sweep(cfg: RunConfig, rows: Rows) -> dict:
    sw = cfg.section("sweep")
    axis = np.asarray(sw["axis"], dtype=float)
    points = []
    for shift in sw["shifts"]:
        c = cfg.geometry.centers.copy()
        c[2:] += shift * axis
        geom = model.SetupGeometry.from_array(c, cfg.geometry.R)
        result = _run_suite(cfg, geom)
        verdicts = {m: r.to_dict() for m, r in result.reports.items()}
        points.append({"shift": shift, "branch_distances": model.branch_distances(geom),
                       "reports": verdicts, "degenerate": list(result.degenerate)})
        # re/abs carry the largest concurrence over modes; meta lists every verdict
        worst = max((r.concurrence for r in result.reports.values()), default=float("nan"))
        meta = ";".join(f"{m}={r.verdict}:{r.concurrence!r}" for m, r in result.reports.items())
        meta += "".join(f";{m}=degenerate-state" for m in result.degenerate)
        rows.add("sweep_point", f"shift={shift!r}", worst, meta)
    return {"axis": axis, "points": points}


HANDLERS = {"verdict": cmd_verdict, "integral": cmd_integral, "fock": cmd_fock,
            "firstq": cmd_firstq, "sweep": cmd_sweep}


def run(cfg: RunConfig, subcommand: str, out_dir=None, formats=None) -> int:
    out_dir = Path(out_dir or cfg.section("output")["directory"])
    formats = formats or cfg.section("output")["formats"]
    rows = Rows()
    try:
        with np.errstate(all="ignore"):
            results = HANDLERS[subcommand](cfg, rows)
    except (ArithmeticError, fock.TruncationError, fock.InputConsistencyError,
            model.GeometryError, entanglement.DegenerateStateError) as exc:
        out_dir.mkdir(parents=True, exist_ok=True)
        diag = {"subcommand": subcommand, "error": type(exc).__name__, "message": str(exc),
                "traceback": traceback.format_exc()}
        (out_dir / "diagnostic.json").write_text(to_json(diag), encoding="utf-8")
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    payload = {
        "schema_version": SCHEMA_VERSION,
        "tool": "gravaudit",
        "version": __version__,
        "subcommand": subcommand,
        "config": cfg.raw,
        "seeds": {"rng_seed": cfg.seed},
        "results": {subcommand: results},
    }
    write_reports(out_dir, subcommand, rows, payload, formats)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gravaudit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"gravaudit {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    helps = {
        "verdict": "exchange amplitudes and entanglement verdict per assembly mode",
        "integral": "ball-pair integral: quadrature vs far-field vs Monte Carlo over d/R",
        "fock": "Hartree-state theorem check and optional pair-creation demo",
        "firstq": "first-quantization beta tables and the cross-framework check",
        "sweep": "verdicts along a translation of object 2",
    }
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--out", type=Path, default=None)
        p.add_argument("--format", default=None,
                       help="comma-separated subset of csv,json (default from config)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        formats = None
        if args.format:
            formats = [s.strip() for s in args.format.split(",") if s.strip()]
            bad = set(formats) - {"csv", "json"}
            if bad:
                raise ConfigError(f"--format: unsupported {sorted(bad)}")
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg, args.subcommand, args.out, formats)


if __name__ == "__main__":
    sys.exit(main())
