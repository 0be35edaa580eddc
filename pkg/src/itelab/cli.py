"""Batch front end: configuration, orchestration, serialization, figures.

Subcommands: solve, oracle, verify-symbols, verify-parametrix,
verify-regions, plot.  A run is described by one declarative JSON (or TOML)
file; outputs are byte-deterministic for a fixed configuration.

Exit codes: 0 clean, 1 verification violations, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, parametrix, regions, symbols
from .eig import filter_converged, solve_quadratic
from .oracle import DispersionProblem, oracle_eigenvalues
from .pencil import DiskMode, Interval, assemble_disk_mode, assemble_interval
from .profiles import RefractiveProfile
from .regions import ParabolicRegion, left_halfplane_bound, parabola_check
from .report import (ResultSet, config_hash, emit_figure, load_results,
                     write_results)
from .symbols import Rectangle
from .eig import EigenvalueRecord

__all__ = ["RunConfig", "ConfigError", "run_solve", "run_oracle",
           "run_verify", "main"]


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


@dataclass
class RunConfig:
    domain: Interval | DiskMode
    modes: list[int]
    profile: RefractiveProfile
    mesh_coarse: int
    mesh_fine: int
    eigen_tol: float
    match_tol: float
    search_box: Rectangle
    region: ParabolicRegion
    cutoff: float
    output_dir: Path
    prefix: str
    seed: int
    raw: dict

    @property
    def is_disk(self):
        return isinstance(self.domain, DiskMode)


def _load_raw(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if path.suffix == ".toml":
        try:
            import tomllib
        except ImportError as exc:
            raise ConfigError("TOML configs need Python >= 3.11") from exc
        try:
            return tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"TOML parse error in {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"JSON parse error in {path}: {exc}") from exc


def parse_config(path):
    raw = _load_raw(path)
    try:
        dom = raw["domain"]
        kind = dom["kind"]
        if kind == "interval":
            domain = Interval(float(dom.get("a", 0.0)), float(dom.get("b", 1.0)))
            modes = []
        elif kind == "disk":
            domain = DiskMode(float(dom.get("radius", 1.0)), -1)
            modes = [int(l) for l in dom.get("modes", [0])]
        else:
            raise ConfigError(f"unknown domain kind {kind!r}")
        if kind == "interval":
            default_dom = (domain.a, domain.b)
        else:
            default_dom = (0.0, domain.radius)
        prof_dict = dict(raw["profile"])
        prof_dict.setdefault("domain", list(default_dom))
        profile = RefractiveProfile.from_dict(prof_dict)

        mesh = raw.get("mesh", {})
        coarse = int(mesh.get("coarse", 60))
        fine = int(mesh.get("fine", 2 * coarse))
        if coarse < 4 or fine < 4:
            raise ConfigError("mesh sizes must be at least 4")

        eig_cfg = raw.get("eigen", {})
        eigen_tol = float(eig_cfg.get("tol", 1e-8))
        match_tol = float(eig_cfg.get("match_tol", 1e-5))
        if eigen_tol <= 0.0 or match_tol <= 0.0:
            raise ConfigError("tolerances must be positive")

        box = raw.get("search_box", {})
        re_rng = box.get("re", [0.5, 13.0])
        im_rng = box.get("im", [-2.0, 2.0])
        search_box = Rectangle(float(re_rng[0]), float(re_rng[1]),
                               float(im_rng[0]), float(im_rng[1]))

        reg = raw.get("region", {})
        delta = float(reg.get("delta", regions.DEFAULT_DELTA))
        if not 0.0 < delta < 1.0:
            raise ConfigError("delta must lie in (0, 1)")
        region = ParabolicRegion(float(reg.get("C", 10.0)), delta)
        cutoff = float(reg.get("cutoff", region.C))

        out = raw.get("output", {})
        out_dir = Path(os.environ.get("ITELAB_OUT", out.get("dir", "out")))
        prefix = str(out.get("prefix", "run"))
        seed = int(raw.get("seed", 12345))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid config: {exc}") from exc
    return RunConfig(domain, modes, profile, coarse, fine, eigen_tol,
                     match_tol, search_box, region, cutoff, out_dir, prefix,
                     seed, raw)


def _provenance(config):
    return {"config_hash": config_hash(config.raw),
            "itelab_version": __version__,
            "seed": config.seed}


def run_solve(config):
    """Assemble at the coarse and fine mesh sizes, solve, filter, attach the
    region report."""
    records = []
    if config.is_disk:
        for mode in config.modes:
            coarse = assemble_disk_mode(config.profile, mode,
                                        config.mesh_coarse,
                                        config.domain.radius)
            fine = assemble_disk_mode(config.profile, mode, config.mesh_fine,
                                      config.domain.radius)
            rc = solve_quadratic(coarse, config.eigen_tol, mode=mode)
            rf = solve_quadratic(fine, config.eigen_tol, mode=mode)
            records.extend(filter_converged(rc, rf, config.match_tol,
                                            config.eigen_tol))
    else:
        coarse = assemble_interval(config.profile, config.mesh_coarse,
                                   config.domain.a, config.domain.b)
        fine = assemble_interval(config.profile, config.mesh_fine,
                                 config.domain.a, config.domain.b)
        rc = solve_quadratic(coarse, config.eigen_tol)
        rf = solve_quadratic(fine, config.eigen_tol)
        records = filter_converged(rc, rf, config.match_tol, config.eigen_tol)

    report = parabola_check(records, config.region,
                            left_bound=left_halfplane_bound(config.profile),
                            cutoff=config.cutoff)
    return ResultSet(records, report, _provenance(config))


def run_oracle(config):
    """Dispersion zeros in the configured k-plane box, emitted in the same
    schema as pencil results."""
    records = []
    if config.is_disk:
        problems = [DispersionProblem(DiskMode(config.domain.radius, mode),
                                      _index_of(config.profile))
                    for mode in config.modes]
    else:
        problems = [DispersionProblem(config.domain,
                                      _index_of(config.profile))]
    for prob in problems:
        mode = getattr(prob.domain, "mode", -1)
        for z in oracle_eigenvalues(prob, config.search_box):
            rel = z.f_abs / max(z.scale, 1e-300)
            for _ in range(z.multiplicity):
                records.append(EigenvalueRecord(z.location, rel, mode, 0, True))
    return ResultSet(records, None, _provenance(config))


def _index_of(profile):
    if profile.kind != "constant":
        raise ConfigError("dispersion oracles exist for constant profiles only")
    return float(np.sqrt(1.0 + profile.params["value"]))


def _write_violations(path, violations):
    payload = json.dumps({"violations": [v.to_dict() for v in violations]},
                         sort_keys=True, indent=2)
    path.write_text(payload + "\n")


def run_verify(kind, config, fault=None):
    """Run one module's verification scan; returns (exit_code, violations)."""
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    if kind == "symbols":
        violations = symbols.verification_scan(seed=config.seed, fault=fault)
        det = symbols.det_bounds_scan(1.0, 1j)
        if not det.passed:
            violations.append(symbols.Violation(
                "det_bounds", {}, det.band_ratio, det.band_factor))
        branch = symbols.root_branch_scan()
        if not branch.passed:
            violations.append(symbols.Violation(
                "root_branch_lower_bound", {}, branch.fitted_K, 100.0))
    elif kind == "parametrix":
        profile = RefractiveProfile.gaussian(1.0, 0.6, 0.3, 0.7, assigns="q",
                                             domain=(-1.0, 1.0))
        violations, _ = parametrix.verification_scan(profile)
    elif kind == "regions":
        res = run_solve(config)
        pencil = (assemble_disk_mode(config.profile, config.modes[0],
                                     config.mesh_coarse, config.domain.radius)
                  if config.is_disk else
                  assemble_interval(config.profile, config.mesh_coarse,
                                    config.domain.a, config.domain.b))
        violations, _ = regions.verification_scan(
            pencil, config.profile, records=res.records, region=config.region,
            seed=config.seed)
        rows = regions.semiclassical_region_map(min(config.region.delta, 0.49))
        for row in rows:
            if row.margin < -1e-9:
                violations.append(symbols.Violation(
                    "semiclassical_map", {"h": row.h, "im_z": row.im_z},
                    row.margin, 0.0))
    else:
        raise ConfigError(f"unknown verification kind {kind!r}")
    _write_violations(out / f"{config.prefix}_verify_{kind}.json", violations)
    return (0 if not violations else 1), violations


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="itelab",
        description="transmission-eigenvalue laboratory: solve, verify, plot")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", type=Path, help="path to the run config")
        p.add_argument("--output-dir", type=Path, default=None,
                       help="override the configured output directory")
        return p

    add("solve", "assemble and solve the pencil, write JSON/CSV results")
    add("oracle", "locate dispersion zeros, write JSON/CSV results")
    p = add("verify-symbols", "run the symbol-identity scans")
    p.add_argument("--inject-fault", choices=["flip_branch"], default=None,
                   help="negative control: force a wrong root branch")
    add("verify-parametrix", "run the residual-decay scans")
    add("verify-regions", "run the region and certificate scans")
    p = add("plot", "render the eigenvalue scatter with region overlays")
    p.add_argument("--results", type=Path, default=None,
                   help="results JSON (defaults to the solve output path)")

    args = parser.parse_args(argv)
    try:
        config = parse_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.output_dir is not None:
        config.output_dir = args.output_dir
    out = config.output_dir

    try:
        if args.command == "solve":
            out.mkdir(parents=True, exist_ok=True)
            res = run_solve(config)
            write_results(res, out / f"{config.prefix}_results.json",
                          out / f"{config.prefix}_results.csv")
            print(f"{len(res.stable_records())} stable / {len(res.records)} "
                  f"eigenvalues -> {out / (config.prefix + '_results.json')}")
            return 0
        if args.command == "oracle":
            out.mkdir(parents=True, exist_ok=True)
            res = run_oracle(config)
            write_results(res, out / f"{config.prefix}_oracle.json",
                          out / f"{config.prefix}_oracle.csv")
            print(f"{len(res.records)} dispersion zeros -> "
                  f"{out / (config.prefix + '_oracle.json')}")
            return 0
        if args.command.startswith("verify-"):
            kind = args.command.removeprefix("verify-")
            fault = getattr(args, "inject_fault", None)
            code, violations = run_verify(kind, config, fault=fault)
            for v in violations[:20]:
                print(f"violation: {v.check} value={v.value:.3e} "
                      f"tol={v.tolerance:.3e}", file=sys.stderr)
            print(f"verify-{kind}: {'PASS' if code == 0 else 'FAIL'} "
                  f"({len(violations)} violations)")
            return code
        if args.command == "plot":
            res_path = args.results or out / f"{config.prefix}_results.json"
            if not res_path.exists():
                print(f"error: results file {res_path} not found",
                      file=sys.stderr)
                return 2
            res = load_results(res_path)
            out.mkdir(parents=True, exist_ok=True)
            fig_path = out / f"{config.prefix}_figure.svg"
            emit_figure(res, config.region, fig_path,
                        left_bound=left_halfplane_bound(config.profile))
            print(f"figure -> {fig_path}")
            return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
