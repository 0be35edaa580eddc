"""Result serialization and figure emission.

Outputs are byte-deterministic for a fixed configuration and seed: JSON is
dumped with sorted keys, CSV rows are sorted canonically, and the SVG
backend runs with a fixed hash salt and no creation date.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .eig import EigenvalueRecord
from .regions import ParabolicRegion, RegionReport

__all__ = ["ResultSet", "write_results", "load_results", "emit_figure"]

CSV_COLUMNS = ("lambda_re", "lambda_im", "residual", "mode", "mesh_N", "stable")

plt.rcParams["svg.hashsalt"] = "itelab"


@dataclass
class ResultSet:
    """Eigenvalue records plus the region report and provenance."""

    records: list[EigenvalueRecord]
    region_report: RegionReport | None = None
    provenance: dict = field(default_factory=dict)

    def stable_records(self):
        return [r for r in self.records if r.stable]

    def sorted_records(self):
        return sorted(self.records,
                      key=lambda r: (abs(r.lam), r.lam.real, r.lam.imag,
                                     r.mode, r.mesh_N))

    def to_dict(self):
        out = {"records": [r.to_dict() for r in self.sorted_records()],
               "provenance": self.provenance}
        if self.region_report is not None:
            out["region_report"] = self.region_report.to_dict()
        return out


def config_hash(config_dict):
    """Stable hash of a configuration for provenance."""
    blob = json.dumps(config_dict, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def write_results(results, json_path=None, csv_path=None):
    if json_path is not None:
        payload = json.dumps(results.to_dict(), sort_keys=True, indent=2)
        json_path.write_text(payload + "\n")
    if csv_path is not None:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in results.sorted_records():
            writer.writerow([repr(r.lam.real), repr(r.lam.imag),
                             repr(r.residual), r.mode, r.mesh_N,
                             int(r.stable)])
        csv_path.write_text(buf.getvalue())


def load_results(json_path):
    raw = json.loads(json_path.read_text())
    records = [EigenvalueRecord(complex(d["lambda_re"], d["lambda_im"]),
                                d["residual"], d["mode"], d["mesh_N"],
                                bool(d["stable"]))
               for d in raw.get("records", [])]
    return ResultSet(records, None, raw.get("provenance", {}))


def emit_figure(results, region, path, left_bound=None):
    """Scatter of stable eigenvalues with the parabola boundary
    |Im lambda| = C |lambda|^(1-delta) and the left-bound line overlaid.

    The SVG bytes are deterministic for identical inputs.
    """
    stable = results.stable_records()
    if not stable:
        raise ValueError("no stable eigenvalues to plot")
    if left_bound is None and results.region_report is not None:
        left_bound = results.region_report.left_bound

    lam = np.array([r.lam for r in stable])
    fig, ax = plt.subplots(figsize=(6.4, 4.8), dpi=100)
    ax.scatter(lam.real, lam.imag, s=28, marker="+", color="tab:red",
               linewidths=1.4, label="stable eigenvalues")

    rmax = 1.3 * float(np.max(np.abs(lam)))
    rr = np.linspace(region.C, max(rmax, region.C * 1.01), 400)
    im = region.C * rr ** (1.0 - region.delta)
    mask = im <= rr
    re = np.sqrt(rr[mask] ** 2 - im[mask] ** 2)
    ax.plot(re, im[mask], color="tab:blue", lw=1.0,
            label=rf"$|\mathrm{{Im}}\,\lambda| = C|\lambda|^{{1-\delta}}$")
    ax.plot(re, -im[mask], color="tab:blue", lw=1.0)
    if left_bound is not None:
        ax.axvline(left_bound, color="tab:green", lw=1.0, ls="--",
                   label=r"$\mathrm{Re}\,\lambda$ lower bound")
    ax.axhline(0.0, color="0.8", lw=0.6, zorder=0)
    ax.axvline(0.0, color="0.8", lw=0.6, zorder=0)
    ax.set_xlabel(r"$\mathrm{Re}\,\lambda$")
    ax.set_ylabel(r"$\mathrm{Im}\,\lambda$")
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path
