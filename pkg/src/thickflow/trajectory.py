"""Solution states, per-step diagnostics records and CSV persistence.

CSV schemas are part of the external contract:

  1D snapshot   t,x,rho,u,dudx,sigma            (one file per snapshot)
  2D snapshot   t,x1,x2,rho,u1,u2,Du_norm,divu
  1D diag.csv   t,dt,mass,momentum,energy,dissipation_cum,rho_min,rho_max,
                dudx_maxabs,sigma_max,hoff_cum
  2D diag.csv   same with Du_maxnorm replacing dudx_maxabs

Numbers are written with 17 significant digits (%.17g) so re-running an
identical config reproduces byte-identical files.
"""

import os
from dataclasses import dataclass, field

import numpy as np

FMT = "%.17g"


@dataclass
class State1D:
    rho: np.ndarray
    u: np.ndarray
    t: float

    def copy(self):
        return State1D(self.rho.copy(), self.u.copy(), self.t)


@dataclass
class State2D:
    rho: np.ndarray          # (nx, ny)
    u: np.ndarray            # (2, nx, ny)
    t: float

    def copy(self):
        return State2D(self.rho.copy(), self.u.copy(), self.t)


@dataclass
class DiagnosticsRecord:
    """One row per accepted step (plus an initial t = 0 row with dt = 0)."""

    t: float
    dt: float
    mass: float
    momentum: float
    energy: float
    dissipation_cum: float
    rho_min: float
    rho_max: float
    dudx_maxabs: float
    sigma_max: float
    hoff_cum: float
    lpnorm_term: float = 0.0   # (mu/p) int |du/dx|^p at time t; not in the CSV
    aux_cum: float = 0.0       # singular runs: eps int int 1/sqrt(1-s^2)

    CSV_FIELDS = (
        "t", "dt", "mass", "momentum", "energy", "dissipation_cum",
        "rho_min", "rho_max", "dudx_maxabs", "sigma_max", "hoff_cum",
    )


@dataclass
class Trajectory:
    """Time-ordered snapshots plus the full per-step diagnostics."""

    model: str
    grid: object
    params: object
    snapshots: list = field(default_factory=list)
    records: list = field(default_factory=list)

    @property
    def times(self):
        return [s.t for s in self.snapshots]

    def snapshot_at(self, t, tol=1e-9):
        for s in self.snapshots:
            if abs(s.t - t) <= tol:
                return s
        raise KeyError(f"no snapshot at t = {t}")

    def initial_energy(self):
        return self.records[0].energy


def _fmt_row(values):
    return ",".join(FMT % v for v in values)


def write_diag_csv(traj, path, maxabs_name="dudx_maxabs"):
    fields = list(DiagnosticsRecord.CSV_FIELDS)
    fields[fields.index("dudx_maxabs")] = maxabs_name
    lines = [",".join(fields)]
    for r in traj.records:
        lines.append(_fmt_row(
            [r.t, r.dt, r.mass, r.momentum, r.energy, r.dissipation_cum,
             r.rho_min, r.rho_max, r.dudx_maxabs, r.sigma_max, r.hoff_cum]))
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def write_snapshots_1d(traj, outdir, sigma_func):
    """One snapshot CSV per stored state; sigma_func(state) gives the stress field."""
    from .grids import ddx_periodic

    paths = []
    for idx, s in enumerate(traj.snapshots):
        dudx = ddx_periodic(s.u, traj.grid)
        sigma = sigma_func(s)
        path = os.path.join(outdir, f"snap_{idx:06d}.csv")
        lines = ["t,x,rho,u,dudx,sigma"]
        x = traj.grid.x
        for i in range(traj.grid.n):
            lines.append(_fmt_row([s.t, x[i], s.rho[i], s.u[i], dudx[i], sigma[i]]))
        with open(path, "w") as f:
            f.write("\n".join(lines) + "\n")
        paths.append(path)
    return paths


def write_snapshots_2d(traj, outdir):
    from .grids import div_2d, sym_grad_2d, sym_grad_norm

    paths = []
    g = traj.grid
    X, Y = g.meshgrid()
    for idx, s in enumerate(traj.snapshots):
        D = sym_grad_2d(s.u, g)
        dn = sym_grad_norm(D)
        dv = div_2d(s.u, g)
        path = os.path.join(outdir, f"snap_{idx:06d}.csv")
        lines = ["t,x1,x2,rho,u1,u2,Du_norm,divu"]
        for i in range(g.nx):
            for j in range(g.ny):
                lines.append(_fmt_row(
                    [s.t, X[i, j], Y[i, j], s.rho[i, j],
                     s.u[0, i, j], s.u[1, i, j], dn[i, j], dv[i, j]]))
        with open(path, "w") as f:
            f.write("\n".join(lines) + "\n")
        paths.append(path)
    return paths
