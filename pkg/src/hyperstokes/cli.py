"""Command-line interface: body I/O, unit handling, and result serialization.

All solver output goes to stdout as JSON (envelope {"config", "body",
"result"}) or CSV for time series and convergence tables.  Validation
failures print a single machine-parsable line

    error[<slug>]: <message>

to stderr and exit with code 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import click
import numpy as np

from . import dynamics, freefall, geometry, mobility, symmetry
from .errors import (
    AssemblyError,
    BodyConfigError,
    HyperstokesError,
    InvalidArgument,
    NoTranslationalOrientation,
    SingularPointError,
    SingularSystemError,
)
from .kernel import (
    HyperKernel,
    green_classical,
    green_scalar,
    oseen_tensor,
    stokeslet_pressure,
    stokeslet_velocity,
)
from .serialize import csv_text, json_text, load_body

_ERROR_SLUGS = {
    InvalidArgument: "invalid-argument",
    SingularPointError: "singular-point",
    BodyConfigError: "invalid-body",
    AssemblyError: "assembly",
    SingularSystemError: "singular-system",
    NoTranslationalOrientation: "no-translational-orientation",
}

DEFAULT_ELL = 0.1
DEFAULT_RESOLUTION = 16.0
DEFAULT_CONDITION_CEILING = 1e12


def _slug(exc: HyperstokesError) -> str:
    for cls, slug in _ERROR_SLUGS.items():
        if isinstance(exc, cls):
            return slug
    return "error"


class _Cli(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except HyperstokesError as exc:
            click.echo(f"error[{_slug(exc)}]: {exc}", err=True)
            ctx.exit(2)


@dataclass
class RunConfig:
    """Flags shared by the solver commands, echoed into every JSON result."""

    ell: float = DEFAULT_ELL
    resolution: float = DEFAULT_RESOLUTION
    tol_trans: float | None = None
    tol_symmetry: float = 1e-8
    output_format: str = "json"
    condition_ceiling: float = DEFAULT_CONDITION_CEILING
    force: bool = False

    def __post_init__(self):
        if not (np.isfinite(self.ell) and self.ell > 0):
            raise InvalidArgument(f"ell must be positive, got {self.ell}")
        if not (np.isfinite(self.resolution) and self.resolution > 0):
            raise InvalidArgument(f"resolution must be positive, got {self.resolution}")
        if self.tol_trans is not None and self.tol_trans <= 0:
            raise InvalidArgument("tol-trans must be positive")
        if self.tol_symmetry <= 0:
            raise InvalidArgument("symmetry tolerance must be positive")

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "resolution": self.resolution,
            "tol_trans": self.tol_trans,
            "tol_symmetry": self.tol_symmetry,
            "format": self.output_format,
            "condition_ceiling": self.condition_ceiling,
            "force": self.force,
        }


@dataclass
class PhysicalParams:
    """Dimensional fluid/body parameters (SI units)."""

    rho: float   # fluid density, kg/m^3
    mu: float    # dynamic viscosity, Pa s
    g_phys: float  # gravitational acceleration, m/s^2
    d: float     # reference length, m
    L: float     # effective thickness, m

    def __post_init__(self):
        for name in ("rho", "mu", "g_phys", "d", "L"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val > 0):
                raise InvalidArgument(f"{name} must be positive, got {val}")


def nondim(p: PhysicalParams):
    """Reference speed W = rho g d^2 / mu, Reynolds number Re = rho W d / mu,
    and ell = L / d; returns (W, Re, ell, warnings)."""
    w = p.rho * p.g_phys * p.d**2 / p.mu
    re = p.rho * w * p.d / p.mu
    ell = p.L / p.d
    notes = []
    if re > 0.1:
        notes.append(f"Re = {re:.6g} is not small; the creeping-flow model may not apply")
    if p.L > p.d:
        notes.append(f"L = {p.L:.6g} exceeds the reference length d = {p.d:.6g}")
    return w, re, ell, notes


def _body_summary(body, mass) -> dict:
    return {
        "name": body.name,
        "n_segments": len(body.segments),
        "m": mass.m,
        "m_c": mass.m_c,
        "m_e": mass.m_e,
        "r": mass.r,
        "length": mass.total_length,
        "diameter": geometry.diameter(body),
    }


def _prepare(file: str, config: RunConfig):
    """Load, discretize and assemble; enforce the condition ceiling."""
    body = load_body(file)
    dbody = geometry.discretize(body, config.resolution)
    kern = HyperKernel(ell=config.ell)
    km = mobility.assemble(dbody, kern)
    if km.condition > config.condition_ceiling and not config.force:
        raise SingularSystemError(
            f"condition number {km.condition:.3e} exceeds ceiling "
            f"{config.condition_ceiling:.3e}; rerun with --force to override"
        )
    return body, dbody, kern, km


def _emit_result(config: RunConfig, body, mass, result) -> None:
    click.echo(
        json_text(
            {"config": config.to_dict(), "body": _body_summary(body, mass), "result": result}
        )
    )


def _resistance_dict(res: mobility.ResistanceSet) -> dict:
    return {
        "n_nodes": res.n_nodes,
        "condition": res.condition,
        "asymmetry": res.asymmetry,
        "min_eigenvalue": res.min_eigenvalue,
        "spin_nullity": res.spin_nullity,
        "spin_axis": res.spin_axis,
        "K": res.K,
        "S": res.S,
        "C": res.C,
        "B": res.B,
        "A": res.A,
    }


@click.group(cls=_Cli)
@click.version_option(package_name="hyperstokes")
def main():
    """Resistance tensors and steady free fall of slender bodies in a
    hyperviscous Stokes fluid."""


@main.group()
def body():
    """Body-file utilities."""


@body.command("info")
@click.argument("file", type=click.Path())
def body_info(file):
    """Mass properties of a body file."""
    b = load_body(file)
    mass = geometry.mass_properties(b)
    cfg = RunConfig()
    _emit_result(
        cfg,
        b,
        mass,
        {
            "m": mass.m,
            "m_c": mass.m_c,
            "m_e": mass.m_e,
            "center_of_mass": mass.center_of_mass,
            "centroid": mass.centroid,
            "r": mass.r,
            "length": mass.total_length,
            "diameter": geometry.diameter(b),
        },
    )


@main.group()
def kernel():
    """Kernel evaluation utilities."""


@kernel.command("eval")
@click.option("--x", nargs=3, type=float, required=True, help="Evaluation point.")
@click.option("--ell", type=float, default=DEFAULT_ELL, show_default=True)
@click.option("--h", nargs=3, type=float, default=None, help="Point force (optional).")
def kernel_eval(x, ell, h):
    """Green's function, Oseen tensor and optionally the Stokeslet at x."""
    kern = HyperKernel(ell=ell)
    point = np.asarray(x, dtype=float)
    at_origin = np.linalg.norm(point) == 0.0
    result = {
        "x": point,
        "ell": ell,
        "s": float(np.linalg.norm(point) / ell),
        "g": float(green_scalar(point, kern)),
        "g_classical": None if at_origin else float(green_classical(point)),
        "Z": oseen_tensor(point, kern),
    }
    if h is not None:
        force = np.asarray(h, dtype=float)
        result["zeta"] = stokeslet_velocity(point, force, kern)
        result["pressure"] = (
            None if at_origin else float(stokeslet_pressure(point, force))
        )
    click.echo(json_text({"config": {"ell": ell}, "result": result}))


def _solver_options(fn):
    fn = click.option("--force", is_flag=True, help="Override the condition ceiling.")(fn)
    fn = click.option(
        "--max-condition", type=float, default=DEFAULT_CONDITION_CEILING,
        show_default=True, help="Refuse solves above this condition number.",
    )(fn)
    fn = click.option("--resolution", type=float, default=DEFAULT_RESOLUTION, show_default=True)(fn)
    fn = click.option("--ell", type=float, default=DEFAULT_ELL, show_default=True)(fn)
    fn = click.argument("file", type=click.Path())(fn)
    return fn


@main.command()
@_solver_options
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json",
              show_default=True)
def resistance(file, ell, resolution, max_condition, force, fmt):
    """Resistance tensors K, S, C, B and the grand matrix A."""
    cfg = RunConfig(ell=ell, resolution=resolution, output_format=fmt,
                    condition_ceiling=max_condition, force=force)
    b, dbody, kern, km = _prepare(file, cfg)
    res = mobility.resistance(dbody, kern, matrix=km)
    if fmt == "csv":
        rows = []
        for name, mat in (("K", res.K), ("S", res.S), ("C", res.C), ("B", res.B)):
            for i in range(3):
                for j in range(3):
                    rows.append([name, i + 1, j + 1, mat[i, j]])
        rows.append(["condition", "", "", res.condition])
        rows.append(["asymmetry", "", "", res.asymmetry])
        rows.append(["min_eigenvalue", "", "", res.min_eigenvalue])
        rows.append(["n_nodes", "", "", res.n_nodes])
        click.echo(csv_text(["tensor", "i", "j", "value"], rows), nl=False)
        return
    _emit_result(cfg, b, dbody.mass, _resistance_dict(res))


@main.command("freefall")
@_solver_options
@click.option("--tol-trans", type=float, default=None,
              help="Classify |lambda| below this as translational.")
@click.option("--axis", nargs=3, type=float, default=(1.0, 0.0, 0.0),
              show_default=True, help="Body axis for the tilt angle.")
def freefall_cmd(file, ell, resolution, max_condition, force, tol_trans, axis):
    """Steady free-fall states (lambda, g, xi, omega) of a body."""
    cfg = RunConfig(ell=ell, resolution=resolution, tol_trans=tol_trans,
                    condition_ceiling=max_condition, force=force)
    b, dbody, kern, km = _prepare(file, cfg)
    res = mobility.resistance(dbody, kern, matrix=km)
    inp = freefall.FreefallInput.from_body(dbody, res)
    states = freefall.steady_states(inp, tol_trans=tol_trans)
    f_mat = None
    eig_list = []
    try:
        f_mat = freefall.build_F(inp)
        for lam in np.linalg.eigvals(f_mat):
            eig_list.append({"re": float(lam.real), "im": float(lam.imag)})
    except SingularSystemError:
        pass
    table = [
        {
            "lambda": st.lam,
            "g": st.g,
            "xi": st.xi,
            "omega": st.omega,
            "residual_force": st.residual_force,
            "residual_torque": st.residual_torque,
            "class": st.classification,
            "multiplicity": st.multiplicity,
            "consistent": st.consistent,
            "tilt_deg": freefall.tilt_angle(st, np.asarray(axis)),
            "note": st.note,
        }
        for st in states
    ]
    _emit_result(cfg, b, dbody.mass, {
        "m_e": inp.m_e, "m_c": inp.m_c, "r": inp.r,
        "F": f_mat, "eigenvalues": eig_list, "states": table,
    })


@main.command("symmetry")
@_solver_options
@click.option("--transform", nargs=9, type=float, default=None,
              help="Row-major orthogonal matrix to test.")
@click.option("--plane-axis", type=click.IntRange(1, 3), default=None,
              help="Check the plane-of-symmetry pattern for this normal axis.")
@click.option("--heli-axis", type=click.IntRange(1, 3), default=None,
              help="Check the helicoidal pattern about this axis.")
@click.option("--tol", type=float, default=1e-8, show_default=True)
def symmetry_cmd(file, ell, resolution, max_condition, force, transform,
                 plane_axis, heli_axis, tol):
    """Symmetry checks: invariance, transformation law, tensor patterns."""
    cfg = RunConfig(ell=ell, resolution=resolution, tol_symmetry=tol,
                    condition_ceiling=max_condition, force=force)
    b, dbody, kern, km = _prepare(file, cfg)
    res = mobility.resistance(dbody, kern, matrix=km)
    q = np.asarray(transform, dtype=float).reshape(3, 3) if transform else None
    report = symmetry.symmetry_report(
        dbody, res, Q=q, plane_axis=plane_axis, heli_axis=heli_axis, tol=tol
    )
    _emit_result(cfg, b, dbody.mass, {
        "Q": report.Q,
        "det": report.det,
        "invariance_error": report.invariance_error,
        "invariant": report.invariant,
        "tensor_residuals": (
            None if report.tensor_residuals is None else list(report.tensor_residuals)
        ),
        "plane_axis": report.plane_axis,
        "plane_pattern": report.plane_pattern,
        "heli_axis": report.heli_axis,
        "heli_pattern": report.heli_pattern,
        "fore_aft": report.fore_aft,
        "translational_g": report.translational_g,
        "coupling_nullity": report.coupling_nullity,
    })


@main.command("fall-sim")
@_solver_options
@click.option("--g0", nargs=3, type=float, required=True, help="Initial gravity direction.")
@click.option("--dt", type=float, required=True)
@click.option("--t-end", type=float, required=True)
def fall_sim(file, ell, resolution, max_condition, force, g0, dt, t_end):
    """Integrate the orientation kinematics; emits a trajectory CSV."""
    cfg = RunConfig(ell=ell, resolution=resolution,
                    condition_ceiling=max_condition, force=force)
    b, dbody, kern, km = _prepare(file, cfg)
    res = mobility.resistance(dbody, kern, matrix=km)
    inp = freefall.FreefallInput.from_body(dbody, res)
    g_start = np.asarray(g0, dtype=float)
    norm = np.linalg.norm(g_start)
    if norm == 0.0 or not np.all(np.isfinite(g_start)):
        raise InvalidArgument("--g0 must be a nonzero finite vector")
    traj = dynamics.integrate_orientation(inp, g_start / norm, dt, t_end)
    rows = [
        [traj.t[k], *traj.G[k], *traj.xi[k], *traj.omega[k]]
        for k in range(len(traj.t))
    ]
    header = ["t", "G1", "G2", "G3", "xi1", "xi2", "xi3", "omega1", "omega2", "omega3"]
    click.echo(csv_text(header, rows), nl=False)


@main.command("fixed-points")
@_solver_options
@click.option("--grid", type=int, default=2000, show_default=True,
              help="Number of sphere-lattice points.")
def fixed_points(file, ell, resolution, max_condition, force, grid):
    """Orientations with G x omega(G) = 0 (steady-fall cross-check)."""
    cfg = RunConfig(ell=ell, resolution=resolution,
                    condition_ceiling=max_condition, force=force)
    b, dbody, kern, km = _prepare(file, cfg)
    res = mobility.resistance(dbody, kern, matrix=km)
    inp = freefall.FreefallInput.from_body(dbody, res)
    result = dynamics.find_fixed_points(inp, grid_resolution=grid)
    _emit_result(cfg, b, dbody.mass, {
        "all_orientations": result.all_orientations,
        "threshold": result.threshold,
        "points": [{"g": g, "residual": r} for g, r in result.points],
    })


@main.command()
@click.argument("file", type=click.Path())
@click.option("--ell", type=float, default=DEFAULT_ELL, show_default=True)
@click.option("--resolutions", type=str, required=True,
              help="Comma-separated list, e.g. 8,16,32.")
@click.option("--max-condition", type=float, default=DEFAULT_CONDITION_CEILING,
              show_default=True)
@click.option("--force", is_flag=True)
def convergence(file, ell, resolutions, max_condition, force):
    """Translation tensor per resolution, with successive differences (CSV)."""
    try:
        res_list = [float(tok) for tok in resolutions.split(",") if tok.strip()]
    except ValueError:
        raise InvalidArgument(f"cannot parse --resolutions {resolutions!r}") from None
    if not res_list:
        raise InvalidArgument("--resolutions must list at least one value")
    b = load_body(file)
    rows = []
    prev_k = None
    for r in res_list:
        cfg = RunConfig(ell=ell, resolution=r, condition_ceiling=max_condition, force=force)
        dbody = geometry.discretize(b, r)
        kern = HyperKernel(ell=ell)
        km = mobility.assemble(dbody, kern)
        if km.condition > max_condition and not force:
            raise SingularSystemError(
                f"condition number {km.condition:.3e} at resolution {r} exceeds "
                f"ceiling; rerun with --force"
            )
        res = mobility.resistance(dbody, kern, matrix=km)
        diff = None if prev_k is None else float(np.linalg.norm(res.K - prev_k))
        rows.append([r, res.n_nodes, *res.K.ravel().tolist(), diff])
        prev_k = res.K
    header = ["resolution", "n_nodes",
              "K11", "K12", "K13", "K21", "K22", "K23", "K31", "K32", "K33",
              "dK_fro"]
    click.echo(csv_text(header, rows), nl=False)


@main.command("nondim")
@click.option("--rho", type=float, required=True, help="Fluid density, kg/m^3.")
@click.option("--mu", type=float, required=True, help="Dynamic viscosity, Pa s.")
@click.option("--gravity", type=float, required=True, help="Gravity, m/s^2.")
@click.option("--d", type=float, required=True, help="Reference length, m.")
@click.option("--l", "--L", "thickness", type=float, required=True,
              help="Effective thickness, m.")
def nondim_cmd(rho, mu, gravity, d, thickness):
    """Nondimensional groups W, Re and ell from physical parameters."""
    params = PhysicalParams(rho=rho, mu=mu, g_phys=gravity, d=d, L=thickness)
    w, re, ell, notes = nondim(params)
    for note in notes:
        click.echo(f"warning: {note}", err=True)
    click.echo(json_text({
        "config": {"rho": rho, "mu": mu, "gravity": gravity, "d": d, "L": thickness},
        "result": {"W": w, "Re": re, "ell": ell, "warnings": notes},
    }))


if __name__ == "__main__":
    main(prog_name="hyperstokes")
