"""Special-relativistic hydrodynamics: exact Riemann solver, characteristic fluxes,
CENO reconstruction and corrugated-interface runs."""

from ._relhydro import (
    Axis,
    ConfigError,
    Eos,
    ExactSolution,
    NormTriple,
    PhysicsError,
    Primitive,
    RiemannProblem,
    System,
    WaveKind,
    WavePattern,
    ceno_faces,
    characteristic_projection,
    classify_pattern,
    eigenvalues,
    exact_csv,
    figure_times,
    format_config,
    hlle_flux,
    make_gas,
    make_ultra,
    marquina_flux,
    physical_flux,
    primitive_to_conserved,
    read_norms_csv,
    recover_primitive,
    run,
    solve_star_state,
    sound_speed,
    table1_problem,
    without_tangential_velocity,
)

__all__ = [name for name in dir() if not name.startswith("_")]


def run_problem(problem="a", *, dim=3, scale=30, t_end=None, output_dir="relhydro_out", **overrides):
    """Run a preset problem; keyword arguments become top-level config keys."""
    lines = [f"problem = {problem}", f"dim = {dim}", f"scale = {scale}", f"dir = {output_dir}"]
    if t_end is not None:
        lines.append(f"t_end = {t_end}")
    return run("\n".join(lines) + "\n", {k: str(v) for k, v in overrides.items()})
