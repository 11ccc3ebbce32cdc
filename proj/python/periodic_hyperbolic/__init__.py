"""Time-periodic solutions of 1D quasilinear hyperbolic systems with boundary feedback."""

from ._core import *  # noqa: F401,F403
from ._core import cli_run, solve_periodic

__all__ = [name for name in dir() if not name.startswith("_")]


def run(*argv: str) -> int:
    """Run the command-line front end and echo its output."""
    import sys

    code, out, err = cli_run(list(argv))
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


def stability_run(spec, bspec, periodic, amplitude, signs, transits=6, records_per_transit=8):
    """Perturb the periodic initial data, integrate and compare against `periodic`."""
    from ._core import measure_mu_max, perturbed_initial_data, run_ivp, stability_metrics

    T0 = spec.L * measure_mu_max(spec)
    u0 = perturbed_initial_data(periodic, amplitude, list(signs))
    traj = run_ivp(u0, spec, bspec, transits * T0, T0 / records_per_transit)
    return traj, stability_metrics(traj, periodic, spec)
