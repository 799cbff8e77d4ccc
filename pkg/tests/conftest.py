"""Shared helpers: finite-difference probes and quick chart builders."""

import numpy as np

from gausslab.geometry import SamplingSpec, chart_from_strings


def central_partial(fn, point, i, h=1e-5):
    """Richardson-extrapolated central difference of fn along coordinate i."""
    p = np.asarray(point, dtype=float)

    def d(step):
        lo, hi = p.copy(), p.copy()
        lo[i] -= step
        hi[i] += step
        return (fn(hi) - fn(lo)) / (2.0 * step)

    return (4.0 * d(h) - d(2.0 * h)) / 3.0


def graph_chart(expr, box=0.8, name="graph"):
    """Graph z = expr(u, v) over a centered box."""
    return chart_from_strings(
        name, ("u", "v"), ("u", "v", expr),
        ((-box, box), (-box, box)))


def unit_sphere_chart(counts=(6, 5), name="sphere"):
    return chart_from_strings(
        name, ("u", "v"),
        ("cos(u)*cos(v)", "sin(u)*cos(v)", "sin(v)"),
        ((0.0, 6.283185307179586), (-1.2, 1.2)),
        sampling=SamplingSpec(counts=counts))
