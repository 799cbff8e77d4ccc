#!/usr/bin/env python3
"""Verdict table for a gallery of cones and cylinders: the catalog solutions
should come out ProperBiharmonicGauss, the controls should not.

Usage: python3 scripts/verify_cone_gallery.py
"""

import math

from gausslab.biharmonic import hypersurface_residual, link_residual_system
from gausslab.hypercone import (
    build_cone_chart,
    clifford_link_chart,
    clifford_link_solver,
    polynomial_curvature_cylinder,
    sphere_link_chart,
    sphere_link_solver,
)


def cone_points(dim, t_values=(0.6, 1.0, 1.6)):
    box = [(-0.3, 0.25)] * (dim - 1)
    pts = [()]
    for lo_hi in box:
        pts = [p + (x,) for p in pts for x in lo_hi]
    return [(t,) + p for t in t_values for p in pts]


def main():
    rows = []

    for m in (3, 4, 5):
        sol = sphere_link_solver(m)
        cone = build_cone_chart(sphere_link_chart(m, sol.a_sq_exact),
                                t_count=3)
        rep = hypersurface_residual(cone, points=cone_points(m + 1))
        rows.append((f"cone over S^{m}(sqrt({sol.a_sq_exact}))", rep.verdict,
                     rep.max_residual))

    # control: wrong sphere radius
    off = build_cone_chart(sphere_link_chart(3, 0.64), t_count=3)
    rep = hypersurface_residual(off, points=cone_points(4))
    rows.append(("cone over S^3(0.8)", rep.verdict, rep.max_residual))

    for m, m1 in ((4, 1), (4, 2)):
        for root in clifford_link_solver(m, m1):
            if root.flag != "valid":
                continue
            link = clifford_link_chart(m1, m - m1, root.r1_sq)
            cone = build_cone_chart(link, t_count=3)
            rep = hypersurface_residual(cone, points=cone_points(m + 1))
            rows.append((f"cone over S^{m1} x S^{m - m1}, r1^2={root.r1_sq:.6f}",
                         rep.verdict, rep.max_residual))

    # link-level confirmation for the first Clifford case
    link = clifford_link_chart(1, 3, clifford_link_solver(4, 1)[0].r1_sq)
    rep = link_residual_system(link)
    rows.append(("  link system for the above", rep.verdict,
                 max(rep.max_vector_residual, rep.max_scalar_residual)))

    cyl_pts = [(0.0, 0.0), (0.4, 0.3), (-0.6, -0.2)]
    for coeffs, label in (((1.0, 1.0, 1.0), "cylinder, k = 1 + s + s^2"),
                          ((2.0,), "cylinder, k = 2"),
                          ((0.0, 0.0, 0.0, 1.0), "cylinder, k = s^3")):
        rep = hypersurface_residual(polynomial_curvature_cylinder(coeffs),
                                    points=cyl_pts)
        rows.append((label, rep.verdict, rep.max_residual))

    width = max(len(r[0]) for r in rows)
    print(f"{'surface':<{width}}  {'verdict':<22}  max residual")
    for name, verdict, res in rows:
        print(f"{name:<{width}}  {verdict:<22}  {res:.3e}")


if __name__ == "__main__":
    main()
