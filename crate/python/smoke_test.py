"""Smoke test for the gh_lab extension module.

Build the module and put it on the path first, e.g.

    cargo build -p gh-lab-python --release --features extension-module
    cp target/release/libgh_lab.so python/gh_lab.so
    python3 python/smoke_test.py
"""

import math

import gh_lab


def main():
    assert abs(gh_lab.r_n(2) - math.acos(-1 / 3)) < 1e-12
    assert gh_lab.t_n(1) == gh_lab.r_n(1)

    e1 = gh_lab.SpherePoint([1.0, 0.0, 0.0])
    e2 = gh_lab.SpherePoint([0.0, 2.0, 0.0])
    assert abs(e1.geodesic(e2) - math.pi / 2) < 1e-15
    assert e1.antipode().coords == [-1.0, -0.0, -0.0]

    cell = gh_lab.gh_cell(1, 2)
    assert cell.label == "2π/3" and cell.lower == cell.upper
    table = gh_lab.bounds_table()
    assert "[c_{2,7}, π)" in table

    report = gh_lab.verify_distortion(1, pairs=20_000, seed=3)
    assert report["max_distortion"] <= 2 * math.pi / 3 + 1e-9

    ico = gh_lab.CoveringCertificate.icosahedron()
    radius, rate = ico.validate(samples=20_000, seed=1)
    assert radius <= ico.radius_bound and rate == 1.0
    assert ico.projective().count == 6

    angles = [2 * math.pi * i / 11 for i in range(11)]
    space = gh_lab.FiniteMetricSpace.from_points([[math.cos(t), math.sin(t)] for t in angles])
    assert space.vr_betti(8 * math.pi / 11, 4) == [1, 0, 0, 1, 0]
    try:
        space.vr_betti(3.0, 9, budget=100)
    except gh_lab.BudgetExceeded:
        pass
    else:
        raise AssertionError("budget was not enforced")

    point = gh_lab.FiniteMetricSpace([[0.0]])
    pair = gh_lab.FiniteMetricSpace([[0.0, 1.0], [1.0, 0.0]], labels=["a", "b"])
    assert gh_lab.gh_distance(point, pair) == 0.5

    helmet = gh_lab.OddFunction.equatorial_helmet(1)
    stats = helmet.analyze(eta=0.05, samples=20_000, seed=7)
    assert stats["oddness_violations"] == 0
    assert stats["delta_hat"] > 3.0
    x = gh_lab.SpherePoint([0.3, -0.2, 0.4])
    assert helmet(x.antipode()) == helmet(x).antipode()

    chord, gap = gh_lab.euclidean_bounds(2 * math.pi / 3)
    assert abs(chord - math.sqrt(3)) < 1e-12 and abs(gap - 1.0) < 1e-12
    print("gh_lab smoke test passed")


if __name__ == "__main__":
    main()
