"""Smoke test for the pyshapereg extension module.

Build and run from the repository root:

    cargo build --release -p shapereg-py --features extension-module
    cp target/release/libpyshapereg.so python/pyshapereg.so
    python3 python/smoke_test.py
"""

import math
import os
import sys
import tempfile

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import pyshapereg as sr


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


def main():
    assert sr.shape_kinds() == [
        "square", "circle", "hexagon", "ellipse", "cross", "bean", "w", "split", "u",
    ]

    grid = sr.square_grid(320, 320, 400)
    d = grid.decompose()
    assert d.n_superpixels == 400
    assert d.src() == 1.0
    assert d.metrics()["n_superpixels"] == 400
    assert d.edge_stats()["coefficient_of_variation"] < 1e-12

    square = sr.make_shape("square", 36)
    assert (square.area, square.perimeter) == (1296, 140)
    m = square.metrics()
    assert m["src"] == 1.0
    assert close(m["circularity"], 4 * math.pi * 1296 / 140**2)

    tri = sr.Shape([(0, 0), (1, 0), (0, 1)])
    assert tri.hull_stats() == (4, 4)
    assert tri.metrics()["solidity"] == 0.75

    noisy = square.perturb(0.3, seed=1)
    assert noisy.pixels() == square.perturb(0.3, seed=1).pixels()
    assert noisy.metrics()["contour_smoothness"] < 1.0

    cols = sr.LabelMap(2, 2, [0, 1, 0, 1])
    rows = sr.LabelMap(2, 2, [0, 0, 1, 1])
    dr = rows.decompose("strict")
    assert dr.undersegmentation_error(cols) == 1.0
    assert dr.undersegmentation_error(cols, "leakage") == 0.5
    assert cols.decompose().boundary_recall(cols) == 1.0
    try:
        sr.LabelMap(4, 1, [0, 1, 0, 1]).decompose("strict")
    except ValueError:
        pass
    else:
        raise AssertionError("disconnected label accepted under strict policy")

    with tempfile.TemporaryDirectory() as tmp:
        for ext in ("pgm", "png", "csv"):
            path = os.path.join(tmp, "map." + ext)
            grid.save(path)
            assert sr.LabelMap.load(path) == grid

    qt = sr.quadtree([float(i % 16 >= 5) for i in range(256)], 16, 0.0, 1)
    assert qt.decompose().src() == 1.0

    hexes = sr.hex_grid(200, 200, 16).decompose()
    assert hexes.n_superpixels >= 16
    assert hexes.graph_svg().startswith("<svg")

    rows = sr.study_noise("circle", 40, [0.0, 0.3], seeds=3)
    assert rows[0][1] > rows[1][1]
    svg = sr.emit_plot([("src", [(a, s) for a, s, _ in rows])], title="noise")
    assert svg.count('class="marker"') == 2

    print("pyshapereg smoke test passed")


if __name__ == "__main__":
    main()
