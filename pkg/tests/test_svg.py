import xml.etree.ElementTree as ET

import numpy as np

from cdp.svg import ramp_color, scatter_svg

NS = "{http://www.w3.org/2000/svg}"


def circles(doc):
    root = ET.fromstring(doc.encode())
    return [c for c in root.iter(NS + "circle") if c.get("class") == "pt"]


def test_one_glyph_per_point(rng):
    pts = rng.normal(size=(37, 2))
    doc = scatter_svg(pts, color=rng.random(37), title="a < b & c")
    assert len(circles(doc)) == 37


def test_degenerate_inputs():
    assert len(circles(scatter_svg(np.zeros((4, 2))))) == 4
    assert len(circles(scatter_svg(np.arange(5.0)))) == 5
    doc = scatter_svg(np.eye(3)[:, :2], labels=["A", "B", "<C>"], edges=[(0, 1), (1, 2)])
    root = ET.fromstring(doc.encode())
    assert len(list(root.iter(NS + "line"))) == 2


def test_ramp_endpoints():
    assert ramp_color(0) == "#440154" and ramp_color(1) == "#fde725"
    assert ramp_color(-3) == ramp_color(0)
