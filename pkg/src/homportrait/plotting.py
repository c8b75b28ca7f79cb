"""Direction-field figures rendered with matplotlib.

The picture is a visual aid: normalised field arrows on a grid over [-1, 1]^2
with the invariant lines through the origin overlaid. It does not attempt the
topological (Poincaré disk) portrait.
"""

from __future__ import annotations

import io
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from homportrait.core import VectorField, eval_field  # noqa: E402
from homportrait.invlines import invariant_slopes  # noqa: E402

LINE_KWARGS = dict(color="tab:red", linewidth=1.5, alpha=0.8)
ARROW_KWARGS = dict(color="0.25", angles="xy", pivot="mid", scale=28, width=0.003)

LINE_GID = "invariant-line-{}"


def direction_field_figure(f: VectorField, grid: int = 21, title: Optional[str] = None):
    fig, ax = plt.subplots(figsize=(5, 5))
    xs = np.linspace(-1, 1, grid)
    X, Y = np.meshgrid(xs, xs)
    U, V = eval_field(f, X, Y)
    norm = np.hypot(U, V)
    norm[norm == 0] = 1.0
    ax.quiver(X, Y, U / norm, V / norm, **ARROW_KWARGS)

    slopes, x_axis = invariant_slopes(f)
    k = 0
    for kappa in slopes:
        # clip y = κx to the unit box
        x_end = min(1.0, 1.0 / abs(kappa)) if kappa != 0 else 1.0
        ax.plot([-x_end, x_end], [-kappa * x_end, kappa * x_end], gid=LINE_GID.format(k), **LINE_KWARGS)
        k += 1
    if x_axis:
        ax.plot([0, 0], [-1, 1], gid=LINE_GID.format(k), **LINE_KWARGS)

    ax.set_xlim(-1.05, 1.05)
    ax.set_ylim(-1.05, 1.05)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    if title:
        ax.set_title(title)
    return fig


def render_svg(f: VectorField, title: Optional[str] = None) -> str:
    """SVG 1.1 document text; byte-stable across runs."""
    fig = direction_field_figure(f, title=title)
    buf = io.StringIO()
    with matplotlib.rc_context({"svg.hashsalt": "homportrait", "svg.fonttype": "none"}):
        fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()
