"""
Local asymptotics near a tangency in a saddle chart.

The pulled-back stable graphs Gamma_n approach the stable axis like |u|^-n.
For points r_n on Gamma_n close to the tangency with the unstable piece
Delta_u = {x = delta(y)} this checks two regressions:

- the distance d(r_n, Delta_u) decays with slope ln|u| in n;
- the backward return index m_n, the first m with f^-m(T^-1 r_n) in the
  compact annulus {0.1 <= |y| <= 0.9, |x| <= 0.5}, stays within a bounded
  distance of (ln|u| / ln|1/s|) n.

T^-1 is the model return chart (x, y) -> (anchor + y - y0, x - delta(y)),
carrying the transverse distance to Delta_u onto the distance to the
local unstable axis.
"""

import logging
import math
from typing import Sequence, Tuple, Union

import numpy as np

from ..bidisk.graphs import GraphInBidisk
from ..bidisk.transform import graph_transform_n
from ..core.errors import ConvergenceError, EscapeError, PreconditionError
from ..core.models import AsymptoticsReport, Orientation
from ..henon.local import LocalMap
from ..saddle.normal_form import NormalFormGerm

logger = logging.getLogger(__name__)

ANNULUS = (0.1, 0.9)
X_WINDOW = 0.5
DISTANCE_ITERATIONS = 200


def distance_to_graph(graph: GraphInBidisk, x: complex, y: complex) -> float:
    """
    Euclidean distance from (x, y) to the vertical graph {x = delta(v)},
    by the fixed-point form of the stationarity condition.
    """
    v = complex(y)
    for _ in range(DISTANCE_ITERATIONS):
        gap = complex(graph.evaluate(v)) - x
        new = y - gap * np.conj(complex(graph.derivative(v, 1)))
        if abs(new - v) <= 1e-16 * (1.0 + abs(v)):
            v = new
            break
        v = new
    else:
        raise ConvergenceError("distance minimization did not converge", {"point": (x, y)})
    return float(math.hypot(abs(complex(graph.evaluate(v)) - x), abs(v - y)))


def return_index(
    local: LocalMap, point: Tuple[complex, complex], max_steps: int
) -> int:
    """
    Backward steps until the orbit enters the annulus window.

    Raises:
        EscapeError: the orbit leaves the unit bidisk first
    """
    x, y = point
    for m in range(max_steps + 1):
        if ANNULUS[0] <= abs(y) <= ANNULUS[1] and abs(x) <= X_WINDOW:
            return m
        if abs(x) > 1.0 or abs(y) > 1.0:
            raise EscapeError("backward orbit left the bidisk", {"step": m, "point": (x, y)})
        x, y = local.inverse(x, y)
        x, y = complex(x), complex(y)
    raise EscapeError("backward orbit never entered the window", {"steps": max_steps})


def verify_local_asymptotics(
    germ: Union[LocalMap, NormalFormGerm],
    unstable: GraphInBidisk,
    stable: GraphInBidisk,
    n_values: Sequence[int],
    y0: complex,
    h: int = 1,
    eps: float = 0.1,
    anchor: complex = 0.3,
) -> AsymptoticsReport:
    """
    Distance decay and return-index bound along the pull-backs of `stable`.

    Args:
        germ: Saddle germ with the saddle at the origin, axes as invariant lines
        unstable: Delta_u as a vertical graph x = delta(y), tangent to x = 0 at y0
        stable: Vertical graph pulled back to Gamma_n
        n_values: Indices n
        y0: Ordinate of the tangency
        h: Order of tangency of Delta_u (sets the window |t0| <= eps |u|^(-n/(h+1)))
        eps: Window constant
        anchor: Abscissa the return chart sends y0 to

    Raises:
        PreconditionError: the germ is not a saddle at the origin
        EscapeError: an orbit leaves the germ's bidisk
    """
    local = germ.as_local_map() if isinstance(germ, NormalFormGerm) else germ
    if unstable.orientation is not Orientation.VERTICAL or stable.orientation is not Orientation.VERTICAL:
        raise PreconditionError("both graphs must be vertical")
    values = np.linalg.eigvals(local.linear_matrix)
    u, s = sorted(values, key=abs, reverse=True)
    if not (abs(s) < 1.0 < abs(u)):
        raise PreconditionError("germ is not a saddle", {"u": complex(u), "s": complex(s)})
    n_values = sorted(int(n) for n in n_values)
    if len(n_values) < 3:
        raise PreconditionError("asymptotics need at least three indices")

    history = graph_transform_n(local, stable, n_values[-1])
    ratio = abs(math.log(abs(u)) / math.log(abs(s)))
    distances, returns = [], []
    for n in n_values:
        t0 = 0.5 * eps * abs(u) ** (-n / (h + 1))
        y_r = complex(y0) + t0
        x_r = complex(history.graphs[n].evaluate(y_r))
        distances.append(distance_to_graph(unstable, x_r, y_r))
        chart = (complex(anchor) + (y_r - complex(y0)), x_r - complex(unstable.evaluate(y_r)))
        returns.append(return_index(local, chart, int(4 * ratio * n) + 50))

    ns = np.array(n_values, dtype=float)
    slope = float(np.polyfit(ns, -np.log(distances), 1)[0])
    target = math.log(abs(u))
    bound = float(np.max(np.abs(np.array(returns) - ratio * ns)))
    report = AsymptoticsReport(
        indices=n_values,
        distances=[float(d) for d in distances],
        distance_slope=slope,
        slope_target=target,
        slope_deviation=abs(slope - target) / target,
        return_indices=returns,
        ratio=ratio,
        bound=bound,
    )
    logger.info(
        f"local asymptotics: distance slope {slope:.5f} (target {target:.5f}), "
        f"return bound {bound:.3f} at ratio {ratio:.4f}"
    )
    return report
