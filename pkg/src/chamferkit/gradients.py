"""Analytic gradients of the set distances, and the per-pair weight curves.

The set distance is piecewise smooth: wherever no matched pair sits at
zero distance and no match is tied, the correspondence is locally
constant and the gradient is the fixed-match derivative computed here.
finite_diff_gradient and is_smooth_config exist to check and guard that
regime.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .cloud import PointCloud
from .distances import TransformSpec, chamfer, transform
from .matching import MatchResult, match_brute, match_indexed

# A configuration counts as smooth when every matched distance clears this
# and every runner-up candidate is farther than the tie margin.
SMOOTH_DISTANCE_EPS = 1e-6
SMOOTH_TIE_EPS = 1e-6


def weight_z(d, alpha: float = 1.0):
    """Per-pair gradient weight 2*alpha*d / sqrt((1 + alpha*d^2)^2 - 1).

    Evaluated in the cancellation-free equivalent form
    sqrt(2*alpha) / sqrt(1 + alpha*d^2/2), which returns the analytic
    d -> 0 limit sqrt(2*alpha) exactly, with no special case. Strictly
    decreasing in d: well-matched pairs keep their pull while far
    outliers are damped.
    """
    if not (np.isfinite(alpha) and alpha > 0):
        raise ValueError(f"alpha must be positive and finite, got {alpha}")
    arr = np.asarray(d, dtype=np.float64)
    if not (arr >= 0).all():
        raise ValueError("distances must be non-negative")
    out = np.sqrt(2.0 * alpha) / np.sqrt(1.0 + alpha * arr * arr / 2.0)
    return out if out.ndim else float(out)


def transform_derivative(spec: TransformSpec, d):
    """Derivative of spec's transform with respect to the raw distance d.

    Evaluated at d = 0 this returns the one-sided limit where it exists
    (0 for 'l1' by the subgradient convention, 0 for 'l2', the finite
    limit sqrt(2*alpha) for 'hyper' with beta = 2) and inf where the
    curve has a vertical tangent (beta < 2 for 'hyper', beta < 1 for
    'exp').
    """
    arr = np.asarray(d, dtype=np.float64)
    if not (arr >= 0).all():
        raise ValueError("distances must be non-negative")
    if spec.kind == "l1":
        out = np.where(arr > 0, 1.0, 0.0)
    elif spec.kind == "l2":
        out = 2.0 * arr
    elif spec.kind == "exp":
        a, b = spec.alpha, spec.beta
        with np.errstate(divide="ignore"):
            out = a * b * arr ** (b - 1.0) * np.exp(-a * arr**b)
    else:
        a, b = spec.alpha, spec.beta
        if b == 2.0:
            out = np.asarray(weight_z(arr, a))  # t' at beta = 2 IS the weight
        else:
            # beta*sqrt(alpha)*d^(beta/2-1) / sqrt(alpha*d^beta + 2),
            # the cancellation-free rearrangement of the raw quotient
            with np.errstate(divide="ignore"):
                out = b * np.sqrt(a) * arr ** (b / 2.0 - 1.0) / np.sqrt(a * arr**b + 2.0)
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class GradientField:
    """Per-point gradient vectors (same shape as the cloud) and the loss."""

    vectors: np.ndarray
    loss_value: float


def chamfer_gradient(
    movable: PointCloud,
    target: PointCloud,
    spec: TransformSpec,
    match: MatchResult | None = None,
    workers: int | None = None,
) -> GradientField:
    """Gradient of chamfer(movable, target, spec) in the movable points.

    Holds the correspondence fixed (valid wherever matches are untied)
    and applies the chain rule: each pair contributes
    t'(d)/|cloud| times the unit vector between its endpoints, summed
    over the forward term and the scattered backward term. Pairs at
    exactly zero distance have no defined direction and contribute
    nothing.
    """
    if match is None:
        match = match_indexed(movable, target, workers=workers)
    A, B = movable.points, target.points
    n, m = len(A), len(B)

    grad = np.zeros_like(A)
    d_f = np.sqrt(match.fwd_sq)
    d_b = np.sqrt(match.bwd_sq)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        coef_f = np.where(d_f > 0, transform_derivative(spec, d_f) / d_f, 0.0) / n
        coef_b = np.where(d_b > 0, transform_derivative(spec, d_b) / d_b, 0.0) / m
    grad += coef_f[:, None] * (A - B[match.fwd_idx])
    np.add.at(grad, match.bwd_idx, coef_b[:, None] * (A[match.bwd_idx] - B))

    loss = chamfer(movable, target, spec, match=match).value
    return GradientField(grad, loss)


def finite_diff_gradient(
    movable: PointCloud, target: PointCloud, spec: TransformSpec, h: float = 1e-5
) -> GradientField:
    """Central-difference gradient, the oracle chamfer_gradient is checked against.

    Re-solves the matching from scratch at every perturbed configuration
    (via the exhaustive matcher, independent of the spatial index), so it
    sees the true loss landscape rather than a fixed correspondence.
    O(n * m * n) and meant for tests, not training loops.
    """
    if h <= 0:
        raise ValueError("step h must be positive")
    base = movable.points

    def value(pts: np.ndarray) -> float:
        cloud = PointCloud(pts)
        return chamfer(cloud, target, spec, match=match_brute(cloud, target)).value

    g = np.empty_like(base)
    for i in range(base.shape[0]):
        for c in range(3):
            pts = base.copy()
            pts[i, c] = base[i, c] + h
            hi = value(pts)
            pts[i, c] = base[i, c] - h
            lo = value(pts)
            g[i, c] = (hi - lo) / (2.0 * h)
    return GradientField(g, value(base))


def is_smooth_config(
    movable: PointCloud,
    target: PointCloud,
    distance_eps: float = SMOOTH_DISTANCE_EPS,
    tie_eps: float = SMOOTH_TIE_EPS,
) -> bool:
    """True when every match clears distance_eps and no match is near-tied.

    On such configurations the correspondence is locally constant, so the
    fixed-match analytic gradient and finite differences agree; near a
    zero-distance pair or a tie the loss is non-differentiable and any
    comparison between the two is moot.
    """
    A, B = movable.points, target.points
    diff = A[:, None, :] - B[None, :, :]
    dm = np.sqrt((diff * diff).sum(axis=2))
    for axis in (1, 0):
        ordered = np.sort(dm, axis=axis)
        nearest = ordered.take(0, axis=axis)
        if (nearest <= distance_eps).any():
            return False
        if dm.shape[axis] > 1:
            runner_up = ordered.take(1, axis=axis)
            if (runner_up - nearest <= tie_eps).any():
                return False
    return True


@dataclass(frozen=True)
class CurveRow:
    """One sampled point of a transform curve: value and derivative at d."""

    kind: str
    alpha: float
    beta: float
    d: float
    value: float
    grad: float
    grad_normalized: float | None


@dataclass(frozen=True)
class WeightCurveSample:
    d: float
    weight: float
    normalized_weight: float


def default_curve_specs() -> list[TransformSpec]:
    """The stock comparison family: identity, square, two saturating
    exponentials, and three hyperbolic growth rates, all at alpha = 1."""
    return [
        TransformSpec("l1"),
        TransformSpec("l2"),
        TransformSpec("exp", alpha=1.0, beta=1.0),
        TransformSpec("exp", alpha=1.0, beta=2.0),
        TransformSpec("hyper", alpha=1.0, beta=1.0),
        TransformSpec("hyper", alpha=1.0, beta=2.0),
        TransformSpec("hyper", alpha=1.0, beta=3.0),
    ]


def _checked_grid(d_grid) -> np.ndarray:
    d = np.asarray(d_grid, dtype=np.float64)
    if d.ndim != 1 or d.size == 0:
        raise ValueError("d_grid must be a non-empty 1-D array")
    if not (d >= 0).all():
        raise ValueError("d_grid must be non-negative")
    if d.size > 1 and not (np.diff(d) > 0).all():
        raise ValueError("d_grid must be strictly increasing")
    return d


def sample_curves(
    specs, d_grid, normalize: bool = True
) -> list[CurveRow]:
    """Sample value and derivative of each spec over a shared distance grid.

    With normalize on, rows of 'hyper' specs with beta = 2 also carry the
    derivative divided by its d = 0 value sqrt(2*alpha), so curves for
    different alpha all start at 1 and their decay is comparable; the
    column is None for every other kind.
    """
    d = _checked_grid(d_grid)
    rows: list[CurveRow] = []
    for spec in specs:
        values = np.atleast_1d(transform(spec, d))
        with np.errstate(divide="ignore"):
            grads = np.atleast_1d(transform_derivative(spec, d))
        norm = None
        if normalize and spec.kind == "hyper" and spec.beta == 2.0:
            norm = grads / np.sqrt(2.0 * spec.alpha)
        for i in range(d.size):
            rows.append(
                CurveRow(
                    spec.kind,
                    spec.alpha,
                    spec.beta,
                    float(d[i]),
                    float(values[i]),
                    float(grads[i]),
                    float(norm[i]) if norm is not None else None,
                )
            )
    return rows


def sample_weight_curve(alpha: float, d_grid) -> list[WeightCurveSample]:
    """Sample the gradient weight and its sqrt(2*alpha)-normalized form."""
    d = _checked_grid(d_grid)
    z = np.atleast_1d(weight_z(d, alpha))
    zn = z / np.sqrt(2.0 * alpha)
    return [
        WeightCurveSample(float(d[i]), float(z[i]), float(zn[i])) for i in range(d.size)
    ]


def write_curves_csv(rows: list[CurveRow], path) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kind", "alpha", "beta", "d", "value", "grad", "grad_normalized"])
        for r in rows:
            writer.writerow(
                [
                    r.kind,
                    repr(r.alpha),
                    repr(r.beta),
                    repr(r.d),
                    repr(r.value),
                    repr(r.grad),
                    "" if r.grad_normalized is None else repr(r.grad_normalized),
                ]
            )
