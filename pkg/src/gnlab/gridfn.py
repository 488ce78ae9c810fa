"""Grid-sampled functions on uniform boxes with finite-difference calculus.

Functions live as dense float64 arrays over product grids on a box in R^n.
Derivatives use 4th-order central stencils with zero extension outside the
box (inputs are expected to decay there); norms use product trapezoid
quadrature; restrictions to sub-boxes resample the piecewise-linear
interpolant so window norms vary continuously with the window.  Dilation
re-evaluates closed-form families whenever possible, which makes the scaling
identities hold to rounding error instead of discretization error.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import factorial
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import ndimage

from .errors import (
    AxisOutOfRange,
    EmptyRegion,
    EpsTooSmall,
    GridTooCoarse,
    NonpositiveScale,
    SupportExceedsBox,
)
from .exponents import ExtReal, as_extreal

Box = Tuple[Tuple[float, float], ...]
Region = Sequence[Tuple[float, float]]

# relative boundary value above which a sampled family is flagged as not
# decayed at the box edge (zero extension would then bias derivatives)
EDGE_DECAY_RTOL = 1e-8

_trapz = getattr(np, "trapezoid", None) or np.trapz


class FamilyKind(str, Enum):
    GAUSSIAN = "gaussian"
    BUMP = "bump"
    SINE_BUMP = "sine_bump"
    POLY_GAUSSIAN = "poly_gaussian"


@dataclass(frozen=True)
class FamilySpec:
    """Closed-form test function: kind + shape parameters + center.

    shape_params by kind (centers are length-n points):
      GAUSSIAN       (w,) isotropic, or (w_1..w_n), or (w_1, w_2, angle) in 2-D
      BUMP           (w,)    exp(-1/(1 - |x-c|^2/w^2)) inside |x-c| < w, else 0
      SINE_BUMP      (w, omega[, phase])   bump envelope * sin(omega*sum(x-c)+phase)
      POLY_GAUSSIAN  (w, a0, a1, ...)      P(x_1-c_1) * exp(-|x-c|^2/w^2)
    """

    kind: FamilyKind
    shape_params: Tuple[float, ...]
    center: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "kind", FamilyKind(self.kind))
        object.__setattr__(
            self, "shape_params", tuple(float(v) for v in self.shape_params)
        )
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))
        n = self.dim
        params = self.shape_params
        if self.kind == FamilyKind.GAUSSIAN:
            if len(params) not in (1, n) and not (n == 2 and len(params) == 3):
                raise ValueError("gaussian expects 1 or n widths (+ angle in 2-D)")
            widths = params[:2] if (n == 2 and len(params) == 3) else params
            if any(w <= 0 for w in widths):
                raise ValueError("gaussian widths must be positive")
        elif self.kind == FamilyKind.BUMP:
            if len(params) != 1 or params[0] <= 0:
                raise ValueError("bump expects a single positive width")
        elif self.kind == FamilyKind.SINE_BUMP:
            if len(params) not in (2, 3) or params[0] <= 0:
                raise ValueError("sine_bump expects (width, omega[, phase])")
        elif self.kind == FamilyKind.POLY_GAUSSIAN:
            if len(params) < 2 or params[0] <= 0:
                raise ValueError("poly_gaussian expects (width, a0, ...)")

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def support_radius(self) -> Optional[float]:
        """Radius of compact support, or None for full-space families."""
        if self.kind in (FamilyKind.BUMP, FamilyKind.SINE_BUMP):
            return self.shape_params[0]
        return None

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "shape_params": list(self.shape_params),
            "center": list(self.center),
        }

    @classmethod
    def from_json(cls, obj) -> "FamilySpec":
        return cls(FamilyKind(obj["kind"]), tuple(obj["shape_params"]), tuple(obj["center"]))


def family_values(spec: FamilySpec, axes: Sequence[np.ndarray]) -> np.ndarray:
    """Evaluate the family on the product grid spanned by per-axis coords."""
    if len(axes) != spec.dim:
        raise ValueError(f"family is {spec.dim}-dimensional, got {len(axes)} axes")
    mesh = np.meshgrid(*axes, indexing="ij") if spec.dim > 1 else [np.asarray(axes[0])]
    dx = [m - c for m, c in zip(mesh, spec.center)]
    params = spec.shape_params

    if spec.kind == FamilyKind.GAUSSIAN:
        if spec.dim == 2 and len(params) == 3:
            w1, w2, ang = params
            ca, sa = math.cos(ang), math.sin(ang)
            xr = ca * dx[0] + sa * dx[1]
            yr = -sa * dx[0] + ca * dx[1]
            return np.exp(-((xr / w1) ** 2) - (yr / w2) ** 2)
        widths = params if len(params) == spec.dim else params * spec.dim
        expo = sum((d / w) ** 2 for d, w in zip(dx, widths))
        return np.exp(-expo)

    if spec.kind in (FamilyKind.BUMP, FamilyKind.SINE_BUMP):
        w = params[0]
        r2 = sum(d * d for d in dx) / (w * w)
        vals = np.zeros_like(r2, dtype=float)
        inside = r2 < 1.0
        with np.errstate(divide="ignore", over="ignore"):
            vals[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
        if spec.kind == FamilyKind.SINE_BUMP:
            omega = params[1]
            phase = params[2] if len(params) > 2 else 0.0
            vals = vals * np.sin(omega * sum(dx) + phase)
        return vals

    if spec.kind == FamilyKind.POLY_GAUSSIAN:
        w, coeffs = params[0], params[1:]
        t = dx[0]
        poly = np.zeros_like(t, dtype=float)
        for a in reversed(coeffs):
            poly = poly * t + a
        expo = sum(d * d for d in dx) / (w * w)
        return poly * np.exp(-expo)

    raise ValueError(f"unknown family kind {spec.kind}")


def dilated_family(spec: FamilySpec, s: float) -> FamilySpec:
    """The family representing x -> f(s x); every kind is closed under dilation."""
    c = tuple(v / s for v in spec.center)
    p = spec.shape_params
    if spec.kind == FamilyKind.GAUSSIAN:
        if spec.dim == 2 and len(p) == 3:
            new = (p[0] / s, p[1] / s, p[2])
        else:
            new = tuple(w / s for w in p)
    elif spec.kind == FamilyKind.BUMP:
        new = (p[0] / s,)
    elif spec.kind == FamilyKind.SINE_BUMP:
        new = (p[0] / s, p[1] * s) + tuple(p[2:])
    else:  # POLY_GAUSSIAN: coefficients pick up powers of s
        new = (p[0] / s,) + tuple(a * s**m for m, a in enumerate(p[1:]))
    return FamilySpec(spec.kind, new, c)


@dataclass(eq=False)
class GridFunction:
    """Samples of a function on a uniform product grid over a box in R^n."""

    dim: int
    box: Box
    shape: Tuple[int, ...]
    samples: np.ndarray
    family: Optional[FamilySpec] = None
    interpolated: bool = False
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.box = tuple((float(lo), float(hi)) for lo, hi in self.box)
        self.shape = tuple(int(m) for m in self.shape)
        if len(self.box) != self.dim or len(self.shape) != self.dim:
            raise ValueError("box/shape length must equal dim")
        for lo, hi in self.box:
            if not (hi > lo) or not math.isfinite(lo) or not math.isfinite(hi):
                raise ValueError(f"bad box interval ({lo}, {hi})")
        if any(m < 8 for m in self.shape):
            raise ValueError("need at least 8 samples per axis")
        self.samples = np.asarray(self.samples, dtype=float).reshape(self.shape)
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("samples must be finite")

    @property
    def spacing(self) -> Tuple[float, ...]:
        return tuple((hi - lo) / (m - 1) for (lo, hi), m in zip(self.box, self.shape))

    @property
    def data(self) -> np.ndarray:
        return self.samples

    def axes(self) -> Tuple[np.ndarray, ...]:
        if "axes" not in self._cache:
            self._cache["axes"] = tuple(
                np.linspace(lo, hi, m) for (lo, hi), m in zip(self.box, self.shape)
            )
        return self._cache["axes"]

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.samples)))

    def boundary_max(self) -> float:
        """Largest |sample| on any face of the box."""
        worst = 0.0
        for ax in range(self.dim):
            sl0 = [slice(None)] * self.dim
            sl1 = [slice(None)] * self.dim
            sl0[ax], sl1[ax] = 0, -1
            worst = max(
                worst,
                float(np.max(np.abs(self.samples[tuple(sl0)]))),
                float(np.max(np.abs(self.samples[tuple(sl1)]))),
            )
        return worst

    def value_at(self, point: Sequence[float]) -> float:
        """Multilinear interpolation at a single point inside the box."""
        point = np.atleast_1d(np.asarray(point, dtype=float))
        if self.dim == 1:
            return float(np.interp(point[0], self.axes()[0], self.samples))
        idx = [
            np.clip((p - lo) / h, 0.0, m - 1.0)
            for p, (lo, _), h, m in zip(point, self.box, self.spacing, self.shape)
        ]
        return float(
            ndimage.map_coordinates(
                self.samples, np.array(idx).reshape(self.dim, 1), order=1, mode="nearest"
            )[0]
        )


@dataclass(eq=False)
class DerivativeField:
    """Pointwise magnitude |D^k u| on the same grid as its source function."""

    dim: int
    box: Box
    shape: Tuple[int, ...]
    order: int
    magnitude: np.ndarray

    def __post_init__(self):
        self.magnitude = np.asarray(self.magnitude, dtype=float).reshape(self.shape)
        if np.min(self.magnitude) < 0:
            raise ValueError("magnitude must be nonnegative")

    @property
    def spacing(self) -> Tuple[float, ...]:
        return tuple((hi - lo) / (m - 1) for (lo, hi), m in zip(self.box, self.shape))

    @property
    def data(self) -> np.ndarray:
        return self.magnitude

    def axes(self) -> Tuple[np.ndarray, ...]:
        return tuple(
            np.linspace(lo, hi, m) for (lo, hi), m in zip(self.box, self.shape)
        )


GridData = Union[GridFunction, DerivativeField]


def sample_family(spec: FamilySpec, box: Region, shape: Sequence[int]) -> GridFunction:
    """Evaluate a closed-form family on a fresh grid.

    Compactly supported kinds must fit strictly inside the box; families that
    do not decay below EDGE_DECAY_RTOL at the boundary trigger a warning,
    since derivatives assume zero extension.
    """
    box = tuple((float(lo), float(hi)) for lo, hi in box)
    shape = tuple(int(m) for m in shape)
    rad = spec.support_radius
    if rad is not None:
        for c, (lo, hi) in zip(spec.center, box):
            if not (lo < c - rad and c + rad < hi):
                raise SupportExceedsBox(
                    f"support [{c - rad}, {c + rad}] not strictly inside ({lo}, {hi})"
                )
    axes = [np.linspace(lo, hi, m) for (lo, hi), m in zip(box, shape)]
    vals = family_values(spec, axes)
    u = GridFunction(dim=spec.dim, box=box, shape=shape, samples=vals, family=spec)
    amax = u.max_abs()
    if amax > 0 and u.boundary_max() > EDGE_DECAY_RTOL * amax:
        warnings.warn(
            "family does not decay at the box edge; derivative boundary bands "
            "will be biased by zero extension",
            stacklevel=2,
        )
    return u


def from_callable(fn, box: Region, shape: Sequence[int], dim: Optional[int] = None) -> GridFunction:
    """Sample an arbitrary callable fn(*mesh) on a grid (no family metadata)."""
    box = tuple((float(lo), float(hi)) for lo, hi in box)
    shape = tuple(int(m) for m in shape)
    dim = dim or len(box)
    axes = [np.linspace(lo, hi, m) for (lo, hi), m in zip(box, shape)]
    mesh = np.meshgrid(*axes, indexing="ij") if dim > 1 else [axes[0]]
    return GridFunction(dim=dim, box=box, shape=shape, samples=np.asarray(fn(*mesh), dtype=float))


def scaled(u: GridFunction, t: float) -> GridFunction:
    """t * u; drops family metadata (families carry no amplitude parameter)."""
    return GridFunction(
        dim=u.dim, box=u.box, shape=u.shape, samples=u.samples * float(t),
        interpolated=u.interpolated,
    )


def _diff4(a: np.ndarray, h: float, axis: int) -> np.ndarray:
    """4th-order central first derivative with zero extension at the ends."""
    pad = [(0, 0)] * a.ndim
    pad[axis] = (2, 2)
    b = np.moveaxis(np.pad(a, pad, mode="constant"), axis, 0)
    d = (-b[4:] + 8.0 * b[3:-1] - 8.0 * b[1:-3] + b[:-4]) / (12.0 * h)
    return np.moveaxis(d, 0, axis)


def partial_derivative(u: GridFunction, axis: int) -> GridFunction:
    """du/dx_axis by 4th-order differences (boundary band uses zero extension)."""
    if not (0 <= axis < u.dim):
        raise AxisOutOfRange(f"axis {axis} for a {u.dim}-dimensional function")
    d = _diff4(u.samples, u.spacing[axis], axis)
    return GridFunction(
        dim=u.dim, box=u.box, shape=u.shape, samples=d, interpolated=u.interpolated
    )


def derivative_magnitude(
    u: GridFunction, k: int, axes: Optional[Sequence[int]] = None
) -> DerivativeField:
    """Euclidean magnitude of the order-k derivative tensor.

    |D^k u|^2 sums the squares of all n^k ordered k-tuples of partials;
    equal mixed partials are grouped with multinomial weights.  With
    `axes` the tuple entries are restricted to a subset of directions
    (used for direction-split estimates), so e.g. axes=(n-1,) and k=2
    gives |d^2 u / dx_n^2|.
    """
    if k < 1:
        raise ValueError("derivative order must be >= 1")
    active = tuple(range(u.dim)) if axes is None else tuple(axes)
    if any(not 0 <= ax < u.dim for ax in active):
        raise AxisOutOfRange(f"axes {active} for dim {u.dim}")
    if any(u.shape[ax] < 4 * k + 4 for ax in active):
        raise GridTooCoarse(f"order {k} needs at least {4 * k + 4} points per axis")

    h = u.spacing
    memo: Dict[Tuple[int, ...], np.ndarray] = {(): u.samples}

    def partial(alpha: Tuple[int, ...]) -> np.ndarray:
        if alpha not in memo:
            ax = alpha[-1]
            memo[alpha] = _diff4(partial(alpha[:-1]), h[ax], ax)
        return memo[alpha]

    total = np.zeros(u.shape)
    for combo in itertools.combinations_with_replacement(active, k):
        counts: Dict[int, int] = {}
        for ax in combo:
            counts[ax] = counts.get(ax, 0) + 1
        weight = factorial(k)
        for c in counts.values():
            weight //= factorial(c)
        d = partial(combo)
        total += weight * d * d
    return DerivativeField(dim=u.dim, box=u.box, shape=u.shape, order=k, magnitude=np.sqrt(total))


def _trap_integral(values: np.ndarray, spacings: Sequence[float]) -> float:
    acc = values
    for ax in reversed(range(acc.ndim)):
        acc = _trapz(acc, dx=spacings[ax], axis=ax)
    return float(acc)


def _clip_region(obj: GridData, region: Region) -> Box:
    clipped = []
    for (lo, hi), (a, b) in zip(obj.box, region):
        a2, b2 = max(lo, float(a)), min(hi, float(b))
        if not (b2 > a2):
            raise EmptyRegion(f"region ({a}, {b}) misses the box ({lo}, {hi})")
        clipped.append((a2, b2))
    return tuple(clipped)


def _resample(obj: GridData, region: Region, oversample: int = 2):
    """Restrict to a sub-box by resampling the piecewise-linear interpolant.

    Returns (values, spacings) on a fresh uniform grid spanning exactly the
    clipped region; resolution tracks the native spacing times `oversample`
    so window quantities vary continuously with the window.
    """
    region = _clip_region(obj, region)
    h = obj.spacing
    coords = []
    for (a, b), hn in zip(region, h):
        m = max(17, int(math.ceil((b - a) / hn)) * oversample + 1)
        coords.append(np.linspace(a, b, m))
    if obj.data.ndim == 1:
        vals = np.interp(coords[0], obj.axes()[0], obj.data)
    else:
        idx = [
            np.clip((c - lo) / hn, 0.0, m - 1.0)
            for c, (lo, _), hn, m in zip(coords, obj.box, h, obj.data.shape)
        ]
        mesh = np.meshgrid(*idx, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh])
        vals = ndimage.map_coordinates(obj.data, pts, order=1, mode="nearest").reshape(
            tuple(len(c) for c in coords)
        )
    spac = tuple((b - a) / (len(c) - 1) for (a, b), c in zip(region, coords))
    return vals, spac


def lp_norm(obj: GridData, p, region: Optional[Region] = None) -> float:
    """L^p quadrature norm over the box or a sub-box; p = inf is the max."""
    p = as_extreal(p)
    if not p.is_infinite and p.frac < 1:
        raise ValueError(f"norm order p={p} below 1")
    if region is None:
        vals, spac = obj.data, obj.spacing
    else:
        vals, spac = _resample(obj, region)
    if p.is_infinite:
        return float(np.max(np.abs(vals)))
    pw = float(p)
    return _trap_integral(np.abs(vals) ** pw, spac) ** (1.0 / pw)


def power_integral(obj: GridData, p: float, region: Optional[Region] = None) -> float:
    """int |u|^p over the box or sub-box (modular form, no root taken)."""
    if region is None:
        vals, spac = obj.data, obj.spacing
    else:
        vals, spac = _resample(obj, region)
    return _trap_integral(np.abs(vals) ** float(p), spac)


def mean_value(obj: GridData, region: Optional[Region] = None) -> float:
    """Quadrature mean over a region of positive volume."""
    if region is None:
        vals, spac = obj.data, obj.spacing
        vol = math.prod(hi - lo for lo, hi in obj.box)
    else:
        clipped = _clip_region(obj, region)
        vals, spac = _resample(obj, region)
        vol = math.prod(b - a for a, b in clipped)
    if vol <= 0:
        raise EmptyRegion("region has no volume")
    return _trap_integral(vals, spac) / vol


def dilate(u: GridFunction, s: float) -> GridFunction:
    """The dilation (T_s u)(x) = u(s x) on the box scaled by 1/s.

    Sample counts are preserved.  When the function carries its family the
    dilated samples are exact re-evaluations; otherwise they are linear
    interpolations of the stored samples, flagged via `interpolated`.
    """
    s = float(s)
    if s <= 0:
        raise NonpositiveScale(f"dilation scale must be positive, got {s}")
    new_box = tuple((lo / s, hi / s) for lo, hi in u.box)
    if u.family is not None:
        return sample_family(dilated_family(u.family, s), new_box, u.shape)
    axes = [np.linspace(lo, hi, m) for (lo, hi), m in zip(new_box, u.shape)]
    if u.dim == 1:
        vals = np.interp(axes[0] * s, u.axes()[0], u.samples)
    else:
        idx = [
            np.clip((c * s - lo) / h, 0.0, m - 1.0)
            for c, (lo, _), h, m in zip(axes, u.box, u.spacing, u.shape)
        ]
        mesh = np.meshgrid(*idx, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh])
        vals = ndimage.map_coordinates(u.samples, pts, order=1, mode="nearest").reshape(u.shape)
    return GridFunction(
        dim=u.dim, box=new_box, shape=u.shape, samples=vals, interpolated=True
    )


def mollify(u: GridFunction, eps: float) -> GridFunction:
    """Convolution with the standard radial bump kernel of radius eps.

    The discrete kernel is normalized to unit mass, so constants are exactly
    preserved away from the boundary and sup norms never grow.
    """
    eps = float(eps)
    hmax = max(u.spacing)
    if eps <= 0 or eps < 2.0 * hmax:
        raise EpsTooSmall(f"eps={eps} below grid resolution (need >= {2 * hmax})")
    offsets = []
    for h in u.spacing:
        kr = int(math.floor(eps / h))
        offsets.append(np.arange(-kr, kr + 1) * h)
    mesh = np.meshgrid(*offsets, indexing="ij") if u.dim > 1 else [offsets[0]]
    r2 = sum(m * m for m in mesh) / (eps * eps)
    kernel = np.zeros_like(r2, dtype=float)
    inside = r2 < 1.0
    with np.errstate(divide="ignore", over="ignore"):
        kernel[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
    kernel /= kernel.sum()
    sm = ndimage.convolve(u.samples, kernel, mode="constant", cval=0.0)
    return GridFunction(dim=u.dim, box=u.box, shape=u.shape, samples=sm)


def refined_shape(shape: Sequence[int], factor: int = 2) -> Tuple[int, ...]:
    """Nested refinement: m -> factor*(m-1)+1 keeps existing nodes in place."""
    return tuple(factor * (m - 1) + 1 for m in shape)
