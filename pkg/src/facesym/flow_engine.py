"""Dense optical flow via local polynomial expansion.

Each frame is approximated pixelwise by a quadratic model
``I(p + d) ~ d^T A d + b^T d + c`` fitted over a small window with Gaussian
applicability weights. For a pure translation the two frames' models relate
through ``A d = -(b2 - b1) / 2``, which is solved per pixel after averaging
the normal equations ``(A^T A) d = A^T db`` over a larger window. A
coarse-to-fine Gaussian pyramid handles displacements beyond the window
size; at each level the second frame's coefficients are warped by the
current flow estimate and the solve is iterated.

All computations are deterministic; identical inputs give bit-identical
flow fields.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import DimensionMismatch, InvalidParams
from .media_io import Frame

# Tikhonov term added to the 2x2 normal matrix diagonal. Intensities live in
# [0,1], so valid texture produces entries orders of magnitude above this;
# it only pins featureless pixels to zero displacement.
REGULARIZATION = 1e-8


@dataclass(frozen=True)
class FlowParams:
    """Tunable parameters of the flow estimator.

    poly_n is the full (odd) expansion window size; avg_window the odd side
    of the box window that averages the normal equations. pyramid_scale is
    the per-level downscale factor.
    """

    pyramid_levels: int = 3
    pyramid_scale: float = 0.5
    iterations_per_level: int = 3
    poly_n: int = 5
    poly_sigma: float = 1.1
    avg_window: int = 15

    def validate(self) -> None:
        if self.pyramid_levels < 1:
            raise InvalidParams(f"pyramid_levels must be >= 1, got {self.pyramid_levels}")
        if not (0.25 < self.pyramid_scale < 0.95):
            raise InvalidParams(
                f"pyramid_scale must lie in (0.25, 0.95), got {self.pyramid_scale}"
            )
        if self.iterations_per_level < 1:
            raise InvalidParams(
                f"iterations_per_level must be >= 1, got {self.iterations_per_level}"
            )
        if self.poly_n < 3 or self.poly_n % 2 == 0:
            raise InvalidParams(f"poly_n must be odd and >= 3, got {self.poly_n}")
        if self.poly_sigma <= 0:
            raise InvalidParams(f"poly_sigma must be > 0, got {self.poly_sigma}")
        if self.avg_window < 3 or self.avg_window % 2 == 0:
            raise InvalidParams(f"avg_window must be odd and >= 3, got {self.avg_window}")


@dataclass(frozen=True, eq=False)
class PolyCoeffs:
    """Per-pixel quadratic model: symmetric A = [[a11,a12],[a12,a22]],
    b = (b1,b2) with b1 along x (columns), and constant c."""

    a11: np.ndarray
    a12: np.ndarray
    a22: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    c: np.ndarray


@dataclass(frozen=True, eq=False)
class FlowField:
    """Per-pixel displacement in pixels/frame; u rightward, v downward."""

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=np.float64)
        v = np.asarray(self.v, dtype=np.float64)
        if u.ndim != 2 or u.shape != v.shape:
            raise DimensionMismatch(f"u/v shapes differ: {u.shape} vs {v.shape}")
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
            raise ValueError("flow contains non-finite values")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def width(self) -> int:
        return self.u.shape[1]

    @property
    def height(self) -> int:
        return self.u.shape[0]


def _applicability(poly_n: int, poly_sigma: float) -> tuple[np.ndarray, np.ndarray]:
    """1-D offsets and normalized Gaussian weights over the window."""
    radius = poly_n // 2
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    weights = np.exp(-(offsets**2) / (2.0 * poly_sigma**2))
    weights /= weights.sum()
    return offsets, weights


def _metric_matrix(offsets: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """6x6 Gram matrix of the basis (1, x, y, x^2, y^2, xy) under the
    separable applicability; identical at every pixel."""
    wx = weights[np.newaxis, :]
    wy = weights[:, np.newaxis]
    x = offsets[np.newaxis, :]
    y = offsets[:, np.newaxis]
    w2 = wy * wx
    basis = [
        np.ones_like(w2),
        x * np.ones_like(y),
        y * np.ones_like(x),
        (x**2) * np.ones_like(y),
        (y**2) * np.ones_like(x),
        x * y,
    ]
    g = np.empty((6, 6))
    for i in range(6):
        for j in range(6):
            g[i, j] = np.sum(w2 * basis[i] * basis[j])
    return g


def polynomial_expansion(
    frame: Frame | np.ndarray, poly_n: int = 5, poly_sigma: float = 1.1
) -> PolyCoeffs:
    """Fit the local quadratic model at every pixel.

    The fit is the weighted least-squares solution over the poly_n window
    with Gaussian applicability of std poly_sigma; border pixels replicate
    edge samples. Because the weights do not vary across the image the
    normal matrix is constant and the solve reduces to six separable
    correlations followed by a fixed 6x6 back-substitution.
    """
    if poly_n < 3 or poly_n % 2 == 0:
        raise InvalidParams(f"poly_n must be odd and >= 3, got {poly_n}")
    if poly_sigma <= 0:
        raise InvalidParams(f"poly_sigma must be > 0, got {poly_sigma}")
    img = frame.pixels if isinstance(frame, Frame) else np.asarray(frame, dtype=np.float64)

    offsets, w = _applicability(poly_n, poly_sigma)
    k_const = w
    k_lin = offsets * w
    k_quad = offsets**2 * w

    def corr(image: np.ndarray, kx: np.ndarray, ky: np.ndarray) -> np.ndarray:
        tmp = ndimage.correlate1d(image, kx, axis=1, mode="nearest")
        return ndimage.correlate1d(tmp, ky, axis=0, mode="nearest")

    # Weighted moments sum_{dx,dy} w(dx)w(dy) * basis(dx,dy) * I(p+dx,p+dy)
    m = np.stack(
        [
            corr(img, k_const, k_const),  # 1
            corr(img, k_lin, k_const),  # x
            corr(img, k_const, k_lin),  # y
            corr(img, k_quad, k_const),  # x^2
            corr(img, k_const, k_quad),  # y^2
            corr(img, k_lin, k_lin),  # xy
        ],
        axis=-1,
    )

    g_inv = np.linalg.inv(_metric_matrix(offsets, w))
    theta = m @ g_inv.T

    return PolyCoeffs(
        a11=theta[:, :, 3],
        a12=theta[:, :, 5] * 0.5,
        a22=theta[:, :, 4],
        b1=theta[:, :, 1],
        b2=theta[:, :, 2],
        c=theta[:, :, 0],
    )


def _resize_bilinear(img: np.ndarray, height: int, width: int) -> np.ndarray:
    """Bilinear resize with pixel-center alignment and edge clamping."""
    h, w = img.shape
    if (h, w) == (height, width):
        return img.copy()
    ys = (np.arange(height, dtype=np.float64) + 0.5) * (h / height) - 0.5
    xs = (np.arange(width, dtype=np.float64) + 0.5) * (w / width) - 0.5
    ys = np.clip(ys, 0.0, h - 1.0)
    xs = np.clip(xs, 0.0, w - 1.0)
    y0 = np.floor(ys).astype(np.intp)
    x0 = np.floor(xs).astype(np.intp)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    fy = (ys - y0)[:, np.newaxis]
    fx = (xs - x0)[np.newaxis, :]
    top = img[y0][:, x0] * (1.0 - fx) + img[y0][:, x1] * fx
    bot = img[y1][:, x0] * (1.0 - fx) + img[y1][:, x1] * fx
    return top * (1.0 - fy) + bot * fy


def _warp_bilinear(field: np.ndarray, fx: np.ndarray, fy: np.ndarray) -> np.ndarray:
    """Sample ``field`` at (fx, fy) bilinearly, clamping to the border."""
    h, w = field.shape
    fx = np.clip(fx, 0.0, w - 1.0)
    fy = np.clip(fy, 0.0, h - 1.0)
    x0 = np.floor(fx).astype(np.intp)
    y0 = np.floor(fy).astype(np.intp)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    wx = fx - x0
    wy = fy - y0
    return (
        field[y0, x0] * (1.0 - wx) * (1.0 - wy)
        + field[y0, x1] * wx * (1.0 - wy)
        + field[y1, x0] * (1.0 - wx) * wy
        + field[y1, x1] * wx * wy
    )


def _pyramid_sizes(h: int, w: int, params: FlowParams) -> list[tuple[int, int]]:
    """Level sizes, finest first; levels whose smaller side would drop below
    twice the expansion window are discarded."""
    min_side = 2 * params.poly_n
    if min(h, w) < min_side:
        raise InvalidParams(
            f"image {w}x{h} smaller than 2*poly_n={min_side}; reduce poly_n"
        )
    sizes = [(h, w)]
    for k in range(1, params.pyramid_levels):
        s = params.pyramid_scale**k
        hk, wk = int(round(h * s)), int(round(w * s))
        if min(hk, wk) < min_side:
            break
        sizes.append((hk, wk))
    return sizes


def _level_image(img: np.ndarray, level: int, size: tuple[int, int], scale: float) -> np.ndarray:
    if level == 0:
        return img
    total = scale**level
    sigma = 0.5 * (1.0 / total - 1.0)
    blurred = ndimage.gaussian_filter(img, sigma, mode="nearest")
    return _resize_bilinear(blurred, *size)


def estimate_flow_pair(
    prev: Frame, next: Frame, params: FlowParams | None = None
) -> FlowField:
    """Estimate dense flow from ``prev`` to ``next`` (pixels/frame).

    Coarse-to-fine: at each pyramid level both frames are expanded, the
    second frame's coefficients are warped by the current estimate, and the
    per-pixel system ``A d = A d_prior - (b2w - b1)/2`` is solved after
    box-averaging ``A^T A`` and ``A^T db`` over avg_window. The flow is
    upsampled by the inverse pyramid scale between levels.
    """
    params = params or FlowParams()
    params.validate()
    img1 = prev.pixels if isinstance(prev, Frame) else np.asarray(prev, dtype=np.float64)
    img2 = next.pixels if isinstance(next, Frame) else np.asarray(next, dtype=np.float64)
    if img1.shape != img2.shape:
        raise DimensionMismatch(f"frame shapes differ: {img1.shape} vs {img2.shape}")

    h, w = img1.shape
    sizes = _pyramid_sizes(h, w, params)
    win = params.avg_window

    u = v = None
    for level in range(len(sizes) - 1, -1, -1):
        hk, wk = sizes[level]
        lvl1 = _level_image(img1, level, (hk, wk), params.pyramid_scale)
        lvl2 = _level_image(img2, level, (hk, wk), params.pyramid_scale)

        if u is None:
            u = np.zeros((hk, wk))
            v = np.zeros((hk, wk))
        else:
            prev_h, prev_w = u.shape
            u = _resize_bilinear(u, hk, wk) * (wk / prev_w)
            v = _resize_bilinear(v, hk, wk) * (hk / prev_h)

        p1 = polynomial_expansion(lvl1, params.poly_n, params.poly_sigma)
        p2 = polynomial_expansion(lvl2, params.poly_n, params.poly_sigma)

        ys, xs = np.mgrid[0:hk, 0:wk].astype(np.float64)
        for _ in range(params.iterations_per_level):
            fx = xs + u
            fy = ys + v
            a11 = 0.5 * (p1.a11 + _warp_bilinear(p2.a11, fx, fy))
            a12 = 0.5 * (p1.a12 + _warp_bilinear(p2.a12, fx, fy))
            a22 = 0.5 * (p1.a22 + _warp_bilinear(p2.a22, fx, fy))
            db1 = -0.5 * (_warp_bilinear(p2.b1, fx, fy) - p1.b1) + (a11 * u + a12 * v)
            db2 = -0.5 * (_warp_bilinear(p2.b2, fx, fy) - p1.b2) + (a12 * u + a22 * v)

            g11 = ndimage.uniform_filter(a11 * a11 + a12 * a12, win, mode="nearest")
            g12 = ndimage.uniform_filter((a11 + a22) * a12, win, mode="nearest")
            g22 = ndimage.uniform_filter(a12 * a12 + a22 * a22, win, mode="nearest")
            h1 = ndimage.uniform_filter(a11 * db1 + a12 * db2, win, mode="nearest")
            h2 = ndimage.uniform_filter(a12 * db1 + a22 * db2, win, mode="nearest")

            g11 = g11 + REGULARIZATION
            g22 = g22 + REGULARIZATION
            det = g11 * g22 - g12 * g12
            u = (g22 * h1 - g12 * h2) / det
            v = (g11 * h2 - g12 * h1) / det

    return FlowField(u, v)


def flow_magnitude(flow: FlowField) -> np.ndarray:
    """Per-pixel Euclidean norm of the flow (pixels/frame)."""
    return np.hypot(flow.u, flow.v)
