"""Image grid, inpainting region, and the index maps shared by all operators.

The inpainting region Omega is the set of masked pixels.  Its expansion
Omega' adds every pixel within Manhattan distance 2 of Omega; that ring
supplies the fixed boundary data, and distance 2 is exactly the reach of
the composed third-order stencils, so every stencil read from Omega lands
inside Omega'.

Both regions are flattened to vectors in the "natural" column-major
ordering: coordinates (i, j) sorted by column j first, then row i, i.e.
(i+1, j) follows (i, j) and a full column precedes the next one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyMask, LengthMismatch, MaskTouchesBorder, ShapeMismatch

#: Minimum distance from any Omega pixel to the image border.  Keeps the
#: composed stencils (reach 2) inside the grid and Omega' fully interior.
BORDER_MARGIN = 3

#: Manhattan radius of the Omega -> Omega' expansion.
DILATION_RADIUS = 2

# All (di, dj) with |di| + |dj| <= DILATION_RADIUS, fixed order.
_DILATION_OFFSETS = [
    (di, dj)
    for di in range(-DILATION_RADIUS, DILATION_RADIUS + 1)
    for dj in range(-DILATION_RADIUS, DILATION_RADIUS + 1)
    if abs(di) + abs(dj) <= DILATION_RADIUS
]


@dataclass(frozen=True)
class GrayImage:
    """Dense 2-D grid of grayscale intensities.

    Images loaded from files are normalized so the maximum pixel value is 1
    (see :mod:`nsinpaint.imageio`); synthetic images may carry any finite
    values.  The pixel array is stored read-only; operations that modify
    pixels return a new instance.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise ShapeMismatch(f"image data must be 2-D, got ndim={arr.ndim}")
        if not np.all(np.isfinite(arr)):
            raise ShapeMismatch("image data contains non-finite values")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape


def _natural_order(coords: set[tuple[int, int]]) -> np.ndarray:
    """Sort grid coordinates column-major: key (j, i)."""
    ordered = sorted(coords, key=lambda c: (c[1], c[0]))
    return np.array(ordered, dtype=np.intp).reshape(-1, 2)


@dataclass(frozen=True)
class InpaintDomain:
    """The region Omega, its expansion Omega', and their index bijections.

    ``omega`` and ``omega_prime`` hold coordinates in natural order, so row
    ``p`` of ``omega`` is the pixel at vector position ``p``.  The dict maps
    invert that: ``idx_omega[(i, j)] == p``.  ``omega_in_prime[p]`` is the
    position of Omega pixel ``p`` inside Omega'-vectors.

    Immutable after construction; safe to share across threads.
    """

    shape: tuple[int, int]
    omega: np.ndarray
    omega_prime: np.ndarray
    idx_omega: dict = field(repr=False)
    idx_omega_prime: dict = field(repr=False)
    omega_in_prime: np.ndarray = field(repr=False)

    @property
    def n_omega(self) -> int:
        return len(self.omega)

    @property
    def n_omega_prime(self) -> int:
        return len(self.omega_prime)

    def check_image(self, image: GrayImage) -> None:
        if image.shape != self.shape:
            raise ShapeMismatch(
                f"image shape {image.shape} != domain shape {self.shape}"
            )


def extract_domain(image: GrayImage, mask: np.ndarray) -> InpaintDomain:
    """Build the inpainting domain from a mask (nonzero pixel = inpaint).

    The mask must match the image shape, contain at least one nonzero
    pixel, and keep every marked pixel at least ``BORDER_MARGIN`` pixels
    away from the image border.
    """
    mask = np.asarray(mask)
    if mask.shape != image.shape:
        raise ShapeMismatch(f"mask shape {mask.shape} != image shape {image.shape}")
    rows, cols = np.nonzero(mask)
    if rows.size == 0:
        raise EmptyMask("mask has no nonzero pixel")
    h, w = image.shape
    if (
        rows.min() < BORDER_MARGIN
        or cols.min() < BORDER_MARGIN
        or rows.max() > h - 1 - BORDER_MARGIN
        or cols.max() > w - 1 - BORDER_MARGIN
    ):
        raise MaskTouchesBorder(
            f"masked pixels must stay >= {BORDER_MARGIN} pixels from the border"
        )

    omega_set = set(zip(rows.tolist(), cols.tolist()))
    prime_set = {
        (i + di, j + dj) for (i, j) in omega_set for (di, dj) in _DILATION_OFFSETS
    }

    omega = _natural_order(omega_set)
    omega_prime = _natural_order(prime_set)
    idx_omega = {(int(i), int(j)): p for p, (i, j) in enumerate(omega)}
    idx_omega_prime = {(int(i), int(j)): p for p, (i, j) in enumerate(omega_prime)}
    omega_in_prime = np.array(
        [idx_omega_prime[(int(i), int(j))] for i, j in omega], dtype=np.intp
    )
    return InpaintDomain(
        shape=(h, w),
        omega=omega,
        omega_prime=omega_prime,
        idx_omega=idx_omega,
        idx_omega_prime=idx_omega_prime,
        omega_in_prime=omega_in_prime,
    )


def restrict(image: GrayImage, domain: InpaintDomain, which: str = "omega") -> np.ndarray:
    """Read the image pixels of Omega (or Omega') into a vector in natural order."""
    domain.check_image(image)
    if which == "omega":
        coords = domain.omega
    elif which == "omega_prime":
        coords = domain.omega_prime
    else:
        raise ValueError(f"which must be 'omega' or 'omega_prime', got {which!r}")
    return image.data[coords[:, 0], coords[:, 1]].copy()


def scatter(values: np.ndarray, domain: InpaintDomain, image: GrayImage) -> GrayImage:
    """Write an Omega-vector back into a copy of the image; other pixels untouched."""
    domain.check_image(image)
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (domain.n_omega,):
        raise LengthMismatch(
            f"expected {domain.n_omega} values, got shape {values.shape}"
        )
    out = image.data.copy()
    out[domain.omega[:, 0], domain.omega[:, 1]] = values
    return GrayImage(out)
