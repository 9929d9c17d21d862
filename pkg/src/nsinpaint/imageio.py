"""Image and mask ingestion, normalization, nearest-neighbor expansion.

Supported formats: 8-bit PGM (plain P2 or raw P5) and 8-bit PNG
(grayscale, or RGB reduced by the usual luma weights 0.299/0.587/0.114).
Loaded intensities are divided by the maximum pixel value, so the working
range is [0, 1] with max exactly 1.  Output images are written back as
8-bit via round(255 * clamp(u, 0, 1)); an input whose maximum pixel is 255
therefore round-trips every untouched pixel bit-exactly.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .errors import AllZeroImage, FactorTooSmall, IoError, UnsupportedFormat
from .grid import GrayImage

_LUMA = np.array([0.299, 0.587, 0.114])


def _read_pgm_bytes(raw: bytes, path) -> np.ndarray:
    # Decode the header (magic, width, height, maxval) skipping '#' comments.
    tokens = []
    pos = 0
    while len(tokens) < 4 and pos < len(raw):
        m = re.compile(rb"\s*(#[^\n]*\n|\S+)").match(raw, pos)
        if m is None:
            break
        pos = m.end()
        tok = m.group(1)
        if not tok.startswith(b"#"):
            tokens.append(tok)
    if len(tokens) < 4 or tokens[0] not in (b"P2", b"P5"):
        raise UnsupportedFormat(f"{path}: not a P2/P5 PGM file")
    magic = tokens[0]
    try:
        width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    except ValueError:
        raise UnsupportedFormat(f"{path}: malformed PGM header") from None
    if maxval <= 0 or maxval > 255:
        raise UnsupportedFormat(f"{path}: only 8-bit PGM supported (maxval={maxval})")

    if magic == b"P5":
        data = raw[pos + 1 :]  # single whitespace byte after maxval
        if len(data) < width * height:
            raise UnsupportedFormat(f"{path}: truncated P5 payload")
        pixels = np.frombuffer(data[: width * height], dtype=np.uint8)
    else:
        values = raw[pos:].split()
        if len(values) < width * height:
            raise UnsupportedFormat(f"{path}: truncated P2 payload")
        pixels = np.array([int(v) for v in values[: width * height]], dtype=np.int64)
        if pixels.min() < 0 or pixels.max() > maxval:
            raise UnsupportedFormat(f"{path}: P2 sample out of range")
    return pixels.reshape((height, width)).astype(np.float64)


def _read_png(path) -> np.ndarray:
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(path) as img:
            img.load()
            if img.mode == "L":
                return np.asarray(img, dtype=np.float64)
            if img.mode in ("RGB", "RGBA"):
                rgb = np.asarray(img.convert("RGB"), dtype=np.float64)
                return rgb @ _LUMA
            raise UnsupportedFormat(f"{path}: PNG mode {img.mode} not supported")
    except UnidentifiedImageError:
        raise UnsupportedFormat(f"{path}: not a readable PNG") from None


def read_gray_array(path) -> np.ndarray:
    """Raw (un-normalized) grayscale array from a PGM or PNG file."""
    path = Path(path)
    suffix = path.suffix.lower()
    try:
        if suffix == ".png":
            return _read_png(path)
        if suffix in (".pgm", ".ppm"):
            return _read_pgm_bytes(path.read_bytes(), path)
        # fall back to sniffing the magic bytes
        raw = path.read_bytes()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    if raw[:2] in (b"P2", b"P5"):
        return _read_pgm_bytes(raw, path)
    if raw[:8] == b"\x89PNG\r\n\x1a\n":
        return _read_png(path)
    raise UnsupportedFormat(f"{path}: unrecognized image format")


def load_image(path) -> GrayImage:
    """Load and normalize an image so its maximum intensity is exactly 1."""
    arr = read_gray_array(path)
    peak = float(arr.max())
    if peak <= 0.0:
        raise AllZeroImage(f"{path}: image is all zero, cannot normalize")
    return GrayImage(arr / peak)


def load_mask(path) -> np.ndarray:
    """Load a mask image; any nonzero pixel marks the inpainting region."""
    return read_gray_array(path) != 0


def to_uint8(image: GrayImage) -> np.ndarray:
    """Denormalize to 8-bit: round(255 * clamp(u, 0, 1))."""
    return np.rint(255.0 * np.clip(image.data, 0.0, 1.0)).astype(np.uint8)


def write_pgm(path, pixels: np.ndarray) -> None:
    """Write an 8-bit array as binary (P5) PGM."""
    pixels = np.ascontiguousarray(pixels, dtype=np.uint8)
    h, w = pixels.shape
    try:
        with open(path, "wb") as fh:
            fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
            fh.write(pixels.tobytes())
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def write_png(path, pixels: np.ndarray) -> None:
    from PIL import Image

    try:
        Image.fromarray(np.ascontiguousarray(pixels, dtype=np.uint8), mode="L").save(
            path, format="PNG"
        )
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def save_image(image: GrayImage, path) -> None:
    """Write the image as 8-bit PGM or PNG, chosen by the file extension."""
    pixels = to_uint8(image)
    suffix = Path(path).suffix.lower()
    if suffix == ".png":
        write_png(path, pixels)
    elif suffix == ".pgm":
        write_pgm(path, pixels)
    else:
        raise UnsupportedFormat(f"{path}: output must be .pgm or .png")


def expand_nearest(image: GrayImage, factor: int):
    """Nearest-neighbor upscale by an integer factor.

    Original pixel (i, j) lands at (i*factor, j*factor); every other
    position is filled with its nearest anchor and marked in the returned
    mask, so the inpainting pipeline run on (expanded, mask) performs
    interpolation.  Anchor pixels are never masked.
    """
    if int(factor) != factor or factor < 2:
        raise FactorTooSmall(f"factor must be an integer >= 2, got {factor}")
    factor = int(factor)
    h, w = image.shape
    out_h, out_w = h * factor, w * factor
    yy = np.clip(np.rint(np.arange(out_h) / factor).astype(np.intp), 0, h - 1)
    xx = np.clip(np.rint(np.arange(out_w) / factor).astype(np.intp), 0, w - 1)
    expanded = image.data[np.ix_(yy, xx)]
    mask = np.ones((out_h, out_w), dtype=bool)
    mask[:: factor, :: factor] = False
    return GrayImage(expanded), mask
