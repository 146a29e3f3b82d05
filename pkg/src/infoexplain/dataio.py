"""File ingestion and persistence: sample CSV and grayscale images.

Sample CSV format: header ``x1,...,xn,yhat,u``, one data row per sample,
plain decimal floats, no index column. Images: PGM P2/P5 (maxval <= 65535)
or single-channel 8/16-bit PNG, rescaled to [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .errors import (
    CorruptFile,
    DimensionMismatch,
    IoFailure,
    MalformedHeader,
    NonNumericCell,
    RaggedRow,
    TooFewSamples,
    UnsupportedFormat,
)
from .model import SampleSet

PathLike = Union[str, Path]


def _expected_header(n: int) -> list:
    return [f"x{i}" for i in range(1, n + 1)] + ["yhat", "u"]


def load_samples_csv(path: PathLike) -> SampleSet:
    """Read a SampleSet from CSV, inferring n from the header.

    Raises
    ------
    MalformedHeader
        If the header is not exactly ``x1,...,xn,yhat,u`` with n >= 1.
    RaggedRow
        If a data row has the wrong number of cells.
    NonNumericCell
        If a cell does not parse as a finite decimal number (NaN and Inf
        count as non-numeric); the error carries the 1-based location.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    lines = text.splitlines()
    if not lines:
        raise MalformedHeader(f"{path}: empty file, expected header x1,...,xn,yhat,u")
    header = [cell.strip() for cell in lines[0].split(",")]
    n = len(header) - 2
    if n < 1 or header != _expected_header(n):
        raise MalformedHeader(
            f"{path}: header {lines[0]!r} does not match x1,...,xn,yhat,u"
        )
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if line == "":
            continue
        cells = line.split(",")
        if len(cells) != n + 2:
            raise RaggedRow(
                f"{path}: row {lineno} has {len(cells)} cells, expected {n + 2}"
            )
        parsed = []
        for col, cell in enumerate(cells, start=1):
            try:
                value = float(cell)
            except ValueError:
                raise NonNumericCell(lineno, col, cell.strip()) from None
            if not math.isfinite(value):
                raise NonNumericCell(lineno, col, cell.strip())
            parsed.append(value)
        rows.append(parsed)
    if not rows:
        raise TooFewSamples(f"{path}: no data rows")
    data = np.array(rows, dtype=float)
    return SampleSet(
        features=data[:, :n], predictions=data[:, n], summaries=data[:, n + 1]
    )


def write_samples_csv(samples: SampleSet, path: PathLike) -> None:
    """Write a SampleSet as CSV with 17-significant-digit decimals.

    17 significant digits round-trip IEEE doubles exactly, so
    ``load_samples_csv`` recovers the values to full precision.
    """
    lines = [",".join(_expected_header(samples.n))]
    data = np.column_stack(
        [samples.features, samples.predictions, samples.summaries]
    )
    for row in data:
        lines.append(",".join(f"{x:.17g}" for x in row))
    try:
        Path(path).write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


@dataclass(frozen=True)
class ImageGrid:
    """Grayscale raster with row-major intensities in [0, 1]."""

    pixels: np.ndarray  # (height, width) float64

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=float)
        if px.ndim != 2 or px.size == 0:
            raise DimensionMismatch(f"pixels must be a nonempty 2-d array, got {px.shape}")
        if px.min() < 0.0 or px.max() > 1.0:
            raise DimensionMismatch("intensities must lie in [0, 1]")
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


def _parse_pgm(raw: bytes, path: PathLike) -> ImageGrid:
    magic = raw[:2]
    # header tokens may be separated by whitespace and '#' comments
    pos = 2
    tokens = []
    while len(tokens) < 3:
        while pos < len(raw) and raw[pos : pos + 1].isspace():
            pos += 1
        if pos < len(raw) and raw[pos : pos + 1] == b"#":
            while pos < len(raw) and raw[pos : pos + 1] not in (b"\n", b""):
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise CorruptFile(f"{path}: truncated PGM header")
        tokens.append(raw[start:pos])
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise CorruptFile(f"{path}: non-integer PGM header fields {tokens}") from None
    if width < 1 or height < 1 or not 0 < maxval <= 65535:
        raise CorruptFile(
            f"{path}: bad PGM dimensions {width}x{height} maxval {maxval}"
        )
    count = width * height
    if magic == b"P2":
        fields = raw[pos:].split()
        if len(fields) < count:
            raise CorruptFile(
                f"{path}: P2 body has {len(fields)} values, expected {count}"
            )
        try:
            values = np.array([int(f) for f in fields[:count]], dtype=float)
        except ValueError:
            raise CorruptFile(f"{path}: non-integer P2 pixel value") from None
    else:  # P5: single whitespace byte after maxval, then binary pixels
        pos += 1
        width16 = maxval > 255
        need = count * (2 if width16 else 1)
        body = raw[pos : pos + need]
        if len(body) < need:
            raise CorruptFile(
                f"{path}: P5 body has {len(body)} bytes, expected {need}"
            )
        dtype = ">u2" if width16 else np.uint8  # Netpbm: most significant byte first
        values = np.frombuffer(body, dtype=dtype).astype(float)
    if values.min() < 0 or values.max() > maxval:
        raise CorruptFile(f"{path}: pixel value outside [0, maxval={maxval}]")
    return ImageGrid(values.reshape(height, width) / maxval)


def _load_png(path: PathLike) -> ImageGrid:
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(path) as img:
            mode = img.mode
            if mode == "L":
                scale = 255.0
            elif mode in ("I;16", "I;16B", "I;16L", "I"):
                scale = 65535.0
            else:
                raise UnsupportedFormat(
                    f"{path}: PNG mode {mode!r} is not single-channel grayscale; "
                    "convert the image to 8- or 16-bit grayscale first"
                )
            values = np.asarray(img, dtype=float)
    except UnidentifiedImageError as exc:
        raise CorruptFile(f"{path}: unreadable PNG: {exc}") from exc
    except OSError as exc:
        raise CorruptFile(f"{path}: truncated or corrupt PNG: {exc}") from exc
    return ImageGrid(values / scale)


def load_grayscale_image(path: PathLike) -> ImageGrid:
    """Load a grayscale image (PGM P2/P5 or single-channel PNG).

    Intensities are rescaled to [0, 1] by the format's declared maximum.
    The format is detected from the file content, not the extension.
    """
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    if raw[:2] in (b"P2", b"P5"):
        return _parse_pgm(raw, path)
    if raw[:8] == b"\x89PNG\r\n\x1a\n":
        return _load_png(path)
    raise UnsupportedFormat(
        f"{path}: not a PGM (P2/P5) or PNG file; convert the image first"
    )


def write_pgm(pixels: np.ndarray, path: PathLike, maxval: int = 255) -> None:
    """Write intensities in [0, 1] as a text (P2) PGM file."""
    px = np.asarray(pixels, dtype=float)
    if px.ndim != 2:
        raise DimensionMismatch(f"pixels must be 2-d, got shape {px.shape}")
    quantized = np.rint(np.clip(px, 0.0, 1.0) * maxval).astype(int)
    height, width = px.shape
    lines = ["P2", f"{width} {height}", str(maxval)]
    for row in quantized:
        lines.append(" ".join(str(v) for v in row))
    try:
        Path(path).write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
