"""
PGM (P2 ASCII / P5 binary) grayscale reader and writer, maxval up to 255
"""

import logging
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np

from app.core.exceptions import ImageFormatError, ImageNotFoundError, UnsupportedImageError
from app.models.image import ImageBuffer

logger = logging.getLogger(__name__)

MAX_GRAY = 255
WHITESPACE = b" \t\r\n\v\f"

PathLike = Union[str, Path]


def _read_header(data: bytes) -> Tuple[List[bytes], int]:
    """
    Read the four header tokens (magic, width, height, maxval)

    A comment may directly follow maxval; it runs to the end of its line and
    that line break ends the header.

    Returns:
        The tokens and the offset of the first payload byte
    """
    tokens: List[bytes] = []
    pos = 0
    size = len(data)
    while len(tokens) < 4:
        while pos < size and data[pos] in WHITESPACE:
            pos += 1
        if pos < size and data[pos:pos + 1] == b"#":
            while pos < size and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        if pos >= size:
            raise ImageFormatError("malformed header: unexpected end of data")
        start = pos
        while pos < size and data[pos] not in WHITESPACE and data[pos:pos + 1] != b"#":
            pos += 1
        tokens.append(data[start:pos])
    if data[pos:pos + 1] == b"#":
        while pos < size and data[pos:pos + 1] not in (b"\n", b"\r"):
            pos += 1
    if pos >= size:
        raise ImageFormatError("malformed header: unexpected end of data")
    return tokens, pos + 1


def _parse_int(token: bytes, name: str) -> int:
    try:
        value = int(token)
    except ValueError as e:
        raise ImageFormatError(f"malformed header: {name} is not an integer ({token!r})") from e
    if value < 1:
        raise ImageFormatError(f"malformed header: {name} must be positive, got {value}")
    return value


def decode_pgm(data: bytes) -> ImageBuffer:
    """Decode PGM bytes into an ImageBuffer"""
    tokens, pos = _read_header(data)
    magic = tokens[0]
    if magic not in (b"P2", b"P5"):
        raise ImageFormatError(f"malformed header: unsupported magic {magic!r}, expected P2 or P5")

    width = _parse_int(tokens[1], "width")
    height = _parse_int(tokens[2], "height")
    maxval = _parse_int(tokens[3], "maxval")
    if maxval > MAX_GRAY:
        raise UnsupportedImageError(f"unsupported maxval {maxval} (only 8-bit images up to {MAX_GRAY})")

    count = width * height
    if magic == b"P5":
        payload = data[pos:pos + count]
        if len(payload) < count:
            raise ImageFormatError("unexpected end of data")
        values = np.frombuffer(payload, dtype=np.uint8).astype(np.float64)
    else:
        words = data[pos:].split()
        if len(words) < count:
            raise ImageFormatError("unexpected end of data")
        bad = next((word for word in words[:count] if not word.isdigit()), None)
        if bad is not None:
            raise ImageFormatError(f"malformed pixel data: {bad!r} is not a non-negative integer")
        values = np.array([int(word) for word in words[:count]], dtype=np.float64)
        if values.max(initial=0) > maxval:
            raise ImageFormatError(f"pixel value exceeds maxval {maxval}")

    if maxval != MAX_GRAY:
        values = values * (MAX_GRAY / maxval)
    return ImageBuffer(values.reshape(height, width))


def load_grayscale(path: PathLike) -> ImageBuffer:
    """
    Load a PGM grayscale image

    Args:
        path: Path to a P2 or P5 file

    Returns:
        ImageBuffer with intensities in [0, 255]

    Raises:
        ImageNotFoundError: If the file does not exist
        ImageFormatError: If the header or payload is malformed
        UnsupportedImageError: If maxval exceeds 255
    """
    path = Path(path)
    if not path.is_file():
        logger.error(f"Image not found: path={path}")
        raise ImageNotFoundError(f"Image file not found: {path}")

    image = decode_pgm(path.read_bytes())
    logger.debug(f"Loaded PGM: path={path}, width={image.width}, height={image.height}")
    return image


def quantize(image: ImageBuffer) -> np.ndarray:
    """8-bit export values: round half to even, clamp to [0, 255]"""
    return np.clip(np.rint(image.data), 0, MAX_GRAY).astype(np.uint8)


def encode_pgm(image: ImageBuffer, binary: bool = True) -> bytes:
    pixels = quantize(image)
    magic = "P5" if binary else "P2"
    header = f"{magic}\n{image.width} {image.height}\n{MAX_GRAY}\n".encode("ascii")
    if binary:
        return header + pixels.tobytes()
    rows = "\n".join(" ".join(str(int(v)) for v in row) for row in pixels)
    return header + rows.encode("ascii") + b"\n"


def save_pgm(image: ImageBuffer, path: PathLike, binary: bool = True) -> Path:
    """Write an image as 8-bit PGM (P5 by default)"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_pgm(image, binary=binary))
    logger.debug(f"Wrote PGM: path={path}, binary={binary}")
    return path
