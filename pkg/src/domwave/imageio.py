"""PGM reading/writing and face-dataset loading."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, ImageFormatError

ORL_LAYOUT = "s<class>/<pose>.pgm"
GENERIC_LAYOUT = "<class>/<pose>.pgm"
LAYOUT_ALIASES = {"orl": ORL_LAYOUT, "generic": GENERIC_LAYOUT}


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Grayscale image; ``pixels`` is a float64 array of shape (height, width)."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 2 or px.size == 0:
            raise DataError(f"image must be a non-empty 2D array, got shape {px.shape}")
        px = px.copy()
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __repr__(self):
        return f"GrayImage(w={self.width}, h={self.height})"


@dataclass(frozen=True)
class PersonRecord:
    class_id: int
    label: str
    poses: tuple[GrayImage, ...]
    pose_names: tuple[str, ...] = ()

    @property
    def q(self) -> int:
        return len(self.poses)


@dataclass(frozen=True)
class Dataset:
    name: str
    persons: tuple[PersonRecord, ...]

    @property
    def p(self) -> int:
        return len(self.persons)

    @property
    def geometry(self) -> tuple[int, int]:
        """(width, height) shared by every image."""
        img = self.persons[0].poses[0]
        return img.width, img.height

    def person(self, class_id: int) -> PersonRecord:
        for rec in self.persons:
            if rec.class_id == class_id:
                return rec
        raise KeyError(class_id)

    def __len__(self):
        return sum(rec.q for rec in self.persons)


# ---------------------------------------------------------------------------
# PGM


def _read_header_tokens(data: bytes, path, count: int):
    """Return ``count`` header tokens and the offset just past the last one."""
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        if pos >= n:
            raise ImageFormatError(path, "malformed header: unexpected end of file")
        start = pos
        while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        tokens.append(data[start:pos])
    return tokens, pos


def parse_pgm(data: bytes, path="<bytes>") -> GrayImage:
    """Decode P2 (ASCII) or P5 (binary) PGM bytes with maxval <= 255."""
    if len(data) < 2 or data[:2] not in (b"P2", b"P5"):
        raise ImageFormatError(path, "malformed header: not a P2/P5 PGM file")
    magic = data[:2]
    tokens, pos = _read_header_tokens(data[2:], path, 3)
    pos += 2
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise ImageFormatError(path, f"malformed header: {b' '.join(tokens)!r}") from None
    if width <= 0 or height <= 0:
        raise ImageFormatError(path, f"malformed header: bad dimensions {width}x{height}")
    if maxval <= 0:
        raise ImageFormatError(path, f"malformed header: bad maxval {maxval}")
    if maxval > 255:
        raise ImageFormatError(path, f"maxval {maxval} > 255 is not supported")
    count = width * height

    if magic == b"P5":
        # exactly one whitespace byte separates the header from the raster
        payload = data[pos + 1 : pos + 1 + count]
        if pos >= len(data) or len(payload) < count:
            got = max(0, len(data) - pos - 1)
            raise ImageFormatError(
                path, f"truncated pixel payload: expected {count} bytes, got {got}"
            )
        px = np.frombuffer(payload, dtype=np.uint8)
    else:
        fields = data[pos:].split()
        if len(fields) < count:
            raise ImageFormatError(
                path, f"truncated pixel payload: expected {count} values, got {len(fields)}"
            )
        try:
            px = np.array([int(f) for f in fields[:count]], dtype=np.int64)
        except ValueError:
            raise ImageFormatError(path, "non-integer pixel value in ASCII raster") from None
    if px.min() < 0 or px.max() > maxval:
        raise ImageFormatError(path, f"pixel value outside [0, {maxval}]")
    return GrayImage(px.reshape(height, width).astype(np.float64))


def load_grayscale_image(path) -> GrayImage:
    path = Path(path)
    try:
        data = path.read_bytes()
    except FileNotFoundError:
        raise ImageFormatError(path, "no such file") from None
    except OSError as exc:
        raise ImageFormatError(path, f"unreadable: {exc.strerror or exc}") from None
    return parse_pgm(data, path)


def encode_pgm(img: GrayImage, binary: bool = True) -> bytes:
    px = np.asarray(img.pixels)
    if px.min() < 0 or px.max() > 255 or not np.all(px == np.round(px)):
        raise DataError("PGM output needs integer pixel values in [0, 255]")
    px = px.astype(np.uint8)
    header = f"{'P5' if binary else 'P2'}\n{img.width} {img.height}\n255\n".encode("ascii")
    if binary:
        return header + px.tobytes()
    rows = "\n".join(" ".join(str(v) for v in row) for row in px)
    return header + rows.encode("ascii") + b"\n"


def write_pgm(img: GrayImage, path, binary: bool = True) -> None:
    Path(path).write_bytes(encode_pgm(img, binary))


# ---------------------------------------------------------------------------
# datasets


def natural_key(text: str):
    """Sort key that orders embedded integers numerically (``s2`` < ``s10``)."""
    return [(0, int(tok), "") if tok.isdigit() else (1, 0, tok) for tok in re.split(r"(\d+)", text) if tok]


def _layout_regex(layout: str) -> re.Pattern:
    layout = LAYOUT_ALIASES.get(layout, layout)
    if layout.count("<class>") != 1 or layout.count("<pose>") != 1:
        raise DataError(f"layout {layout!r} needs exactly one <class> and one <pose> placeholder")
    parts = re.split(r"(<class>|<pose>)", layout)
    pattern = ""
    for part in parts:
        if part == "<class>":
            pattern += r"(?P<cls>[^/]+?)"
        elif part == "<pose>":
            pattern += r"(?P<pose>[^/]+?)"
        else:
            pattern += re.escape(part)
    return re.compile(pattern)


def scan_layout(root, layout: str = ORL_LAYOUT) -> dict[str, dict[str, Path]]:
    """Map class token -> pose token -> file for every file matching ``layout``."""
    root = Path(root)
    if not root.is_dir():
        raise DataError(f"{root}: dataset root is not a directory")
    regex = _layout_regex(layout)
    found: dict[str, dict[str, Path]] = {}
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames.sort()
        for fname in filenames:
            full = Path(dirpath) / fname
            rel = full.relative_to(root).as_posix()
            m = regex.fullmatch(rel)
            if m:
                found.setdefault(m["cls"], {})[m["pose"]] = full
    return found


def load_dataset(root, layout: str = ORL_LAYOUT, name: str | None = None) -> Dataset:
    """Load every image under ``root`` that matches the layout template.

    Classes and poses are ordered numeric-ascending on their path tokens and
    class ids are assigned 1..p in that order.
    """
    root = Path(root)
    found = scan_layout(root, layout)
    if not found:
        raise DataError(f"{root}: empty dataset (no files match layout {LAYOUT_ALIASES.get(layout, layout)!r})")
    persons = []
    geometry = None
    for class_id, cls in enumerate(sorted(found, key=natural_key), start=1):
        poses = []
        names = sorted(found[cls], key=natural_key)
        for pose in names:
            path = found[cls][pose]
            img = load_grayscale_image(path)
            if geometry is None:
                geometry = (img.width, img.height, path)
            elif (img.width, img.height) != geometry[:2]:
                raise DataError(
                    f"{path}: dimension mismatch, {img.width}x{img.height} vs "
                    f"{geometry[0]}x{geometry[1]} in {geometry[2]}"
                )
            poses.append(img)
        persons.append(PersonRecord(class_id, cls, tuple(poses), tuple(names)))
    return Dataset(name or root.name, tuple(persons))


def dataset_from_arrays(arrays, name: str = "synthetic", labels=None) -> Dataset:
    """Build a Dataset from nested lists ``arrays[class][pose]`` of 2D arrays."""
    persons = []
    for j, poses in enumerate(arrays, start=1):
        label = labels[j - 1] if labels else str(j)
        imgs = tuple(GrayImage(p) for p in poses)
        if not imgs:
            raise DataError(f"class {label} has no poses")
        persons.append(PersonRecord(j, label, imgs, tuple(str(k) for k in range(1, len(imgs) + 1))))
    if not persons:
        raise DataError("empty dataset")
    shapes = {img.shape for rec in persons for img in rec.poses}
    if len(shapes) != 1:
        raise DataError(f"dimension mismatch across images: {sorted(shapes)}")
    return Dataset(name, tuple(persons))
