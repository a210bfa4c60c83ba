"""Convert the Yale face database (GIF files) into a PGM tree the loader reads.

    pip install Pillow            # or: pip install -e .[convert]
    python scripts/convert_yale.py yalefaces/ /root/data/yale

The distribution ships files named ``subject01.centerlight``,
``subject01.glasses``, ... (GIF data, sometimes with a ``.gif`` suffix). The
output layout is ``<out>/subjectNN/<pose>.pgm`` with poses numbered 1..11 in
the fixed expression order below, which is the ``<class>/<pose>.pgm`` layout.
Pixels are converted to 8-bit grayscale and written unchanged otherwise, with
no resizing or cropping.
"""

import argparse
import re
import sys
from pathlib import Path

from PIL import Image

EXPRESSIONS = (
    "centerlight", "glasses", "happy", "leftlight", "noglasses", "normal",
    "rightlight", "sad", "sleepy", "surprised", "wink",
)
NAME = re.compile(r"(subject\d+)\.([a-z]+)(?:\.gif)?", re.IGNORECASE)


def write_pgm(img: Image.Image, path: Path) -> None:
    gray = img.convert("L")
    w, h = gray.size
    path.write_bytes(f"P5\n{w} {h}\n255\n".encode("ascii") + gray.tobytes())


def convert(src: Path, dst: Path) -> dict:
    found: dict[str, dict[str, Path]] = {}
    for f in sorted(src.iterdir()):
        m = NAME.fullmatch(f.name)
        if m and m.group(2).lower() in EXPRESSIONS:
            found.setdefault(m.group(1).lower(), {})[m.group(2).lower()] = f
    if not found:
        raise SystemExit(f"{src}: no subjectNN.<expression> files found")
    for subject, files in sorted(found.items()):
        missing = [e for e in EXPRESSIONS if e not in files]
        if missing:
            raise SystemExit(f"{subject}: missing expressions {missing}")
        out = dst / subject
        out.mkdir(parents=True, exist_ok=True)
        for pose, expression in enumerate(EXPRESSIONS, start=1):
            with Image.open(files[expression]) as img:
                write_pgm(img, out / f"{pose}.pgm")
    return found


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("src", type=Path, help="directory holding the yalefaces files")
    ap.add_argument("dst", type=Path, help="output root")
    args = ap.parse_args(argv)
    found = convert(args.src, args.dst)
    print(f"wrote {len(found)} subjects x {len(EXPRESSIONS)} poses to {args.dst}", file=sys.stderr)


if __name__ == "__main__":
    main()
