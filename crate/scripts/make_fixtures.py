#!/usr/bin/env python3
"""Regenerate the JPEG fixture corpus.

Eight 512x512 grayscale natural images (scikit-image sample data) are encoded
with libjpeg through Pillow at quality factors 10..90. Pillow's default
settings give baseline sequential Huffman coding with the standard tables,
no restart markers and a single component, which is exactly what the
toolkit accepts.

Usage: python3 scripts/make_fixtures.py [out_dir]
"""

import sys
from pathlib import Path

import numpy as np
from PIL import Image
from skimage import color, data

QUALITIES = [10, 20, 30, 40, 50, 60, 70, 80, 90]
SIZE = 512


def to_gray_u8(img):
    if img.ndim == 3:
        img = color.rgb2gray(img[..., :3])
    if img.dtype != np.uint8:
        img = np.clip(np.round(img * 255.0), 0, 255).astype(np.uint8)
    return img


def square(img):
    h, w = img.shape
    s = min(h, w)
    top, left = (h - s) // 2, (w - s) // 2
    im = Image.fromarray(img[top : top + s, left : left + s], mode="L")
    if s != SIZE:
        im = im.resize((SIZE, SIZE), Image.LANCZOS)
    return im


SOURCES = {
    "astronaut": data.astronaut,
    "brick": data.brick,
    "camera": data.camera,
    "chelsea": data.chelsea,
    "coffee": data.coffee,
    "grass": data.grass,
    "moon": data.moon,
    "rocket": data.rocket,
}


def main():
    root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "fixtures"
    corpus = root / "corpus"
    misc = root / "misc"
    corpus.mkdir(parents=True, exist_ok=True)
    misc.mkdir(parents=True, exist_ok=True)

    for name, loader in SOURCES.items():
        im = square(to_gray_u8(loader()))
        for q in QUALITIES:
            im.save(corpus / f"{name}_q{q}.jpg", quality=q)

    # small and degenerate covers
    rng = np.random.default_rng(7)
    Image.fromarray(rng.integers(0, 256, (8, 8), dtype=np.uint8), mode="L").save(misc / "tiny_8x8.jpg", quality=75)
    Image.fromarray(np.full((64, 64), 128, dtype=np.uint8), mode="L").save(misc / "flat_64x64.jpg", quality=75)
    Image.fromarray(np.full((512, 512), 128, dtype=np.uint8), mode="L").save(misc / "flat_512x512.jpg", quality=70)
    Image.fromarray(rng.integers(0, 256, (40, 56), dtype=np.uint8), mode="L").save(misc / "noise_56x40.jpg", quality=95)

    # inputs outside the supported subset
    cam = square(to_gray_u8(data.camera())).resize((64, 64), Image.LANCZOS)
    cam.save(misc / "progressive.jpg", quality=75, progressive=True)
    Image.fromarray(data.astronaut()[:64, :64]).save(misc / "color.jpg", quality=75)
    cam.save(misc / "optimized.jpg", quality=75, optimize=True)


if __name__ == "__main__":
    main()
