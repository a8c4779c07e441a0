#!/usr/bin/env python3
"""Regenerate tests/fixtures byte for byte.

cameraman_128.pgm: rows 100-227, cols 170-297 of scikit-image's camera().
mnist2000-*: 200 images per digit from mlxtend's mnist_5k.csv.gz (first 200 of
each class in file order), shuffled with numpy RandomState(7).

Needs numpy, scikit-image and the mlxtend wheel (pip download mlxtend).
"""
import argparse
import gzip
import pathlib
import struct
import zipfile

import numpy as np
import skimage.data


def mnist_rows(wheel):
    with zipfile.ZipFile(wheel) as z:
        with z.open("mlxtend/data/data/mnist_5k.csv.gz") as f:
            return np.genfromtxt(gzip.open(f), delimiter=",")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--mlxtend-wheel", required=True, type=pathlib.Path)
    ap.add_argument("--out", type=pathlib.Path, default=pathlib.Path(__file__).resolve().parent.parent / "tests/fixtures")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    crop = skimage.data.camera()[100:228, 170:298].copy()
    (args.out / "cameraman_128.pgm").write_bytes(b"P5\n128 128\n255\n" + crop.tobytes())

    m = mnist_rows(args.mlxtend_wheel)
    labels = m[:, -1].astype(np.uint8)
    images = m[:, :-1].astype(np.uint8)
    idx = np.concatenate([np.where(labels == k)[0][:200] for k in range(10)])
    idx = idx[np.random.RandomState(7).permutation(len(idx))]
    with open(args.out / "mnist2000-images.idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 0x803, len(idx), 28, 28))
        f.write(images[idx].tobytes())
    with open(args.out / "mnist2000-labels.idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 0x801, len(idx)))
        f.write(labels[idx].tobytes())


if __name__ == "__main__":
    main()
