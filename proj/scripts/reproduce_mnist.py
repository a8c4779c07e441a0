#!/usr/bin/env python3
"""Full-scale MNIST semi-supervised runs (70000 points, train and test merged).

Runs the wecure CLI for every method and label count with 10 seeded repeats and
prints mean accuracy per cell. Expect several hours on one core: the 70000-point
kNN graph alone takes a while, and it is rebuilt per invocation.

Input: a directory with the four standard MNIST IDX files (optionally .gz).
"""
import argparse
import gzip
import json
import pathlib
import struct
import subprocess

LABEL_COUNTS = [35, 50, 70, 100, 700]
METHODS = ["wnll", "cure", "wecure"]


def read_idx(path):
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rb") as f:
        data = f.read()
    ndim = data[3]
    dims = struct.unpack(">" + "I" * ndim, data[4 : 4 + 4 * ndim])
    return dims, data[4 + 4 * ndim :]


def find(root, stem):
    for name in (stem, stem + ".gz"):
        if (root / name).exists():
            return root / name
    raise SystemExit(f"missing {stem} in {root}")


def merge(root, work):
    images, labels = work / "mnist70k-images.idx3-ubyte", work / "mnist70k-labels.idx1-ubyte"
    if images.exists() and labels.exists():
        return images, labels
    parts = [("train-images-idx3-ubyte", "train-labels-idx1-ubyte"), ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte")]
    pix, lab, count = b"", b"", 0
    for img_name, lab_name in parts:
        dims, data = read_idx(find(root, img_name))
        pix += data
        count += dims[0]
        lab += read_idx(find(root, lab_name))[1]
    images.write_bytes(struct.pack(">IIII", 0x803, count, 28, 28) + pix)
    labels.write_bytes(struct.pack(">II", 0x801, count) + lab)
    return images, labels


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("mnist_dir", type=pathlib.Path)
    ap.add_argument("--wecure", default="build/tools/wecure")
    ap.add_argument("--work", type=pathlib.Path, default=pathlib.Path("mnist-runs"))
    ap.add_argument("--repeats", type=int, default=10)
    ap.add_argument("--lambda", dest="lam", default="1.0")
    args = ap.parse_args()
    args.work.mkdir(parents=True, exist_ok=True)
    images, labels = merge(args.mnist_dir, args.work)

    table = {}
    for method in METHODS:
        for count in LABEL_COUNTS:
            out = subprocess.run(
                [args.wecure, "ssl", "--data", str(images), "--labels", str(labels), "--labels-per-run", str(count),
                 "--repeats", str(args.repeats), "--seed", "0", "--method", method, "--lambda", args.lam,
                 "--report", str(args.work / "mnist.csv")],
                check=True, capture_output=True, text=True).stdout
            summary = json.loads(out)
            table[method, count] = summary["mean_accuracy"]
            print(f"{method:7s} {count:4d} labels  mean {100 * summary['mean_accuracy']:.2f}%  "
                  f"spread {100 * summary['spread']:.2f} pp", flush=True)

    print("\nmethod  " + "".join(f"{c:>10d}" for c in LABEL_COUNTS))
    for method in METHODS:
        print(f"{method:7s} " + "".join(f"{100 * table[method, c]:10.2f}" for c in LABEL_COUNTS))


if __name__ == "__main__":
    main()
