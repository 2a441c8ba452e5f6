"""Convert the npm `mnist` package digit files into gzipped IDX train/test files."""
import argparse
import gzip
import json
import pathlib
import struct

import numpy as np


def load_digits(src):
    images, labels = [], []
    for digit in range(10):
        data = json.loads((src / f"{digit}.json").read_text())["data"]
        arr = np.rint(np.asarray(data, dtype=np.float64) * 255.0).clip(0, 255).astype(np.uint8)
        arr = arr.reshape(-1, 784)
        images.append(arr)
        labels.append(np.full(arr.shape[0], digit, dtype=np.uint8))
    return np.concatenate(images), np.concatenate(labels)


def write_idx(path, images, labels):
    with gzip.GzipFile(path / "images.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">IIII", 2051, images.shape[0], 28, 28))
        f.write(images.tobytes())
    with gzip.GzipFile(path / "labels.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">II", 2049, labels.shape[0]))
        f.write(labels.tobytes())


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--src", default="/tmp/npmdl/package/src/digits")
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data" / "mnist"))
    ap.add_argument("--train", type=int, default=8000)
    ap.add_argument("--seed", type=int, default=20240101)
    args = ap.parse_args()

    images, labels = load_digits(pathlib.Path(args.src))
    order = np.random.default_rng(args.seed).permutation(images.shape[0])
    images, labels = images[order], labels[order]
    out = pathlib.Path(args.out)
    for name, sl in (("train", slice(0, args.train)), ("test", slice(args.train, None))):
        d = out / name
        d.mkdir(parents=True, exist_ok=True)
        write_idx(d, images[sl], labels[sl])
        print(name, images[sl].shape[0], np.bincount(labels[sl], minlength=10).tolist())


if __name__ == "__main__":
    main()
