#!/usr/bin/env python3
"""Builds Fashion-MNIST IDX files from the npm package `fashion-mnist`.

The package stores 7000 images per class (class 0 also holds two empty
rows, which are dropped) without the original train/test split. Per class, the first 6000 go to train and the next 1000 to test,
interleaved round-robin across classes, so the published sizes hold.

usage: fashion_from_npm.py <package_dir> <dest_dir>
"""
import json
import struct
import sys
from pathlib import Path

TRAIN_PER_CLASS = 6000
TEST_PER_CLASS = 1000


def write_images(path, images):
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x803, len(images), 28, 28))
        for img in images:
            f.write(bytes(img))


def write_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x801, len(labels)))
        f.write(bytes(labels))


def interleave(per_class, start, count):
    images, labels = [], []
    for i in range(start, start + count):
        for c, rows in enumerate(per_class):
            images.append(rows[i])
            labels.append(c)
    return images, labels


def main():
    src, dest = Path(sys.argv[1]), Path(sys.argv[2])
    per_class = []
    for c in range(10):
        rows = json.loads((src / "src" / "clothes" / f"{c}.json").read_text())["data"]
        rows = [r for r in rows if r]
        if len(rows) < TRAIN_PER_CLASS + TEST_PER_CLASS or any(len(r) != 784 for r in rows):
            sys.exit(f"class {c}: unexpected shape")
        per_class.append(rows)
    dest.mkdir(parents=True, exist_ok=True)
    train = interleave(per_class, 0, TRAIN_PER_CLASS)
    test = interleave(per_class, TRAIN_PER_CLASS, TEST_PER_CLASS)
    write_images(dest / "train-images-idx3-ubyte", train[0])
    write_labels(dest / "train-labels-idx1-ubyte", train[1])
    write_images(dest / "t10k-images-idx3-ubyte", test[0])
    write_labels(dest / "t10k-labels-idx1-ubyte", test[1])


if __name__ == "__main__":
    main()
