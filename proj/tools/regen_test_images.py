#!/usr/bin/env python3
"""Regenerate data/*.pgm from scikit-image. Run from the repo root."""
import numpy as np
import skimage.data as skdata


def write_pgm(path, img):
    img = np.asarray(img)
    assert img.dtype == np.uint8 and img.shape == (512, 512)
    with open(path, 'wb') as f:
        f.write(b'P5\n512 512\n255\n')
        f.write(img.tobytes())


def main():
    write_pgm('data/camera.pgm', skdata.camera())
    rgb = skdata.astronaut().astype(float)
    luma = rgb[:, :, 0] * 0.299 + rgb[:, :, 1] * 0.587 + rgb[:, :, 2] * 0.114
    write_pgm('data/astronaut.pgm', np.clip(np.round(luma), 0, 255).astype(np.uint8))
    write_pgm('data/gravel.pgm', skdata.gravel())


if __name__ == '__main__':
    main()
