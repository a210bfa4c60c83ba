"""One-at-a-time sweep of the open hyperparameters around the ORL profile.

    python benchmarks/sweep_orl.py /root/data/orl [--jobs 4]

Each row changes a single setting of ``orl.cfg`` and reports leave-one-out
accuracy. Two diagnostic rows follow that step outside the pipeline: the same
features classified by the nearest single template (1-NN) instead of the
class-average distance, and raw pixels with the class-average distance.
"""

import argparse

import numpy as np

from domwave.config import PcaPolicy, load_profile
from domwave.harness import leave_one_out
from domwave.imageio import load_dataset
from domwave.recognize import dataset_features


def variants(base):
    yield "orl.cfg as shipped", base
    yield "dwt.family=db4", base.with_(wavelet_family="db4")
    yield "dwt.boundary=symmetric", base.with_(boundary="symmetric")
    for h in (8, 32):
        yield f"bands.height={h}", base.with_(band_height=h)
    for n in (1, 3, 4, 7):
        yield f"bands.n={n}", base.with_(n_bands=n)
    for b in (32, 64):
        yield f"bands.num_bins={b}", base.with_(num_bins=b)
    for w in (8, 32, 92):
        yield f"modules.width={w}", base.with_(module_width=w)
    for t in (10.0, 50.0, 100.0):
        yield f"features.theta={t:g}", base.with_(theta_percent=t)
    for policy in (PcaPolicy("variance", 0.9), PcaPolicy("variance", 0.99), PcaPolicy("fixed", 40)):
        yield f"pca.policy={policy}", base.with_(pca=policy)


def loo_1nn(matrix, labels):
    sq = (matrix**2).sum(1)
    d = sq[:, None] + sq[None, :] - 2 * matrix @ matrix.T
    np.fill_diagonal(d, np.inf)
    return float(np.mean(labels[np.argmin(d, axis=1)] == labels))


def loo_average(matrix, labels):
    hits = 0
    for i in range(len(matrix)):
        keep = np.arange(len(matrix)) != i
        d = ((matrix[keep] - matrix[i]) ** 2).sum(-1)
        classes = np.unique(labels)
        avg = [d[labels[keep] == c].mean() for c in classes]
        hits += classes[int(np.argmin(avg))] == labels[i]
    return hits / len(matrix)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("root")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    ds = load_dataset(args.root)
    base = load_profile("orl")

    print("setting\taccuracy\tcorrect")
    for name, cfg in variants(base):
        rep = leave_one_out(ds, cfg, jobs=args.jobs)
        print(f"{name}\t{100 * rep.accuracy:.2f}%\t{rep.correct}/{rep.total_probes}")

    feats = dataset_features(ds, base)
    labels = np.array([cid for cid in feats for _ in feats[cid]])
    matrix = np.vstack([v.values for cid in feats for v in feats[cid]])
    print(f"diagnostic: orl.cfg features, 1-NN, no PCA\t{100 * loo_1nn(matrix, labels):.2f}%\t-")
    pixels = np.vstack([img.pixels.ravel() for rec in ds.persons for img in rec.poses])
    print(f"diagnostic: raw pixels, class-average distance, no PCA\t{100 * loo_average(pixels, labels):.2f}%\t-")
    print(f"diagnostic: raw pixels, 1-NN, no PCA\t{100 * loo_1nn(pixels, labels):.2f}%\t-")


if __name__ == "__main__":
    main()
