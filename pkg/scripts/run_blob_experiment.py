#!/usr/bin/env python3
"""Desk-scale benchmark: cluster synthetic Gaussian blobs over several seeds
and report per-seed and aggregate accuracy/NMI."""

import argparse

import numpy as np

from dcidc.autoencoder import mirror_dims
from dcidc.data import normalize, synth_blobs
from dcidc.training import TrainConfig, train


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--dim", type=int, default=10)
    ap.add_argument("--n-per-cluster", type=int, default=200)
    ap.add_argument("--separation", type=float, default=6.0)
    ap.add_argument("--noise-sigma", type=float, default=1.0)
    ap.add_argument("--dims", default="10,6,3",
                    help="encoder widths incl. input; decoder mirrors")
    ap.add_argument("--lambda1", type=float, default=0.3)
    ap.add_argument("--epochs", type=int, default=300)
    args = ap.parse_args()

    dims = mirror_dims([int(t) for t in args.dims.split(",")])
    accs, nmis = [], []
    for seed in range(args.seeds):
        ds = normalize(synth_blobs(
            args.n_per_cluster, args.k, args.dim, args.separation,
            args.noise_sigma, seed,
        ))
        config = TrainConfig(k=args.k, lambda1=args.lambda1,
                             max_epochs=args.epochs, seed=seed)
        _, _, reports = train(ds.features, config, dims, labels=ds.labels)
        final = reports[-1]
        accs.append(final.accuracy)
        nmis.append(final.nmi)
        print(f"seed={seed} epochs={final.epoch} j_total={final.j_total:.4f} "
              f"accuracy={final.accuracy:.4f} nmi={final.nmi:.4f}")
    print(f"accuracy {np.mean(accs):.4f} +/- {np.std(accs):.4f}   "
          f"nmi {np.mean(nmis):.4f} +/- {np.std(nmis):.4f}")


if __name__ == "__main__":
    main()
