#!/usr/bin/env python3
"""Sweep the cluster-constraint weight on the blob benchmark and print the
accuracy/NMI table as CSV."""

import argparse

from dcidc.autoencoder import mirror_dims
from dcidc.data import normalize, synth_blobs
from dcidc.training import TrainConfig, lambda1_sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", default="0,0.1,0.2,0.3,0.5,0.7,1.0")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--dim", type=int, default=10)
    ap.add_argument("--n-per-cluster", type=int, default=200)
    ap.add_argument("--separation", type=float, default=6.0)
    ap.add_argument("--dims", default="10,6,3")
    ap.add_argument("--epochs", type=int, default=300)
    args = ap.parse_args()

    ds = normalize(synth_blobs(args.n_per_cluster, args.k, args.dim,
                               args.separation, 1.0, args.seed))
    config = TrainConfig(k=args.k, max_epochs=args.epochs, seed=args.seed)
    dims = mirror_dims([int(t) for t in args.dims.split(",")])
    grid = [float(t) for t in args.grid.split(",")]
    print("lambda1,accuracy,nmi")
    for row in lambda1_sweep(ds.features, config, dims, grid, ds.labels):
        print(f"{row.lambda1:g},{row.accuracy:.6f},{row.nmi:.6f}")


if __name__ == "__main__":
    main()
