"""Norm-preserving transfer through a lossy intermediate level.

The gain-loss ladder keeps its eigenvalues imaginary, so the
zero-eigenvalue path is the only norm-neutral route from level 1 to
level 3. The transport-only drive completes the passage with final P3
near 1 and the norm pinned at 1; the bare drive both misses the target
and drifts off unit norm.
"""
import argparse
import pathlib

import numpy as np

from nhcd import ExperimentConfig, run_experiment


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="demo-out", help="output directory")
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    for drive in ("cd-only", "bare"):
        result = run_experiment(ExperimentConfig(
            case="antipseudo", drive=drive, initial=("eigenstate", 0),
            out_dir=str(out), label=f"ladder-{drive}"))
        trajectory = result.trajectory
        final_p3 = trajectory.populations[-1, 2]
        norm_dev = np.max(np.abs(trajectory.norm - 1.0))
        print(f"{drive:8s} final P3 {final_p3:.6f}  "
              f"norm deviation {norm_dev:.2e}")


if __name__ == "__main__":
    main()
