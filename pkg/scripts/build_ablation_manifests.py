"""Emit the uniform and grid adapter-pruning manifests with parameter costs.

Usage: python scripts/build_ablation_manifests.py [--out-dir manifests]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from adapterqa.ablation import (  # noqa: E402
    cost_plan,
    grid_ablation_plan,
    uniform_ablation_plan,
    write_manifest,
)
from adapterqa.adapters import REFERENCE_DIMS  # noqa: E402


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="manifests")
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    for name, plan in (
        ("uniform", uniform_ablation_plan(REFERENCE_DIMS)),
        ("grid", grid_ablation_plan(REFERENCE_DIMS)),
    ):
        rows = cost_plan(plan, REFERENCE_DIMS)
        path = out_dir / f"{name}_plan.jsonl"
        write_manifest(rows, path)
        budgets = [row["percent"] for row in rows]
        print(f"{path}: {len(rows)} configs, trainable {min(budgets)}%..{max(budgets)}%")


if __name__ == "__main__":
    main()
