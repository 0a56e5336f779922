"""Passive Langevin checks plus the <v^2>(t) relaxation curve as CSV.

    python3 scripts/physics_validation.py --out results/passive
"""
import argparse
from pathlib import Path

from crowdflow.dynamics.passive import PassiveLangevinConfig, physics_suite, simulate_passive


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/passive")
    ap.add_argument("--gamma", type=float, default=1.0)
    ap.add_argument("--B", type=float, default=0.5)
    args = ap.parse_args()

    for c in physics_suite():
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for scheme in ("implicit", "explicit"):
        cfg = PassiveLangevinConfig(gamma=args.gamma, noise_strength_B=args.B, steps=2000,
                                    dt=1e-2, n_particles=2000, scheme=scheme)
        res = simulate_passive(cfg)
        res.to_csv(out / f"msv_{scheme}.csv")
        tail = res.msv[-500:].mean()
        print(f"{scheme}: late <v^2> {tail:.4f} vs B/(gamma m) {cfg.equilibrium_msv:.4f}")


if __name__ == "__main__":
    main()
