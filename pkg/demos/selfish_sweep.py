"""Small selfish-mining sweep: relative payoff vs hash share, Bitcoin vs ratio 1024."""

import sys
from fractions import Fraction

from strongchain.sim import LOW, LatencyModel, MinerSpec, SimConfig, StrategyKind, StrategySpec, run_matrix

horizon = int(sys.argv[1]) if len(sys.argv) > 1 else 4000
alphas = [Fraction(x, 100) for x in (10, 20, 30, 36, 42)]
modes = [(1, 0), (1024, 10)]

cfgs = []
for r, g in modes:
    for a in alphas:
        miners = (MinerSpec(a, StrategySpec(StrategyKind.SELFISH)), MinerSpec(1 - a))
        cfgs.append(SimConfig(miners, ratio=Fraction(r), gamma=Fraction(g), latency=LatencyModel(mean=LOW), horizon=horizon, seed=7, seeds=2,
                              name=f"selfish-{float(a)}-{r}"))

results = run_matrix(cfgs)
print(f"{'alpha':>6} " + " ".join(f"{'ratio ' + str(r):>12}" for r, _ in modes))
for i, a in enumerate(alphas):
    cells = []
    for k in range(len(modes)):
        runs = results[k * len(alphas) + i]
        cells.append(sum(m.reward_share(0) for m in runs) / len(runs))
    # above the diagonal means selfish mining paid off
    print(f"{float(a):6.2f} " + " ".join(f"{c:12.3f}" for c in cells))
