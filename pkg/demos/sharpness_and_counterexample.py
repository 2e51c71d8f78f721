"""The 23/27 family approaching its limit, and the scaling ratio that grows without bound."""

from zetaclt.scenarios import (SHARPNESS_LIMIT, CounterexampleConfig, counterexample_path, counterexample_values,
                               run_sharpness_2327)


def main():
    print("nu_{2,g_1} of the standardised sharpness family")
    for eps, _, val, cf, diff, excess in run_sharpness_2327([1.0, 0.1, 0.01, 1e-3, 1e-4, 1e-6]):
        print(f"  eps={eps:<8g} value={val:.10f}  closed form diff={diff:.1e}  above 23/27 by {excess:.2e}")
    print(f"  limit 23/27 = {SHARPNESS_LIMIT:.10f}")

    print("\nscaling ratio at a=0.1, kappa=0.01")
    for t in (1e2, 1e4, 1e6, 1e8):
        v = counterexample_values(CounterexampleConfig(0.1, 0.01, t))
        print(f"  t={t:<8g} ratio={v['ratio']:.6f}  certified={v['ratio_certified']:.6f}  limit={v['limit']:.6f}")

    print("\nsmallest a = kappa on the halving path beating each target")
    for target in (10, 100, 1000):
        cfg = counterexample_path(target)
        print(f"  target {target:5d}: a = kappa = {cfg.a:.3g}, ratio {counterexample_values(cfg)['ratio']:.1f}")


if __name__ == "__main__":
    main()
