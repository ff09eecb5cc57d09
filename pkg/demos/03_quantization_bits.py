"""How many phase-quantization bits are enough?

Optimizes the same system with continuous phases and with B-bit grids,
then reports each grid's share of the continuous result.  Also shows
what plain nearest-grid quantization of the continuous solution loses
compared to optimizing directly on the grid.
"""
from rispair import (
    ContinuousPhases,
    DiscretePhases,
    GaConfig,
    approx_rates,
    default_system,
    ga_optimize,
    quantize,
    substream,
)

params = default_system(K=6, L=32, snr_db=20.0)
ga = GaConfig(stall_generations=400)

continuous = ga_optimize(params, ga, ContinuousPhases(), substream(1))
print(f"continuous phases: sum rate {continuous.best_sum_rate:.4f} bits/s/Hz\n")

print("bits   grid-optimized   share   quantized-continuous")
for bits in (1, 2, 3, 4):
    on_grid = ga_optimize(params, ga, DiscretePhases(bits), substream(2, bits))
    rounded = approx_rates(params, quantize(continuous.best_theta, bits))
    print(
        f"  {bits}    {on_grid.best_sum_rate:13.4f}   {on_grid.best_sum_rate / continuous.best_sum_rate:5.1%}"
        f"   {rounded.sum:13.4f}"
    )
print("\nthree bits already recover most of the continuous-phase sum rate.")
