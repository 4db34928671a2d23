"""Predict iteration counts from the eigenvalue gap, then measure them.

Away from transitions the iteration contracts toward its fixed point by the
factor 1 - lambda0 per step, where lambda0 is the smallest positive
eigenvalue of the residual Jacobian. The asymptotic iteration count for
stopping accuracy eps is therefore (-log eps) / (-log(1 - lambda0)). This
script warm-starts solves from a higher-beta solution (one step of reverse
annealing) and shows the measured count per unit of -log eps converging to
that prediction as eps shrinks.
"""

from rdspectral import binary_hamming, planar_four_point, rate_study

for name, problem, beta, anchor in [
    ("skewed binary Hamming", binary_hamming(0.8), 2.5, 8.0),
    ("planar four-point", planar_four_point(), 30.0, 100.0),
]:
    points = rate_study(
        problem, beta, epsilons=[1e-4, 1e-6, 1e-8, 1e-10, 1e-12],
        anchor_beta=anchor,
    )
    print(f"\n{name} at beta={beta} (lambda_max = {points[0].lambda_max:.4f}, "
          f"predicted rate {points[0].predicted_rate:.4f}):")
    print(f"{'eps':>8} {'iters':>7} {'measured':>10} {'pred':>8} {'rel err':>8}")
    for p in points:
        rel = abs(p.measured_rate - p.predicted_rate) / p.predicted_rate
        print(f"{p.epsilon:8.0e} {p.iterations:7d} {p.measured_rate:10.4f} "
              f"{p.predicted_rate:8.4f} {rel:8.1%}")
