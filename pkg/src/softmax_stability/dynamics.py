"""Picard iteration and continuous-time logit adjustment with error envelopes.

When the tangent contraction factor q of a system is below one, both the
discrete iteration x <- F(x) and the flow dx/dt = F(x) - x converge to the
unique fixed point, with the geometric envelope q^k ||x0 - x*|| and the
exponential envelope exp(-(1-q) t) ||x0 - x*|| respectively. The records
produced here carry those envelopes whenever they apply, together with the
per-step residuals that feed the a-posteriori error bound
||x_k - x*|| <= ||x_{k+1} - x_k|| / (1 - q).

Trajectories are computed sequentially; independent trajectories may run
concurrently since everything here is pure.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .certificates import certify_contraction
from .geometry import ProductPoint
from .system import AffineLogitSystem, response_batch, response_values

_DRIFT_RENORM_ATOL = 1e-12


@dataclass(frozen=True)
class TrajectoryRecord:
    """Iterates or ODE samples with residuals and optional error envelopes.

    samples holds (step index or time, point) pairs; residuals[k] is the
    Euclidean distance between samples k and k+1. envelope, when present,
    aligns with samples. certified says whether the stopping rule carried a
    contraction guarantee (q < 1); drift, for ODE runs, records the simplex
    feasibility violation measured before any renormalization at each step.
    """

    mode: str
    samples: tuple
    residuals: np.ndarray
    envelope: np.ndarray | None
    converged: bool
    fixed_point: ProductPoint | None
    q: float
    certified: bool
    drift: np.ndarray | None = None


def _check_start(system: AffineLogitSystem, x0: ProductPoint) -> np.ndarray:
    if x0.dims != system.block_dims:
        raise ValueError(f"start dims {x0.dims} do not match system dims {system.block_dims}")
    return x0.flat()


def picard(
    system: AffineLogitSystem,
    x0: ProductPoint,
    max_iter: int = 10_000,
    tol: float = 1e-10,
) -> TrajectoryRecord:
    """Iterate x <- F(x) until the error is certifiably below tol.

    With contraction factor q < 1 the loop stops once the step residual is
    below tol * (1 - q), which by the a-posteriori bound leaves the iterate
    within tol of the fixed point. With q >= 1 there is no guarantee; the
    loop then stops on a raw residual below tol and the record is flagged
    uncertified. Exhausting max_iter returns converged=False, never raises.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    x = _check_start(system, x0)
    q = certify_contraction(system).q_new.value
    certified = q < 1.0
    threshold = tol * (1.0 - q) if certified else tol

    dims = system.block_dims
    traj = [x]
    residuals = []
    converged = False
    for _ in range(max_iter):
        x_next = response_values(system, x)
        r = float(np.linalg.norm(x_next - x))
        traj.append(x_next)
        residuals.append(r)
        x = x_next
        if r <= threshold:
            converged = True
            break

    samples = tuple((float(k), ProductPoint.from_flat(v, dims)) for k, v in enumerate(traj))
    fixed_point = samples[-1][1] if converged else None
    envelope = None
    if converged and certified:
        d0 = float(np.linalg.norm(traj[0] - traj[-1]))
        envelope = d0 * np.power(q, np.arange(len(traj), dtype=float))
    return TrajectoryRecord(
        mode="picard",
        samples=samples,
        residuals=np.asarray(residuals),
        envelope=envelope,
        converged=converged,
        fixed_point=fixed_point,
        q=q,
        certified=certified,
    )


def _feasibility_violation(x: np.ndarray, slices) -> float:
    worst = 0.0
    for sl in slices:
        blk = x[sl]
        worst = max(worst, abs(float(np.sum(blk)) - 1.0), max(0.0, -float(np.min(blk))))
    return worst


def _renormalize(x: np.ndarray, slices) -> np.ndarray:
    out = x.copy()
    for sl in slices:
        blk = np.clip(out[sl], 0.0, None)
        out[sl] = blk / np.sum(blk)
    return out


def logit_ode(
    system: AffineLogitSystem,
    x0: ProductPoint,
    t_end: float = 50.0,
    dt: float = 0.01,
    equilibrium_tol: float = 1e-8,
) -> TrajectoryRecord:
    """Integrate dx/dt = F(x) - x by classical fixed-step 4th-order steps.

    The vector field is smooth and globally Lipschitz on the compact product
    simplex, so a fixed step suffices at desk scale. Linear feasibility is
    preserved by the integrator up to roundoff; after each step the simplex
    violation is measured, recorded, and repaired by clamp-and-rescale only
    if it exceeds 1e-12. The converged flag reports whether the final state
    is an equilibrium to within equilibrium_tol in the vector-field norm.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if dt >= 1.0:
        raise ValueError(f"dt = {dt} is too large for the explicit integrator (need dt < 1)")
    if t_end <= 0.0:
        raise ValueError("t_end must be positive")
    x = _check_start(system, x0)
    slices = system.block_slices
    dims = system.block_dims
    q = certify_contraction(system).q_new.value
    certified = q < 1.0

    def f(y: np.ndarray) -> np.ndarray:
        return response_values(system, y) - y

    n_steps = int(round(t_end / dt))
    traj = [x]
    times = [0.0]
    residuals = []
    drift = [0.0]
    for k in range(n_steps):
        k1 = f(x)
        k2 = f(x + 0.5 * dt * k1)
        k3 = f(x + 0.5 * dt * k2)
        k4 = f(x + dt * k3)
        x_next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        v = _feasibility_violation(x_next, slices)
        if v > _DRIFT_RENORM_ATOL:
            x_next = _renormalize(x_next, slices)
        drift.append(v)
        residuals.append(float(np.linalg.norm(x_next - x)))
        x = x_next
        traj.append(x)
        times.append((k + 1) * dt)

    converged = float(np.linalg.norm(f(x))) <= equilibrium_tol
    fixed_point = None
    envelope = None
    if certified:
        ref = picard(system, x0, max_iter=100_000, tol=1e-13)
        if ref.converged:
            fixed_point = ref.fixed_point
            d0 = float(np.linalg.norm(traj[0] - fixed_point.flat()))
            envelope = d0 * np.exp(-(1.0 - q) * np.asarray(times))
    if fixed_point is None and converged:
        fixed_point = ProductPoint.from_flat(x, dims)

    samples = tuple((t, ProductPoint.from_flat(v, dims)) for t, v in zip(times, traj))
    return TrajectoryRecord(
        mode="ode",
        samples=samples,
        residuals=np.asarray(residuals),
        envelope=envelope,
        converged=converged,
        fixed_point=fixed_point,
        q=q,
        certified=certified,
        drift=np.asarray(drift),
    )


def multi_start_collapse(
    system: AffineLogitSystem,
    starts,
    max_iter: int = 10_000,
    tol: float = 1e-10,
) -> np.ndarray:
    """Lockstep Picard iteration from several starts; max pairwise distances.

    Returns the series of maximum pairwise Euclidean distances among the
    iterates, one entry per step including the initial configuration. Under
    a contraction every pair contracts by q per step, so the series decays
    at least geometrically.
    """
    starts = list(starts)
    if len(starts) < 2:
        raise ValueError("multi-start collapse needs at least 2 starts")
    X = np.stack([_check_start(system, s) for s in starts])
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    q = certify_contraction(system).q_new.value
    threshold = tol * (1.0 - q) if q < 1.0 else tol

    def diameter(A: np.ndarray) -> float:
        diff = A[:, None, :] - A[None, :, :]
        return float(np.sqrt(np.max(np.sum(diff * diff, axis=2))))

    series = [diameter(X)]
    for _ in range(max_iter):
        X_next = response_batch(system, X)
        step = float(np.max(np.linalg.norm(X_next - X, axis=1)))
        X = X_next
        series.append(diameter(X))
        if step <= threshold:
            break
    return np.asarray(series)


def write_trajectory_csv(record: TrajectoryRecord, path) -> None:
    """Serialize a record: columns step_or_time, x components, residual, envelope.

    Floats are written with 17 significant digits (round-trip exact); the
    residual cell of the first sample and absent envelopes are left empty.
    """
    n = record.samples[0][1].n_total
    header = ["step_or_time"] + [f"x{i}" for i in range(n)] + ["residual", "envelope"]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for k, (t, point) in enumerate(record.samples):
            row = [format(t, ".17g")]
            row += [format(v, ".17g") for v in point.flat()]
            row.append(format(record.residuals[k - 1], ".17g") if k >= 1 else "")
            if record.envelope is not None:
                row.append(format(record.envelope[k], ".17g"))
            else:
                row.append("")
            writer.writerow(row)
