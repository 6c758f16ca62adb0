"""Monte Carlo over occupancy and detuning disorder.

Realization ``index`` of an ensemble is a pure function of
(master_seed, index), so results are independent of scheduling: serial
runs and process pools of any size produce bit-identical statistics.
Failed realizations are recorded with their index and skipped rather
than aborting the whole run.

All observable kernels live at module level so they pickle cleanly into
worker processes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .correlations import g2_curve
from .dynamics import excited_population
from .model import (CavityGeometry, FillingMode, LatticeSpec, PhysicalParams,
                    build_cavity)
from .sampling import realization_rng, sample_realization
from .solver import optical_depth, scatter, spectrum_scan

DEFAULT_SAMPLES = 200


@dataclass(frozen=True)
class EnsembleStats:
    mean: np.ndarray
    stderr: np.ndarray
    count: int
    master_seed: int
    failures: list = field(default_factory=list)


def run_ensemble(kernel, n_samples, master_seed, workers=1, args=(),
                 progress=None) -> EnsembleStats:
    """Average ``kernel(index, master_seed, *args)`` over realizations.

    The merge is in index order regardless of completion order.  A
    kernel exception marks that realization failed and the run carries
    on; the run only raises if every realization failed.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    outcomes = [None] * n_samples
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(kernel, i, master_seed, *args): i
                       for i in range(n_samples)}
            done = 0
            for fut, i in futures.items():
                try:
                    outcomes[i] = (True, fut.result())
                except Exception as exc:
                    outcomes[i] = (False, "%s: %s" % (type(exc).__name__, exc))
                done += 1
                if progress is not None:
                    progress(done, n_samples)
    else:
        for i in range(n_samples):
            try:
                outcomes[i] = (True, kernel(i, master_seed, *args))
            except Exception as exc:
                outcomes[i] = (False, "%s: %s" % (type(exc).__name__, exc))
            if progress is not None:
                progress(i + 1, n_samples)
    values = [np.asarray(v, dtype=float) for ok, v in outcomes if ok]
    failures = [(i, outcomes[i][1]) for i in range(n_samples)
                if not outcomes[i][0]]
    if not values:
        raise RuntimeError("all %d realizations failed; first failure: %s"
                           % (n_samples, failures[0][1]))
    stacked = np.stack(values)
    mean = stacked.mean(axis=0)
    if len(values) > 1:
        stderr = stacked.std(axis=0, ddof=1) / math.sqrt(len(values))
    else:
        stderr = np.zeros_like(mean)
    return EnsembleStats(mean, stderr, len(values), master_seed, failures)


# ----------------------------------------------------------------------
# picklable observable kernels

def scatter_kernel(index, master_seed, lattice, params):
    real = sample_realization(lattice, params.sigma_ih, master_seed, index)
    res = scatter(real, params)
    return np.array([res.T, res.R])


def spectrum_kernel(index, master_seed, lattice, params, deltas):
    real = sample_realization(lattice, params.sigma_ih, master_seed, index)
    scan = spectrum_scan(real, params, deltas)
    return np.stack([scan.T, scan.R])


def kd_kernel(index, master_seed, lattice, params, thetas):
    real = sample_realization(lattice, params.sigma_ih, master_seed, index)
    out = np.empty((2, len(thetas)))
    for i, th in enumerate(thetas):
        res = scatter(real, replace(params, theta=float(th)))
        out[0, i] = res.T
        out[1, i] = res.R
    return out


def rabi_kernel(index, master_seed, geom, filling, mode, params, times):
    rng = realization_rng(master_seed, index)
    chain = build_cavity(geom, filling, rng, mode)
    return excited_population(chain, params, times).populations


def g2_kernel(index, master_seed, lattice, params, taus, port):
    real = sample_realization(lattice, params.sigma_ih, master_seed, index)
    res = g2_curve(real, params, taus, port)
    if res.divergent:
        raise RuntimeError("divergent g2 (zero %s baseline)" % port)
    return res.values


def g2_raw_kernel(index, master_seed, lattice, params, taus, port):
    real = sample_realization(lattice, params.sigma_ih, master_seed, index)
    res = g2_curve(real, params, taus, port)
    if res.divergent:
        raise RuntimeError("divergent g2 (zero %s baseline)" % port)
    weight = abs(res.base_amp) ** 4
    return np.stack([res.values * weight, np.full_like(res.values, weight)])


# ----------------------------------------------------------------------
# ensemble drivers

@dataclass(frozen=True)
class SpectrumEnsemble:
    deltas: np.ndarray
    T_mean: np.ndarray
    T_se: np.ndarray
    R_mean: np.ndarray
    R_se: np.ndarray
    count: int
    master_seed: int
    failures: list

    @property
    def sum_mean(self) -> np.ndarray:
        return self.T_mean + self.R_mean


def spectrum_ensemble(lattice: LatticeSpec, params: PhysicalParams, deltas,
                      n_samples=DEFAULT_SAMPLES, master_seed=0, workers=1,
                      progress=None) -> SpectrumEnsemble:
    deltas = np.asarray(deltas, dtype=float)
    stats = run_ensemble(spectrum_kernel, n_samples, master_seed, workers,
                         args=(lattice, params, deltas), progress=progress)
    return SpectrumEnsemble(deltas, stats.mean[0], stats.stderr[0],
                            stats.mean[1], stats.stderr[1],
                            stats.count, master_seed, stats.failures)


@dataclass(frozen=True)
class PointEnsemble:
    """Mean T and R at a single drive detuning, plus the derived depth."""

    T_mean: float
    T_se: float
    R_mean: float
    R_se: float
    count: int
    failures: list

    @property
    def depth(self) -> float:
        return optical_depth(self.T_mean)


def point_ensemble(lattice: LatticeSpec, params: PhysicalParams,
                   n_samples=DEFAULT_SAMPLES, master_seed=0, workers=1,
                   progress=None) -> PointEnsemble:
    stats = run_ensemble(scatter_kernel, n_samples, master_seed, workers,
                         args=(lattice, params), progress=progress)
    return PointEnsemble(float(stats.mean[0]), float(stats.stderr[0]),
                         float(stats.mean[1]), float(stats.stderr[1]),
                         stats.count, stats.failures)


@dataclass(frozen=True)
class KdScan:
    thetas: np.ndarray
    depth: np.ndarray
    T_mean: np.ndarray
    T_se: np.ndarray
    R_mean: np.ndarray
    R_se: np.ndarray
    count: int
    failures: list


def kd_scan(lattice: LatticeSpec, params: PhysicalParams, thetas,
            n_samples=DEFAULT_SAMPLES, master_seed=0, workers=1,
            progress=None) -> KdScan:
    """Ensemble T, R, and optical depth as a function of the lattice phase."""
    thetas = np.asarray(thetas, dtype=float)
    stats = run_ensemble(kd_kernel, n_samples, master_seed, workers,
                         args=(lattice, params, thetas), progress=progress)
    depth = np.array([optical_depth(t) for t in stats.mean[0]])
    return KdScan(thetas, depth, stats.mean[0], stats.stderr[0],
                  stats.mean[1], stats.stderr[1], stats.count, stats.failures)


@dataclass(frozen=True)
class FillingScan:
    fillings: np.ndarray
    depth: np.ndarray
    T_mean: np.ndarray
    T_se: np.ndarray
    R_mean: np.ndarray
    R_se: np.ndarray
    count: int
    failures: list


def filling_scan(n_sites, params: PhysicalParams, fillings,
                 mode=FillingMode.FIXED_COUNT, n_samples=DEFAULT_SAMPLES,
                 master_seed=0, workers=1, progress=None) -> FillingScan:
    """Optical depth versus filling fraction at fixed lattice phase.

    The depth is -ln of the ensemble-averaged transmission, so the
    saturation of the curve at strong opacity reflects the averaged
    observable, not a per-realization quantity.
    """
    fillings = np.asarray(fillings, dtype=float)
    cols = {k: np.empty(fillings.size) for k in
            ("depth", "T_mean", "T_se", "R_mean", "R_se")}
    failures = []
    count = 0
    for i, p in enumerate(fillings):
        lattice = LatticeSpec(n_sites, float(p), mode)
        pt = point_ensemble(lattice, params, n_samples, master_seed, workers,
                            progress=progress)
        cols["depth"][i] = pt.depth
        cols["T_mean"][i] = pt.T_mean
        cols["T_se"][i] = pt.T_se
        cols["R_mean"][i] = pt.R_mean
        cols["R_se"][i] = pt.R_se
        failures.extend((i, msg) for _, msg in pt.failures)
        count = pt.count
    return FillingScan(fillings, cols["depth"], cols["T_mean"], cols["T_se"],
                       cols["R_mean"], cols["R_se"], count, failures)


@dataclass(frozen=True)
class RabiEnsemble:
    times: np.ndarray
    pe_mean: np.ndarray
    pe_se: np.ndarray
    count: int
    failures: list


def rabi_ensemble(geom: CavityGeometry, filling, params: PhysicalParams,
                  times, mode=FillingMode.FIXED_COUNT,
                  n_samples=DEFAULT_SAMPLES, master_seed=0, workers=1,
                  progress=None) -> RabiEnsemble:
    times = np.asarray(times, dtype=float)
    stats = run_ensemble(rabi_kernel, n_samples, master_seed, workers,
                         args=(geom, filling, mode, params, times),
                         progress=progress)
    return RabiEnsemble(times, stats.mean, stats.stderr, stats.count,
                        stats.failures)


@dataclass(frozen=True)
class G2Ensemble:
    taus: np.ndarray
    g2: np.ndarray
    g2_se: np.ndarray
    port: str
    average: str
    count: int
    failures: list


def g2_ensemble(lattice: LatticeSpec, params: PhysicalParams, taus,
                port="transmitted", average="g2",
                n_samples=DEFAULT_SAMPLES, master_seed=0, workers=1,
                progress=None) -> G2Ensemble:
    """Disorder-averaged photon correlations.

    ``average='g2'`` (default) averages each realization's normalized
    curve.  ``average='G2'`` averages unnormalized correlations and
    intensities separately and takes the ratio, which weights
    realizations by their transmitted (or reflected) intensity.
    """
    taus = np.asarray(taus, dtype=float)
    if average == "g2":
        stats = run_ensemble(g2_kernel, n_samples, master_seed, workers,
                             args=(lattice, params, taus, port),
                             progress=progress)
        return G2Ensemble(taus, stats.mean, stats.stderr, port, average,
                          stats.count, stats.failures)
    if average != "G2":
        raise ValueError("average must be 'g2' or 'G2'")
    stats = run_ensemble(g2_raw_kernel, n_samples, master_seed, workers,
                         args=(lattice, params, taus, port), progress=progress)
    curve = stats.mean[0] / stats.mean[1]
    se = stats.stderr[0] / stats.mean[1]
    return G2Ensemble(taus, curve, se, port, average, stats.count,
                      stats.failures)
