"""Command-line front end.

One subcommand per observable, plus ``run`` for batch jobs driven by a
JSON or YAML config.  All commands write deterministic columnar text
files (or the structured JSON twin via --format structured); nothing
here plots.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import os
import re
import sys

import numpy as np

from . import __version__, ensemble, io
from .dynamics import default_times
from .correlations import default_taus
from .model import CavityGeometry, FillingMode, LatticeSpec, PhysicalParams
from .sampling import sample_realization
from .solver import SolverError
from .transfer_matrix import compare_markovian


class ConfigError(ValueError):
    pass


def parse_theta(text):
    """Lattice phase from '0.95pi', 'pi/2', '2pi/3', or a plain number."""
    s = str(text).strip().lower().replace(" ", "").replace("*", "")
    m = re.fullmatch(r"([0-9]*\.?[0-9]*)pi(?:/([0-9]*\.?[0-9]+))?", s)
    if m:
        coef = float(m.group(1)) if m.group(1) else 1.0
        div = float(m.group(2)) if m.group(2) else 1.0
        return coef * math.pi / div
    try:
        return float(s)
    except ValueError:
        raise argparse.ArgumentTypeError("cannot parse angle %r" % text)


def _default_workers():
    try:
        return max(1, int(os.environ.get("WGQED_WORKERS", "1")))
    except ValueError:
        return 1


def _add_output(p, default_name):
    p.add_argument("--out", default=default_name, help="output file path")
    p.add_argument("--format", choices=[io.FORMAT_COLUMNS, io.FORMAT_STRUCTURED],
                   default=io.FORMAT_COLUMNS)


def _add_physics(p):
    p.add_argument("--theta", type=parse_theta, default="pi",
                   help="lattice phase k_a d (accepts e.g. 'pi/2', '0.95pi')")
    p.add_argument("--gamma-prime", type=float, default=0.0)
    p.add_argument("--sigma-ih", type=float, default=0.0)
    p.add_argument("--drive-amp", type=float, default=1e-4)


def _add_lattice(p):
    p.add_argument("--n-sites", type=int, default=100)
    p.add_argument("--filling", type=float, default=1.0)
    p.add_argument("--filling-mode", choices=[m.value for m in FillingMode],
                   default=FillingMode.FIXED_COUNT.value)


def _add_ensemble(p):
    p.add_argument("--samples", type=int, default=ensemble.DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=_default_workers(),
                   help="process count (default from WGQED_WORKERS)")


def _params(ns, delta=0.0, eta=0.0):
    return PhysicalParams(theta=ns.theta, gamma_prime=ns.gamma_prime,
                          sigma_ih=ns.sigma_ih, drive_amp=ns.drive_amp,
                          delta=delta, eta=eta)


def _lattice(ns):
    try:
        return LatticeSpec(ns.n_sites, ns.filling, FillingMode(ns.filling_mode))
    except ValueError as exc:
        raise ConfigError(str(exc))


def _progress(label):
    def cb(done, total):
        step = max(1, total // 10)
        if done == total or done % step == 0:
            print("%s: %d/%d realizations" % (label, done, total),
                  file=sys.stderr)
    return cb


def _resolved(ns):
    # workers is scheduling, not physics: identical seeds must give
    # byte-identical files no matter how the work was spread out.
    skip = {"func", "out", "format", "workers"}
    out = {}
    for k, v in sorted(vars(ns).items()):
        if k in skip or callable(v):
            continue
        out[k] = v
    return out


def _failure_meta(failures):
    if not failures:
        return None
    return {"count": len(failures),
            "first": "index %s: %s" % (failures[0][0], str(failures[0][1])[:200])}


def _write(ns, names, columns, meta, units):
    meta = {k: v for k, v in meta.items() if v is not None}
    io.write_result(ns.out, names, columns, meta, units, ns.format)
    print("wrote %s" % ns.out, file=sys.stderr)


def cmd_spectrum(ns):
    deltas = np.linspace(ns.delta_min, ns.delta_max, ns.delta_steps)
    res = ensemble.spectrum_ensemble(_lattice(ns), _params(ns), deltas,
                                     ns.samples, ns.seed, ns.workers,
                                     progress=_progress("spectrum"))
    _write(ns, ["delta", "T_mean", "T_se", "R_mean", "R_se", "sum_mean"],
           [res.deltas, res.T_mean, res.T_se, res.R_mean, res.R_se,
            res.sum_mean],
           {"config": _resolved(ns), "master_seed": ns.seed,
            "samples_ok": res.count, "failures": _failure_meta(res.failures)},
           {"delta": "gamma0"})
    return 0


def cmd_kd_scan(ns):
    thetas = np.linspace(parse_theta(ns.theta_min), parse_theta(ns.theta_max),
                         ns.theta_steps)
    res = ensemble.kd_scan(_lattice(ns), _params(ns, delta=ns.delta), thetas,
                           ns.samples, ns.seed, ns.workers,
                           progress=_progress("kd-scan"))
    _write(ns, ["theta", "depth", "T_mean", "T_se", "R_mean", "R_se"],
           [res.thetas, res.depth, res.T_mean, res.T_se, res.R_mean, res.R_se],
           {"config": _resolved(ns), "master_seed": ns.seed,
            "samples_ok": res.count, "failures": _failure_meta(res.failures)},
           {"theta": "rad", "delta": "gamma0"})
    return 0


def cmd_filling_scan(ns):
    fillings = np.linspace(ns.p_min, ns.p_max, ns.p_steps)
    res = ensemble.filling_scan(ns.n_sites, _params(ns, delta=ns.delta),
                                fillings, FillingMode(ns.filling_mode),
                                ns.samples, ns.seed, ns.workers,
                                progress=_progress("filling-scan"))
    _write(ns, ["filling", "depth", "T_mean", "T_se", "R_mean", "R_se"],
           [res.fillings, res.depth, res.T_mean, res.T_se, res.R_mean,
            res.R_se],
           {"config": _resolved(ns), "master_seed": ns.seed,
            "samples_ok": res.count, "failures": _failure_meta(res.failures)},
           {"delta": "gamma0"})
    return 0


def cmd_rabi(ns):
    geom = CavityGeometry(mirror_sites=ns.mirror_sites, theta=ns.theta,
                          theta0=ns.theta0)
    times = default_times(ns.t_max, ns.t_steps)
    res = ensemble.rabi_ensemble(geom, ns.filling, _params(ns), times,
                                 FillingMode(ns.filling_mode), ns.samples,
                                 ns.seed, ns.workers,
                                 progress=_progress("rabi"))
    _write(ns, ["t", "pe_mean", "pe_se"],
           [res.times, res.pe_mean, res.pe_se],
           {"config": _resolved(ns), "master_seed": ns.seed,
            "samples_ok": res.count, "failures": _failure_meta(res.failures)},
           {"t": "1/gamma0"})
    return 0


def cmd_g2(ns):
    taus = default_taus(ns.tau_max, ns.tau_steps)
    res = ensemble.g2_ensemble(_lattice(ns), _params(ns, delta=ns.delta),
                               taus, ns.port, ns.average, ns.samples, ns.seed,
                               ns.workers, progress=_progress("g2"))
    _write(ns, ["tau", "g2_mean", "g2_se"],
           [res.taus, res.g2, res.g2_se],
           {"config": _resolved(ns), "master_seed": ns.seed,
            "samples_ok": res.count, "failures": _failure_meta(res.failures)},
           {"tau": "1/gamma0"})
    return 0


def cmd_tm_compare(ns):
    real = sample_realization(_lattice(ns), ns.sigma_ih, ns.seed, 0)
    deltas = np.linspace(ns.delta_min, ns.delta_max, ns.delta_steps)
    res = compare_markovian(real, _params(ns, eta=ns.eta), deltas)
    _write(ns, ["delta", "T_markov", "R_markov", "T_cascade", "R_cascade",
                "dT", "dR"],
           [res.deltas, res.T_markov, res.R_markov, res.T_cascade,
            res.R_cascade, res.dT, res.dR],
           {"config": _resolved(ns), "master_seed": ns.seed,
            "max_dT": res.max_dT, "mean_dT": res.mean_dT,
            "max_dR": res.max_dR, "mean_dR": res.mean_dR},
           {"delta": "gamma0"})
    return 0


def cmd_run(ns):
    cfg = io.load_config(ns.config)
    if not isinstance(cfg, dict) or "jobs" not in cfg:
        raise ConfigError("config must be a mapping with a 'jobs' list")
    defaults = cfg.get("defaults", {})
    os.makedirs(ns.out_dir, exist_ok=True)
    entries = []
    for job in cfg["jobs"]:
        if "command" not in job:
            raise ConfigError("every job needs a 'command'")
        args = dict(defaults)
        args.update(job.get("args", {}))
        tokens = [job["command"]]
        for key, value in sorted(args.items()):
            flag = "--" + str(key).replace("_", "-").lstrip("-")
            tokens.extend([flag, str(value)])
        name = job.get("name", job["command"])
        out = job.get("out", os.path.join(ns.out_dir, name + ".dat"))
        tokens.extend(["--out", out])
        if "format" in job:
            tokens.extend(["--format", job["format"]])
        code = _dispatch(tokens)
        if code != 0:
            return code
        entries.append({"name": name, "command": job["command"],
                        "out": out, "sha256": io.sha256_file(out),
                        "args": args})
    manifest = os.path.join(ns.out_dir, "manifest.json")
    io.write_manifest(manifest, entries)
    print("wrote %s" % manifest, file=sys.stderr)
    return 0


def build_parser():
    top = argparse.ArgumentParser(
        prog="wgqed",
        description="Disordered atom chains on a waveguide: spectra, "
                    "Rabi dynamics, photon correlations.")
    top.add_argument("--version", action="version",
                     version="wgqed %s" % __version__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="ensemble transmission/reflection "
                                        "versus drive detuning")
    _add_lattice(p)
    _add_physics(p)
    _add_ensemble(p)
    p.add_argument("--delta-min", type=float, default=-20.0)
    p.add_argument("--delta-max", type=float, default=20.0)
    p.add_argument("--delta-steps", type=int, default=401)
    _add_output(p, "spectrum.dat")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("kd-scan", help="optical depth versus lattice phase")
    _add_lattice(p)
    _add_physics(p)
    _add_ensemble(p)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--theta-min", default="0.05pi")
    p.add_argument("--theta-max", default="1.95pi")
    p.add_argument("--theta-steps", type=int, default=39)
    _add_output(p, "kd_scan.dat")
    p.set_defaults(func=cmd_kd_scan)

    p = sub.add_parser("filling-scan", help="optical depth versus filling")
    p.add_argument("--n-sites", type=int, default=100)
    p.add_argument("--filling-mode", choices=[m.value for m in FillingMode],
                   default=FillingMode.FIXED_COUNT.value)
    _add_physics(p)
    _add_ensemble(p)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--p-min", type=float, default=0.1)
    p.add_argument("--p-max", type=float, default=1.0)
    p.add_argument("--p-steps", type=int, default=10)
    _add_output(p, "filling_scan.dat")
    p.set_defaults(func=cmd_filling_scan)

    p = sub.add_parser("rabi", help="central-atom population between "
                                    "atomic mirrors")
    _add_physics(p)
    _add_ensemble(p)
    p.add_argument("--mirror-sites", type=int, default=50)
    p.add_argument("--theta0", type=parse_theta, default="1.5pi",
                   help="phase between the central atom and each mirror")
    p.add_argument("--filling", type=float, default=1.0)
    p.add_argument("--filling-mode", choices=[m.value for m in FillingMode],
                   default=FillingMode.FIXED_COUNT.value)
    p.add_argument("--t-max", type=float, default=20.0)
    p.add_argument("--t-steps", type=int, default=2000)
    _add_output(p, "rabi.dat")
    p.set_defaults(func=cmd_rabi)

    p = sub.add_parser("g2", help="second-order correlation of one "
                                  "output port")
    _add_lattice(p)
    _add_physics(p)
    _add_ensemble(p)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--tau-max", type=float, default=30.0)
    p.add_argument("--tau-steps", type=int, default=1500)
    p.add_argument("--port", choices=["transmitted", "reflected"],
                   default="transmitted")
    p.add_argument("--average", choices=["g2", "G2"], default="g2")
    _add_output(p, "g2.dat")
    p.set_defaults(func=cmd_g2)

    p = sub.add_parser("tm-compare", help="Markovian solver against the "
                                          "retarded transfer-matrix cascade")
    _add_lattice(p)
    _add_physics(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eta", type=float, default=1e-6,
                   help="retardation ratio gamma0/omega_a")
    p.add_argument("--delta-min", type=float, default=-20.0)
    p.add_argument("--delta-max", type=float, default=20.0)
    p.add_argument("--delta-steps", type=int, default=401)
    _add_output(p, "tm_compare.dat")
    p.set_defaults(func=cmd_tm_compare)

    p = sub.add_parser("run", help="batch jobs from a JSON/YAML config")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_run)

    return top


def _dispatch(argv):
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return ns.func(ns)
    except ConfigError as exc:
        print("wgqed: configuration error: %s" % exc, file=sys.stderr)
        return 2
    except (SolverError, RuntimeError) as exc:
        print("wgqed: numerical failure: %s" % exc, file=sys.stderr)
        return 3
    except OSError as exc:
        print("wgqed: %s" % exc, file=sys.stderr)
        return 2


def main(argv=None) -> int:
    return _dispatch(sys.argv[1:] if argv is None else list(argv))


if __name__ == "__main__":
    sys.exit(main())
