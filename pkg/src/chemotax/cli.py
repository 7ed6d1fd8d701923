"""Command-line entry point: ``chemotax {simulate,stability,sweep,lyapunov,probe}``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import experiments, kinetics, linstab
from .core import Family, field_names, homogeneous_steady_state
from .errors import ChemotaxError, ConfigError
from .outputs import atomic_write_text, write_csv, write_field_csv, write_json
from .simulate import run

log = logging.getLogger("chemotax")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


class Outputs:
    """Tracks files written under the output directory for the manifest."""

    def __init__(self, root: Path, command: str):
        self.root = root
        self.command = command
        self.files = []

    def path(self, rel, role):
        self.files.append({"path": rel, "role": role})
        return self.root / rel

    def finish(self, extra=None):
        doc = {"command": self.command, "files": self.files}
        if extra:
            doc.update(extra)
        write_json(self.root / "manifest.json", doc)


def cmd_simulate(conf: cfgmod.Config, out: Outputs, args):
    cfg = conf.run
    rec = run(cfg)
    write_csv(out.path("series.csv", "scalar diagnostics per step"), rec.series, rec.columns)
    names = field_names(cfg.model)
    for t, step, y in zip(rec.times, rec.steps, rec.snapshots):
        for name, f in zip(names, y):
            rel = f"snapshots/{name}_{step:08d}.csv"
            write_field_csv(out.path(rel, f"{name} field at t={t:.6g}"), f, cfg.grid.L, t)
    term = rec.termination
    result = {"termination": term.kind, "t_end": float(term.t), "steps": int(term.step)}
    atomic_write_text(out.path("run.yaml", "effective configuration and termination"),
                      conf.to_yaml(result))
    print(f"termination: {term}")
    print(f"snapshots: {len(rec.snapshots)}  steps: {term.step}")
    out.finish({"termination": str(term), "wallclock_s": round(rec.wallclock, 3)})
    return EXIT_OK


def cmd_stability(conf: cfgmod.Config, out: Outputs, args):
    spec = conf.run.model
    st = conf.stability
    base = None if st["base"] is None else [float(b) for b in st["base"]]
    summary = {}
    if spec.family is Family.TWO_SPECIES:
        if base is None:
            raise ConfigError("stability.base: two-species analysis needs base densities",
                              key="stability.base")
        base = homogeneous_steady_state(spec, base)
    else:
        try:
            th = linstab.turing_threshold(spec)
            summary.update(chi_crit=th.chi_crit, k_c=th.k_c, k_c_squared=th.k_c ** 2,
                           chi_crit_numeric=th.chi_numeric)
            print(f"chi_crit = {th.chi_crit:.12g}")
            print(f"k_c^2 = {th.k_c ** 2:.12g}")
            hopf = linstab.hopf_criterion_kinetic(spec, th.k_c)
            summary.update(hopf_threshold_chi=hopf.threshold_chi,
                           hopf_discriminant=hopf.discriminant, oscillatory=hopf.oscillatory)
        except ChemotaxError as e:
            summary["threshold_error"] = str(e)
            print(f"no Turing threshold: {e}")
        band = linstab.unstable_band(spec)
        summary["unstable_band"] = None if band is None else [float(b) for b in band]
        if not conf.run.grid.periodic:
            summary["fluid_stable"] = linstab.fluid_stability_condition(spec, conf.run.grid.L)
    chis = st["chis"]
    chis = [spec.species[0].chi] if chis is None else [float(c) for c in np.atleast_1d(chis)]
    rows = experiments.dispersion_export(spec, chis, base=base, grid=conf.run.grid,
                                         k_hi=st["k_hi"], n_samples=int(st["n_samples"]))
    write_csv(out.path("dispersion.csv", "growth rate versus wavenumber"), rows,
              ("chi", "k", "re_lambda", "im_lambda", "re_simplified"))
    summary = {k: (float(v) if isinstance(v, (np.floating, float)) else v)
               for k, v in summary.items()}
    atomic_write_text(out.path("thresholds.yaml", "thresholds summary"),
                      cfgmod.yaml.safe_dump(summary, sort_keys=True))
    out.finish()
    return EXIT_OK


def cmd_sweep(conf: cfgmod.Config, out: Outputs, args):
    chis = cfgmod.sweep_chis(conf.sweep)
    res = experiments.bifurcation_sweep(conf.run, chis, workers=args.workers,
                                        species_index=int(conf.sweep["species_index"]))
    write_csv(out.path("sweep.csv", "final-time maxima per chi"), res.rows(),
              ("chi", "max_u", "max_v", "max_w", "terminated_early"))
    summary = {"transition_estimate": res.transition_estimate, "n_runs": len(chis),
               "n_terminated_early": int(res.terminated_early.sum())}
    atomic_write_text(out.path("sweep_summary.yaml", "transition estimate"),
                      cfgmod.yaml.safe_dump(summary, sort_keys=True))
    print(f"transition_estimate = {res.transition_estimate}")
    out.finish()
    return EXIT_OK


def cmd_lyapunov(conf: cfgmod.Config, out: Outputs, args):
    ly = conf.lyapunov
    u0, v0 = (float(x) for x in ly["ic"])
    res = kinetics.lyapunov_spectrum(conf.run.model, kinetics.KineticState(u0, v0),
                                     float(ly["t_final"]), float(ly["dt"]),
                                     int(ly["renorm_every"]))
    write_csv(out.path("lyapunov.csv", "running exponents and Kaplan-Yorke dimension"),
              res.history_rows(), ("t", "le1", "le2", "d_ky"))
    print("exponents = " + ", ".join(f"{x:.6f}" for x in res.exponents))
    print(f"d_ky = {res.d_ky:g}")
    out.finish({"exponents": list(res.exponents), "d_ky": res.d_ky})
    return EXIT_OK


def cmd_probe(conf: cfgmod.Config, out: Outputs, args):
    pr = conf.probe
    cfg = conf.run
    sp = cfg.model.species[0]
    chi = sp.chi if pr["chi"] is None else float(pr["chi"])
    if pr["kind"] == "critical_mass":
        mc = linstab.critical_mass(sp.D, chi)
        masses = [float(r) * mc for r in pr["mass_ratios"]]
        sig = cfg.model.signal
        verdicts = experiments.critical_mass_probe(
            sp.D, chi, masses, cfg.grid, cfg.t_final, dt=cfg.dt, width=float(pr["width"]),
            stepper=cfg.stepper.value, blowup_threshold=cfg.blowup_threshold, D_v=sig.D_v,
            alpha=sig.alpha[0], beta=sig.beta)
        report = {"kind": "critical_mass", "critical_mass": mc,
                  "monotone": experiments.masses_monotone(verdicts),
                  "verdicts": [{"mass": v.mass, "ratio": v.ratio, "termination": v.termination,
                                "t_end": v.t_end, "sup_max": v.sup_max} for v in verdicts]}
        for v in verdicts:
            print(f"M/M_c = {v.ratio:.3g}: {v.termination}")
    elif pr["kind"] == "hopf":
        h = experiments.hopf_probe(cfg.model, chi, cfg.t_final, cfg.grid, dt=cfg.dt,
                                   stepper=cfg.stepper.value, seed=cfg.rng_seed)
        report = {"kind": "hopf", "chi": h.chi, "frequency": h.frequency,
                  "peak_ratio": h.peak_ratio, "oscillatory": h.oscillatory,
                  "predicted_threshold_chi": h.predicted.threshold_chi}
        write_csv(out.path("midpoint.csv", "midpoint density series"), h.series, ("t", "u_mid"))
        print(f"oscillatory = {h.oscillatory} (peak ratio {h.peak_ratio:.3g})")
    else:
        raise ConfigError(f"probe.kind: unknown probe {pr['kind']!r}", key="probe.kind")
    atomic_write_text(out.path("probe.yaml", "probe report"),
                      cfgmod.yaml.safe_dump(report, sort_keys=False))
    out.finish()
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "stability": cmd_stability, "sweep": cmd_sweep,
            "lyapunov": cmd_lyapunov, "probe": cmd_probe}


def build_parser():
    p = argparse.ArgumentParser(prog="chemotax", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", required=True, help="YAML configuration file")
        s.add_argument("--output-dir", default="out", help="directory for outputs")
        s.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="dotted override, e.g. model.species.0.chi=2")
        s.add_argument("--workers", type=int,
                       default=int(os.environ.get("CHEMOTAX_WORKERS", "1")))
        s.add_argument("--seed", type=int, default=None, help="override rng_seed")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = list(args.overrides)
    if args.seed is not None:
        overrides.append(f"rng_seed={args.seed}")
    try:
        conf = cfgmod.load(args.config, overrides)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    root = Path(args.output_dir)
    try:
        root.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](conf, Outputs(root, args.command), args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (ChemotaxError, OSError, ValueError, FloatingPointError) as e:
        print(f"runtime error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
