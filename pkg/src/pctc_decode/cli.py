"""Command-line front end: ``run``, ``otoc``, ``verify`` and ``table``.

Exit codes: 0 success, 1 verification or statistics failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import otoc, protocol, scramblers
from .exceptions import DegenerateOutcomeError, InsufficientStatisticsError
from .protocol import NoiseModel
from .qcore import PAULI_STATES, STATE_LABELS, bloch_state
from .shots import run_shots

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

CSV_COLUMNS = ("scrambler", "state", "mode", "F", "P", "F_se", "P_se", "shots_issued", "shots_kept", "seed")

# calibration-derived noise levels (ibm readout listed for wires B, H, E, E')
NOISE_PRESETS = {
    "h1-1": {"p1": 2.1e-5, "p2": 8.8e-4, "readout_eps": 2.5e-3},
    "ibm-torino": {"p1": 1.5e-4, "p2": 1.62e-3, "readout_eps": [6.3e-3, 2.54e-2, 1.07e-2, 2.86e-2]},
}

# hardware results, quoted for comparison only
REPORTED = {
    "main": {
        "uq": {
            "F": (0.976, 0.986, 0.990, 0.988, 0.983, 0.987, 0.985),
            "P": (0.258, 0.249, 0.243, 0.256, 0.253, 0.252, 0.252),
        },
    },
    "supp": {
        "uq": {
            "F": (0.8320, 0.8219, 0.8681, 0.8506, 0.8479, 0.8512, 0.8453),
            "P": (0.2519, 0.2619, 0.2592, 0.2578, 0.2566, 0.2564, 0.2573),
        },
        "uc": {
            "F": (0.5021, 0.5014, 0.4949, 0.5082, 0.9092, 0.9130, 0.6381),
            "P": (0.4430, 0.4440, 0.4454, 0.4406, 0.4405, 0.4461, 0.4433),
        },
    },
}
REPORTED_DEVICE = {"main": "trapped-ion H1-1", "supp": "superconducting ibm_torino"}


class UsageError(Exception):
    pass


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".10g")


# ---------------------------------------------------------------------------
# configuration


def parse_states(text):
    """``all`` or a comma list of labels and ``bloch:THETA:PHI`` entries."""
    if text.strip().lower() == "all":
        return list(STATE_LABELS)
    out = []
    for item in text.split(","):
        item = item.strip()
        if item in PAULI_STATES:
            out.append(item)
        elif item.startswith("bloch:"):
            parts = item.split(":")
            if len(parts) != 3:
                raise UsageError(f"bad Bloch state {item!r}, expected bloch:THETA:PHI")
            try:
                float(parts[1]), float(parts[2])
            except ValueError:
                raise UsageError(f"bad Bloch angles in {item!r}") from None
            out.append(item)
        else:
            raise UsageError(f"unknown state {item!r}; use {', '.join(STATE_LABELS)} or bloch:THETA:PHI")
    if not out:
        raise UsageError("no states given")
    return out


def state_vector(label):
    if label in PAULI_STATES:
        return PAULI_STATES[label]
    _, theta, phi = label.split(":")
    return bloch_state(float(theta), float(phi))


def load_noise(arg):
    """A preset name or a JSON file with keys p1, p2, readout_eps."""
    if arg is None:
        return None
    if arg in NOISE_PRESETS:
        return NoiseModel.from_dict(NOISE_PRESETS[arg])
    try:
        data = json.loads(Path(arg).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read noise file {arg!r}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"noise file {arg!r} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("noise file must hold a JSON object")
    try:
        return NoiseModel.from_dict(data)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad noise model: {exc}") from None


def config_from_args(a):
    if a.config:
        try:
            cfg = json.loads(Path(a.config).read_text())["config"]
        except (OSError, KeyError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot load config from {a.config!r}: {exc}") from None
        return validate_config(cfg)
    noise = load_noise(a.noise)
    cfg = {
        "scrambler": a.scrambler,
        "states": parse_states(a.states),
        "mode": a.mode,
        "shots": a.shots,
        "seed": a.seed,
        "noise": None if noise is None else noise.to_dict(),
        "workers": a.workers,
    }
    return validate_config(cfg)


def validate_config(cfg):
    cfg = dict(cfg)
    try:
        scramblers.by_name(cfg["scrambler"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if cfg["mode"] not in ("analytic", "shots", "both"):
        raise UsageError(f"unknown mode {cfg['mode']!r}")
    cfg["states"] = parse_states(",".join(cfg["states"]))
    if cfg["mode"] != "analytic" and int(cfg["shots"]) < 1:
        raise UsageError("--shots must be >= 1 when shots are simulated")
    if cfg.get("noise") is not None:
        try:
            NoiseModel.from_dict(cfg["noise"])
        except (ValueError, TypeError) as exc:
            raise UsageError(f"bad noise model: {exc}") from None
    cfg.setdefault("workers", 1)
    return cfg


# ---------------------------------------------------------------------------
# run


def run_experiment(cfg):
    """Rows of the results table plus per-state shot counts."""
    u = scramblers.by_name(cfg["scrambler"])
    noise = NoiseModel.from_dict(cfg["noise"]) if cfg.get("noise") else None
    modes = ["analytic", "shots"] if cfg["mode"] == "both" else [cfg["mode"]]
    rows, counts = [], {}
    for mode in modes:
        mode_rows = []
        for label in cfg["states"]:
            psi = state_vector(label)
            row = {"scrambler": u.name, "state": label, "mode": mode, "seed": None,
                   "F_se": None, "P_se": None, "shots_issued": None, "shots_kept": None}
            if mode == "analytic":
                r = protocol.decode_analytic_pctc(psi, u)
            else:
                data, r = run_shots(psi, u, int(cfg["shots"]), noise, int(cfg["seed"]),
                                    int(cfg.get("workers", 1)), label)
                counts[label] = data.to_dict()
                row.update(F_se=r.fidelity_se, P_se=r.probability_se, seed=int(cfg["seed"]),
                           shots_issued=data.total_issued, shots_kept=data.total_kept)
            row.update(F=r.fidelity, P=r.success_probability)
            mode_rows.append(row)
        rows += mode_rows + [_average_row(mode_rows)]
    return rows, counts


def _average_row(rows):
    n = len(rows)
    avg = dict(rows[0], state="Average")
    avg["F"] = sum(r["F"] for r in rows) / n
    avg["P"] = sum(r["P"] for r in rows) / n
    for key in ("F_se", "P_se"):
        if rows[0][key] is not None:
            avg[key] = float(np.sqrt(sum(r[key] ** 2 for r in rows))) / n
    for key in ("shots_issued", "shots_kept"):
        if rows[0][key] is not None:
            avg[key] = sum(r[key] for r in rows)
    return avg


def render_csv(rows):
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for r in rows:
        buf.write(",".join(_fmt(r[c]) for c in CSV_COLUMNS) + "\n")
    return buf.getvalue()


def cmd_run(a):
    cfg = config_from_args(a)
    try:
        rows, counts = run_experiment(cfg)
    except InsufficientStatisticsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except DegenerateOutcomeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = render_csv(rows)
    if a.out is None:
        sys.stdout.write(text)
        return EXIT_OK
    out = Path(a.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        fh.write(text)
    sidecar = {"config": cfg, "counts": counts}
    out.with_suffix(".json").write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    written = [out, out.with_suffix(".json")]
    if not a.no_plot:
        from .plotting import fidelity_probability_figure

        title = f"{cfg['scrambler']}, {cfg['mode']}"
        written.append(fidelity_probability_figure(rows, out.with_suffix(".png"), title))
    for p in written:
        print(f"wrote {p}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# otoc, verify, table


def cmd_otoc(a):
    try:
        u = scramblers.by_name(a.scrambler)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if a.samples < 0 or a.samples == 1:
        raise UsageError("--samples must be 0 (exact) or at least 2")
    exact = otoc.otoc_average_exact(u)
    if a.samples == 0:
        print(f"O_avg (exact)          = {exact:.12f}")
    else:
        rep = otoc.otoc_average_sampled(u, a.samples, np.random.default_rng(a.seed))
        print(f"O_avg (sampled, n={a.samples}) = {rep.value.real:.6f} +/- {rep.stderr:.6f}")
        print(f"O_avg (exact)          = {exact:.12f}")
    print(f"six-state mean of P    = {otoc.state_design_average(u):.12f}")
    return EXIT_OK


def cmd_verify(a):
    from .verify import run_checks

    results = run_checks()
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"[{'PASS' if r.ok else 'FAIL'}] {r.name:<{width}}  {r.detail}")
    failed = sum(not r.ok for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_FAIL


def table_rows(which):
    """Ideal values next to the quoted hardware numbers for one table."""
    out = []
    for name, rep in REPORTED[which].items():
        u = scramblers.by_name(name)
        ideal = [protocol.decode_analytic_pctc(PAULI_STATES[s], u) for s in STATE_LABELS]
        f_id = [r.fidelity for r in ideal]
        p_id = [r.success_probability for r in ideal]
        f_id.append(float(np.mean(f_id)))
        p_id.append(float(np.mean(p_id)))
        for i, label in enumerate(STATE_LABELS + ("Average",)):
            out.append((name, label, f_id[i], p_id[i], rep["F"][i], rep["P"][i]))
    return out


def cmd_table(a):
    print(f"ideal theory vs {REPORTED_DEVICE[a.which]} data (reported, not reproduced)")
    print(f"{'scrambler':<10}{'state':<9}{'F ideal':>9}{'P ideal':>9}{'F reported':>12}{'P reported':>12}")
    for name, label, f, p, fr, pr in table_rows(a.which):
        print(f"{name:<10}{label:<9}{f:>9.4f}{p:>9.4f}{fr:>12.4f}{pr:>12.4f}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="pctc-decode", description="Scrambling-based time-travel decoding simulator.")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="decode a set of states and write a results table")
    r.add_argument("--scrambler", default="uq", help="uq, uc, identity or haar:SEED")
    r.add_argument("--states", default="all", help="'all' or comma list of x-,x+,...,bloch:THETA:PHI")
    r.add_argument("--mode", choices=("analytic", "shots", "both"), default="analytic")
    r.add_argument("--shots", type=int, default=4000, help="shots per tomography basis")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--noise", help=f"JSON noise file or preset ({', '.join(NOISE_PRESETS)})")
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--out", help="CSV path; a .json sidecar and a .png figure are written next to it")
    r.add_argument("--config", help="rerun from a JSON sidecar (other run options are ignored)")
    r.add_argument("--no-plot", action="store_true", help="skip the figure")
    r.set_defaults(func=cmd_run)

    o = sub.add_parser("otoc", help="averaged out-of-time-order correlator")
    o.add_argument("--scrambler", default="uq")
    o.add_argument("--samples", type=int, default=0, help="0 for the exact value")
    o.add_argument("--seed", type=int, default=0)
    o.set_defaults(func=cmd_otoc)

    v = sub.add_parser("verify", help="run the self-check battery")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("table", help="ideal values beside the quoted hardware tables")
    t.add_argument("--which", choices=("main", "supp"), default="main")
    t.set_defaults(func=cmd_table)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
