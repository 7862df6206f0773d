"""Command-line front end.

Every subcommand accepts ``--config FILE`` with ``key = value`` lines (``#``
starts a comment); keys are the long flag names with dashes or underscores.
Flags given on the command line override the file.  All CSV output starts
with a header row followed by one ``#`` line holding the resolved config.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys

import numpy as np

from .model import ModelParams, ValidationError, a_index, iter_sectors, omega_nlj
from .packets import DEFAULT_TAIL_EPS, PacketSpec, Rep, initial_state, packet_coefficients

EXIT_OK = 0
EXIT_BOUND = 1  # validate: a deviation exceeded its bound
EXIT_USAGE = 2  # argparse
EXIT_BAD_KEY = 3
EXIT_BAD_VALUE = 4
EXIT_BAD_PATH = 5


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _positive(v):
    x = float(v)
    if not (x > 0 and math.isfinite(x)):
        raise ValueError("must be a positive number")
    return x


def _finite(v):
    x = float(v)
    if not math.isfinite(x):
        raise ValueError("must be finite")
    return x


def _nonneg(v):
    x = float(v)
    if not (x >= 0 and math.isfinite(x)):
        raise ValueError("must be >= 0")
    return x


def _count(v):
    n = int(v)
    if n < 0:
        raise ValueError("must be a non-negative integer")
    return n


def _bool(v):
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError("must be true or false")


def _choice(*opts):
    def conv(v):
        if v not in opts:
            raise ValueError(f"must be one of {', '.join(opts)}")
        return v

    return conv


# name -> (converter, default, help)
COMMON = {
    "r": (_positive, 0.0001, "hbar*omega/(m c^2)"),
    "tail-eps": (_positive, DEFAULT_TAIL_EPS, "packet truncation weight"),
    "paper-literal": (_bool, False, "use the printed small-component amplitude"),
    "out": (str, "-", "output path ('-' for stdout)"),
}
PACKET = {
    "packet": (_choice("circular", "linear"), "circular", "packet family"),
    "nbar": (_nonneg, 20.0, "mean N of the circular packet"),
    "z0": (_finite, 0.0, "initial z of the linear packet (sigma)"),
    "p0": (_finite, 0.0, "initial p_z of the linear packet (hbar/sigma)"),
    "spin-theta": (_finite, 0.0, "spin polar angle in the xOz plane"),
}
TIME = {
    "tmax": (_positive, 3.0, "end time in units of T"),
    "dt": (_positive, 1.0 / 256, "time step in units of T"),
    "rep": (_choice("dirac", "fw"), "dirac", "representation"),
}

SUBCOMMANDS = {
    "spectrum": {**COMMON, "nmax": (_count, 4, "largest N")},
    "packet": {**COMMON, **PACKET},
    "evolve": {**COMMON, **PACKET, **TIME},
    "autocorr": {**COMMON, **PACKET, **TIME},
    "density": {
        **COMMON,
        **PACKET,
        "rep": TIME["rep"],
        "surface": (_choice("sphere", "xz", "perp"), "xz", "cross-section"),
        "radius": (_positive, None, "sphere radius (default: orbit radius)"),
        "offset": (_finite, 0.0, "z of the perpendicular plane"),
        "extent": (_positive, None, "half-width of planar grids"),
        "t": (_nonneg, 0.0, "time in units of T"),
        "n1": (int, 101, "points along the first axis"),
        "n2": (int, 101, "points along the second axis"),
        "raw": (str, None, "also write a raw float64 block here"),
    },
    "revivals": {
        "out": COMMON["out"],
        "r": COMMON["r"],
        "input": (str, None, "CSV from evolve or autocorr"),
        "column": (str, "|A|^2", "signal column ('sn' = spin on the initial direction)"),
        "spin-theta": PACKET["spin-theta"],
        "threshold": (_nonneg, 0.5, "normalised peak threshold"),
        "min-sep": (_positive, 1.0, "minimum peak separation in T"),
        "t-rev": (_positive, None, "revival time in T (default 1/r)"),
    },
    "validate": {**COMMON, **PACKET, **TIME, "bound": (_positive, 1e-10, "max allowed deviation")},
}


def read_config(path) -> dict:
    out = {}
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise CliError(EXIT_BAD_PATH, f"cannot read config file {path}: {exc.strerror}") from None
    with fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise CliError(EXIT_BAD_VALUE, f"{path}:{n}: expected key = value")
            k, v = line.split("=", 1)
            out[k.strip().replace("_", "-")] = v.strip()
    return out


def resolve(sub: str, file_cfg: dict, flags: dict) -> dict:
    spec = SUBCOMMANDS[sub]
    for k in file_cfg:
        if k not in spec:
            raise CliError(EXIT_BAD_KEY, f"unknown config key '{k}' for {sub} (allowed: {', '.join(spec)})")
    cfg = {}
    for k, (conv, default, _) in spec.items():
        raw = flags.get(k, file_cfg.get(k, default))
        if raw is None:
            cfg[k] = None
            continue
        try:
            cfg[k] = conv(raw)
        except (TypeError, ValueError) as exc:
            raise CliError(EXIT_BAD_VALUE, f"invalid value for {k}: {raw!r} ({exc})") from None
    return cfg


def config_comment(sub: str, cfg: dict) -> str:
    items = [f"command={sub}"] + [f"{k}={cfg[k]!r}" if isinstance(cfg[k], float) else f"{k}={cfg[k]}" for k in sorted(cfg)]
    return "# " + " ".join(items)


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    try:
        return open(path, "w", encoding="utf-8", newline="\n"), True
    except OSError as exc:
        raise CliError(EXIT_BAD_PATH, f"cannot write {path}: {exc.strerror}") from None


def write_csv(path, header, rows, comment):
    fh, close = _open_out(path)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        fh.write(comment + "\n")
        for row in rows:
            w.writerow([_fmt(x) for x in row])
    finally:
        if close:
            fh.close()


def _params(cfg) -> ModelParams:
    return ModelParams(cfg["r"], paper_literal=cfg["paper-literal"])


def _spec(cfg) -> PacketSpec:
    th = cfg["spin-theta"]
    if cfg["packet"] == "circular":
        return PacketSpec.circular(cfg["nbar"], th)
    return PacketSpec.linear(cfg["z0"], cfg["p0"], th)


def _grid(cfg):
    n = int(math.floor(cfg["tmax"] / cfg["dt"] + 1e-9))
    return np.arange(n + 1) * cfg["dt"]


# -- subcommands ------------------------------------------------------------


def cmd_spectrum(cfg, comment):
    p = _params(cfg)
    rows = []
    for key in iter_sectors(cfg["nmax"]):
        rows.append((key.N, key.l, key.j2 / 2, a_index(key), omega_nlj(key, p)))
    write_csv(cfg["out"], ["N", "l", "j", "A", "omega"], rows, comment)


def cmd_packet(cfg, comment):
    rows = [(N, l, lam.real, lam.imag, abs(lam) ** 2) for N, l, lam in packet_coefficients(_spec(cfg), cfg["tail-eps"])]
    write_csv(cfg["out"], ["N", "l", "re", "im", "weight"], rows, comment)


def cmd_evolve(cfg, comment):
    from .observables import time_series

    s0 = initial_state(_spec(cfg), cfg["rep"], cfg["tail-eps"])
    ts = time_series(s0, _params(cfg), _grid(cfg))
    names = ["sx", "sy", "sz", "Lx", "Ly", "Lz", "Jx", "Jy", "Jz", "A2", "norm"]
    cols = [ts.times] + [ts[n] for n in names]
    header = ["t/T"] + names[:9] + ["|A|^2", "norm"]
    write_csv(cfg["out"], header, zip(*cols), comment)


def cmd_autocorr(cfg, comment):
    from .observables import time_series

    s0 = initial_state(_spec(cfg), cfg["rep"], cfg["tail-eps"])
    ts = time_series(s0, _params(cfg), _grid(cfg))
    A = ts["A"]
    write_csv(cfg["out"], ["t/T", "re", "im", "|A|^2"], zip(ts.times, A.real, A.imag, ts["A2"]), comment)


def cmd_density(cfg, comment):
    from .density import density_grid
    from .evolution import Propagator

    if cfg["n1"] < 2 or cfg["n2"] < 2:
        raise CliError(EXIT_BAD_VALUE, "invalid value for n1/n2: need at least 2 points per axis")
    spec = _spec(cfg)
    p = _params(cfg)
    s0 = initial_state(spec, cfg["rep"], cfg["tail-eps"])
    state = Propagator(s0, p).state(cfg["t"] * p.period)
    radius = cfg["radius"]
    if cfg["surface"] == "sphere" and radius is None:
        radius = math.sqrt(spec.nbar) if spec.kind == "circular" else abs(spec.z0)
        if radius <= 0:
            raise CliError(EXIT_BAD_VALUE, "invalid value for radius: give --radius for this packet")
    grid = density_grid(state, cfg["surface"], cfg["n1"], cfg["n2"], radius, cfg["offset"], cfg["extent"], cfg["t"])
    rows = ((u, v, grid.values[i, j]) for i, u in enumerate(grid.axis1) for j, v in enumerate(grid.axis2))
    write_csv(cfg["out"], list(grid.axis_names) + ["density"], rows, comment)
    if cfg["raw"]:
        try:
            grid.write_raw(cfg["raw"])
        except OSError as exc:
            raise CliError(EXIT_BAD_PATH, f"cannot write {cfg['raw']}: {exc.strerror}") from None


def read_series_csv(path):
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise CliError(EXIT_BAD_PATH, f"cannot read {path}: {exc.strerror}") from None
    with fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.reader(io.StringIO("".join(lines)))
    header = next(reader, None)
    if not header:
        raise CliError(EXIT_BAD_VALUE, f"invalid value for input: {path} has no header row")
    data = np.array([[float(x) for x in row] for row in reader if row], dtype=float).reshape(-1, len(header))
    return {h: data[:, i] for i, h in enumerate(header)}


def cmd_revivals(cfg, comment):
    from .revivals import find_revivals

    if not cfg["input"]:
        raise CliError(EXIT_BAD_VALUE, "invalid value for input: an evolve/autocorr CSV is required")
    cols = read_series_csv(cfg["input"])
    if "t/T" not in cols:
        raise CliError(EXIT_BAD_VALUE, "invalid value for input: no 't/T' column")
    name = cfg["column"]
    if name == "sn":
        th = cfg["spin-theta"]
        try:
            sig = math.sin(th) * cols["sx"] + math.cos(th) * cols["sz"]
        except KeyError:
            raise CliError(EXIT_BAD_VALUE, "invalid value for column: 'sn' needs sx and sz columns") from None
    elif name in cols:
        sig = cols[name]
    else:
        raise CliError(EXIT_BAD_VALUE, f"invalid value for column: {name!r} not in {', '.join(cols)}")
    t_rev = cfg["t-rev"] if cfg["t-rev"] is not None else 1.0 / cfg["r"]
    events = find_revivals((cols["t/T"], sig), cfg["threshold"], cfg["min-sep"], t_rev)
    rows = [(e.time, e.kind, "" if e.fraction is None else str(e.fraction), e.score) for e in events]
    write_csv(cfg["out"], ["t/T", "kind", "fraction", "score"], rows, comment)


def cmd_validate(cfg, comment):
    from .oracle import oracle_compare

    s0 = initial_state(_spec(cfg), cfg["rep"], cfg["tail-eps"])
    report = oracle_compare(s0, _grid(cfg), _params(cfg))
    bound = cfg["bound"]
    keys = ["norm", "sx", "sy", "sz", "Jx", "Jy", "Jz", "A2"]
    rows = [(k, report[k], bound, "ok" if report[k] < bound else "FAIL") for k in keys]
    write_csv(cfg["out"], ["quantity", "max_deviation", "bound", "status"], rows, comment)
    return EXIT_OK if all(r[3] == "ok" for r in rows) else EXIT_BOUND


COMMANDS = {
    "spectrum": cmd_spectrum,
    "packet": cmd_packet,
    "evolve": cmd_evolve,
    "autocorr": cmd_autocorr,
    "density": cmd_density,
    "revivals": cmd_revivals,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="diracosc", description="Dirac-oscillator wavepacket dynamics")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, spec in SUBCOMMANDS.items():
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="key = value file; flags override it")
        for k, (conv, default, help_) in spec.items():
            h = f"{help_} (default: {default})"
            if conv is _bool:
                sp.add_argument(f"--{k}", nargs="?", const="true", default=argparse.SUPPRESS, help=h)
            else:
                sp.add_argument(f"--{k}", default=argparse.SUPPRESS, help=h)
    return ap


def main(argv=None) -> int:
    args = vars(build_parser().parse_args(argv))
    sub = args.pop("command")
    cfg_path = args.pop("config", None)
    flags = {k.replace("_", "-"): v for k, v in args.items()}
    try:
        file_cfg = read_config(cfg_path) if cfg_path else {}
        cfg = resolve(sub, file_cfg, flags)
        code = COMMANDS[sub](cfg, config_comment(sub, cfg))
        return EXIT_OK if code is None else code
    except CliError as exc:
        print(f"diracosc: error: {exc}", file=sys.stderr)
        return exc.code
    except ValidationError as exc:
        print(f"diracosc: error: invalid value: {exc}", file=sys.stderr)
        return EXIT_BAD_VALUE


if __name__ == "__main__":
    sys.exit(main())
