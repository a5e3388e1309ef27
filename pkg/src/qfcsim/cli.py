"""Command-line front end: flag parsing, CSV ingestion, result emission.

Every subcommand is a thin client of the HTTP service (in-process by
default, remote with --server). Inputs use bench units: lengths in mm,
positions and periods in um, powers in mW, normalized efficiency in
percent per (W cm^2). The summary record is a single JSON object on
stdout; point tables go to ``--out DIR`` as CSV files together with a
``manifest.json``. Exit codes: 0 success, 2 invalid input, 3 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
from datetime import datetime, timezone

from . import __version__
from .client import ServiceClient
from .errors import DataFormatError, NumericalError, QfcsimError, ValidationError

DEFAULT_SEED = 42
SEED_ENV_VAR = "QFCSIM_SEED"

# Input table schemas: exact header row required, all cells numeric.
DEFECT_COLUMNS = ("position_um", "width_um")
EFFICIENCY_COLUMNS = ("pump_mw", "eta_int")
NOISE_COLUMNS = ("pump_mw", "counts_hz")
CUTBACK_COLUMNS = ("length_cm", "transmission")
FP_COLUMNS = ("frequency_ghz", "transmission")
PROFILE_COLUMNS = ("temperature_c", "counts_hz")


# ---------------------------------------------------------------------------
# input parsing helpers


def read_table(path: str, columns: tuple[str, ...]) -> list[tuple[float, ...]]:
    """Read a CSV table with a mandatory exact header row.

    Collects every problem (header mismatch, bad column counts, non-numeric
    cells, each with its line number) before raising, so one run reports
    everything wrong with the file.
    """
    problems: list[str] = []
    rows: list[tuple[float, ...]] = []
    expected = list(columns)
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataFormatError(path, [f"cannot open file: {exc}"]) from exc
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(
                path, [f"line 1: empty file, expected header {','.join(expected)}"]
            ) from None
        if [cell.strip() for cell in header] != expected:
            problems.append(
                f"line 1: header must be exactly {','.join(expected)!r}, "
                f"got {','.join(header)!r}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(expected):
                problems.append(
                    f"line {lineno}: expected {len(expected)} columns, got {len(row)}"
                )
                continue
            values = []
            for name, cell in zip(expected, row):
                try:
                    values.append(float(cell))
                except ValueError:
                    problems.append(
                        f"line {lineno}: column {name!r} is not a number: {cell.strip()!r}"
                    )
            if len(values) == len(expected):
                rows.append(tuple(values))
    if not rows and not problems:
        problems.append("line 2: no data rows")
    if problems:
        raise DataFormatError(path, problems)
    return rows


def parse_sweep(text: str) -> list[float]:
    """Parse a power sweep: 'start:stop:step' (inclusive) or 'a,b,c'."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValidationError(
                f"sweep must be start:stop:step or a comma list, got {text!r}"
            )
        try:
            start, stop, step = (float(part) for part in parts)
        except ValueError:
            raise ValidationError(f"sweep bounds must be numbers, got {text!r}") from None
        if step <= 0:
            raise ValidationError(f"sweep step must be positive, got {step}")
        if stop < start:
            raise ValidationError(f"sweep stop {stop} is below start {start}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(count)]
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ValidationError(f"sweep values must be numbers, got {text!r}") from None
    if not values:
        raise ValidationError("sweep list is empty")
    return values


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ValidationError(f"{flag} must be a comma list of integers, got {text!r}") from None
    if not values:
        raise ValidationError(f"{flag} list is empty")
    return values


def _parse_float_list(text: str, flag: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ValidationError(f"{flag} must be a comma list of numbers, got {text!r}") from None
    if not values:
        raise ValidationError(f"{flag} list is empty")
    return values


def resolve_seed(flag_value: int | None) -> int:
    """Seed precedence: --seed flag, then QFCSIM_SEED, then the default 42."""
    if flag_value is not None:
        return flag_value
    env_value = os.environ.get(SEED_ENV_VAR)
    if env_value is not None:
        try:
            return int(env_value)
        except ValueError:
            raise ValidationError(
                f"{SEED_ENV_VAR} must be an integer, got {env_value!r}"
            ) from None
    return DEFAULT_SEED


# ---------------------------------------------------------------------------
# output emission


def build_manifest(command: str, payload: dict, seed: int) -> dict:
    canonical = json.dumps(
        {"command": command, "payload": payload}, sort_keys=True, separators=(",", ":")
    )
    return {
        "tool_version": __version__,
        "command": command,
        "config_digest": hashlib.sha256(canonical.encode("utf-8")).hexdigest(),
        "seed": seed,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def _emit(manifest: dict, result: dict, tables: dict, out_dir: str | None) -> None:
    print(json.dumps({"manifest": manifest, "result": result}, indent=2))
    if out_dir is None:
        return
    os.makedirs(out_dir, exist_ok=True)
    for filename, (header, rows) in tables.items():
        with open(os.path.join(out_dir, filename), "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# subcommand handlers: each returns (payload, result, tables)


def _cmd_budget(args, client: ServiceClient):
    payload = {
        "t_waveguide": args.twg,
        "t_collect": args.collect,
        "t_filter": args.filter,
        "detector_efficiency": args.detector,
        "eta_int": args.eta_int,
    }
    result = client.post("/v1/budget", payload)
    return payload, result, {}


def _cmd_tuning_curve(args, client: ServiceClient):
    if args.defects.lower() == "none":
        defects = []
    else:
        defects = [
            {"position_um": pos, "width_um": width}
            for pos, width in read_table(args.defects, DEFECT_COLUMNS)
        ]
    payload = {
        "length_mm": args.length_mm,
        "period_um": args.period_um,
        "d_eff": args.d_eff,
        "defects": defects,
        "num_points": args.points,
        "q_half_span_per_um": args.q_half_span,
        "mode": args.mode,
    }
    full = client.post("/v1/tuning-curve", payload)
    tables = {
        "curve.csv": (
            ["q_per_um", "relative_eta"],
            list(zip(full["q_per_um"], full["relative_eta"])),
        )
    }
    result = {
        "peak_q_per_um": full["peak_q_per_um"],
        "peak_relative_eta": full["peak_relative_eta"],
        "fwhm_per_um": full["fwhm_per_um"],
        "relative_efficiency": full["relative_efficiency"],
        "mode": full["mode"],
        "num_points": len(full["q_per_um"]),
    }
    return payload, result, tables


def _cmd_mc(args, client: ServiceClient):
    payload = {
        "defect_counts": _parse_int_list(args.defect_counts, "--defect-counts"),
        "trials": args.trials,
        "seed": resolve_seed(args.seed),
        "length_mm": args.length_mm,
        "period_um": args.period_um,
        "width_mean_um": args.width_mean_um,
        "d_eff": args.d_eff,
        "threshold": args.threshold,
        "mode": args.mode,
        "threads": args.threads,
        "lengths_mm": (
            _parse_float_list(args.lengths_mm, "--lengths-mm")
            if args.lengths_mm is not None
            else None
        ),
    }
    result = client.post("/v1/mc", payload)
    header = ["length_mm", "defect_count", "p_hat", "ci_lo", "ci_hi", "trials", "zero_width_draws"]
    rows = [[row[key] for key in header] for row in result["rows"]]
    return payload, result, {"yield.csv": (header, rows)}


def _pump_fields(args) -> dict:
    if (args.pump_mw is None) == (args.sweep_mw is None):
        raise ValidationError("provide exactly one of --pump-mw and --sweep-mw")
    if args.sweep_mw is not None:
        return {"pump_mw": None, "sweep_pump_mw": parse_sweep(args.sweep_mw)}
    return {"pump_mw": args.pump_mw, "sweep_pump_mw": None}


def _cmd_cme(args, client: ServiceClient):
    payload = {
        "eta_nor_percent_per_w_cm2": args.eta_nor,
        "alpha1_per_cm": args.alpha1,
        "alpha2_per_cm": args.alpha2,
        "alpha3_per_cm": args.alpha3,
        "length_mm": args.length_mm,
        "signal_ratio": args.signal_ratio,
        "pump_reference": args.pump_reference,
        **_pump_fields(args),
    }
    result = client.post("/v1/cme", payload)
    rows = [[pt["pump_mw"], pt["eta_int"]] for pt in result["points"]]
    return payload, result, {"efficiency.csv": (["pump_mw", "eta_int"], rows)}


def _noise_body(args) -> dict:
    return {
        "a_hz_per_w_per_cm": args.a,
        "alpha_pump_per_cm": args.alpha_pump,
        "alpha_dfg_per_cm": args.alpha_dfg,
        "eta_nor_percent_per_w_cm2": args.eta_nor,
        "eta_int_max": args.eta_max,
        "length_mm": args.length_mm,
        "sign_convention": args.sign_convention,
    }


def _cmd_noise(args, client: ServiceClient):
    payload = {**_noise_body(args), "model": args.model, **_pump_fields(args)}
    result = client.post("/v1/noise", payload)
    rows = [[pt["pump_mw"], pt["noise_hz"]] for pt in result["points"]]
    return payload, result, {"noise.csv": (["pump_mw", "noise_hz"], rows)}


def _cmd_enr(args, client: ServiceClient):
    payload = {
        "noise": _noise_body(args),
        "cme": {
            "eta_nor_percent_per_w_cm2": args.eta_nor,
            "alpha1_per_cm": args.alpha1,
            "alpha2_per_cm": args.alpha2,
            "alpha3_per_cm": args.alpha3,
            "length_mm": args.length_mm,
            "signal_ratio": args.signal_ratio,
        },
        "budget": {
            "t_waveguide": args.twg,
            "t_collect": args.collect,
            "t_filter": args.filter,
            "detector_efficiency": args.detector,
        },
        "sweep_pump_mw": parse_sweep(args.sweep_mw),
    }
    full = client.post("/v1/enr", payload)
    rows = [
        [pt["pump_mw"], pt["eta_ext"], pt["noise_hz"], pt["enr"]] for pt in full["points"]
    ]
    result = {key: value for key, value in full.items() if key != "points"}
    return payload, result, {"enr.csv": (["pump_mw", "eta_ext", "noise_hz", "enr"], rows)}


def _cmd_fit(args, client: ServiceClient):
    columns = NOISE_COLUMNS if args.model.startswith("noise-") else EFFICIENCY_COLUMNS
    data = [list(row) for row in read_table(args.data, columns)]
    payload = {
        "model": args.model,
        "data": data,
        "length_mm": args.length_mm,
        "alpha1_per_cm": args.alpha1,
        "alpha2_per_cm": args.alpha2,
        "alpha3_per_cm": args.alpha3,
        "n_points": args.n_points,
        "pump_reference": args.pump_reference,
        "noise": None,
    }
    if args.model.startswith("noise-"):
        missing = [
            flag
            for flag, value in (
                ("--alpha-pump", args.alpha_pump),
                ("--alpha-dfg", args.alpha_dfg),
                ("--eta-nor", args.eta_nor),
                ("--eta-max", args.eta_max),
                ("--length-mm", args.length_mm),
            )
            if value is None
        ]
        if missing:
            raise ValidationError(
                f"fit model {args.model!r} requires: {', '.join(missing)}"
            )
        payload["noise"] = {
            "a_hz_per_w_per_cm": 1.0,
            "alpha_pump_per_cm": args.alpha_pump,
            "alpha_dfg_per_cm": args.alpha_dfg,
            "eta_nor_percent_per_w_cm2": args.eta_nor,
            "eta_int_max": args.eta_max,
            "length_mm": args.length_mm,
            "sign_convention": args.sign_convention,
        }
    full = client.post("/v1/fit", payload)
    param_header = ["name", "value", "stderr", "ci95_lo", "ci95_hi"]
    tables = {
        "params.csv": (
            param_header,
            [[p[key] for key in param_header] for p in full["params"]],
        ),
        "residuals.csv": (
            ["index", "residual"],
            list(enumerate(full["residuals"])),
        ),
    }
    result = {key: value for key, value in full.items() if key != "residuals"}
    return payload, result, tables


def _cmd_loss_cutback(args, client: ServiceClient):
    payload = {"points": [list(row) for row in read_table(args.data, CUTBACK_COLUMNS)]}
    result = client.post("/v1/loss/cutback", payload)
    return payload, result, {}


def _cmd_loss_fp(args, client: ServiceClient):
    if (args.data is None) == (args.contrast is None):
        raise ValidationError("provide exactly one of a spectrum file and --contrast")
    spectrum = (
        [list(row) for row in read_table(args.data, FP_COLUMNS)]
        if args.data is not None
        else None
    )
    payload = {
        "refractive_index": args.n,
        "length_mm": args.length_mm,
        "spectrum": spectrum,
        "contrast": args.contrast,
    }
    result = client.post("/v1/loss/fp", payload)
    return payload, result, {}


def _cmd_detune(args, client: ServiceClient):
    payload = {
        "model": {
            "lambda_ref_nm": args.lambda_ref,
            "t_dfg_ref_c": args.t_dfg_ref,
            "slope_dfg_c_per_pm": args.slope_dfg,
            "t_spdc_ref_c": args.t_spdc_ref,
            "slope_spdc_c_per_pm": args.slope_spdc,
        },
        "profile": [list(row) for row in read_table(args.profile, PROFILE_COLUMNS)],
        "lambda_min_nm": args.lambda_min,
        "lambda_max_nm": args.lambda_max,
        "grid_points": args.grid_points,
    }
    result = client.post("/v1/detune", payload)
    return payload, result, {}


def _cmd_serve(args) -> int:
    try:
        import uvicorn
    except ImportError:
        raise ValidationError(
            "the serve command needs uvicorn; install the [server] extra"
        ) from None
    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_pump_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--pump-mw", type=float, default=None, help="single pump power in mW")
    parser.add_argument(
        "--sweep-mw",
        default=None,
        help="pump sweep in mW: start:stop:step (inclusive) or a comma list",
    )


def _add_cme_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--eta-nor",
        type=float,
        required=True,
        help="normalized efficiency in percent per (W cm^2)",
    )
    parser.add_argument("--alpha1", type=float, required=True, help="input-wave loss in 1/cm")
    parser.add_argument("--alpha2", type=float, required=True, help="pump loss in 1/cm")
    parser.add_argument("--alpha3", type=float, required=True, help="converted-wave loss in 1/cm")
    parser.add_argument("--length-mm", type=float, required=True, help="waveguide length in mm")
    parser.add_argument(
        "--signal-ratio",
        type=float,
        default=1e-6,
        help="signal-to-pump input power ratio (default 1e-6)",
    )


def _add_noise_model_flags(parser: argparse.ArgumentParser, required: bool) -> None:
    parser.add_argument(
        "--a",
        type=float,
        default=1.0,
        help="generation coefficient in Hz/(W cm) (default 1.0)",
    )
    parser.add_argument(
        "--alpha-pump", type=float, required=required, help="pump loss in 1/cm"
    )
    parser.add_argument(
        "--alpha-dfg", type=float, required=required, help="generated-light loss in 1/cm"
    )
    parser.add_argument(
        "--eta-max",
        type=float,
        required=required,
        help="peak internal conversion efficiency applied to generated light, in [0, 1]",
    )
    parser.add_argument(
        "--sign-convention",
        choices=["printed", "attenuating"],
        default="printed",
        help="pump-power axis convention (default printed)",
    )


def _add_budget_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--twg", type=float, required=True, help="waveguide transmission in [0, 1]")
    parser.add_argument("--collect", type=float, required=True, help="collection transmission in [0, 1]")
    parser.add_argument("--filter", type=float, required=True, help="filter transmission in [0, 1]")
    parser.add_argument(
        "--detector",
        type=float,
        default=None,
        help="detector efficiency in [0, 1] (optional extra factor)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qfcsim",
        description=(
            "Simulation and measurement analysis for quasi-phase-matched "
            "frequency-conversion waveguides"
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--server",
        default=None,
        help="base URL of a running server; omitted runs everything in process",
    )
    parser.add_argument("--out", default=None, help="directory for CSV tables and manifest.json")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("budget", help="external-efficiency throughput budget")
    _add_budget_flags(p)
    p.add_argument("--eta-int", type=float, required=True, help="internal efficiency in [0, 1.5]")
    p.set_defaults(handler=_cmd_budget)

    p = sub.add_parser("tuning-curve", help="conversion efficiency versus spatial frequency")
    p.add_argument("--length-mm", type=float, required=True, help="waveguide length in mm")
    p.add_argument("--period-um", type=float, required=True, help="poling period in um")
    p.add_argument("--d-eff", type=float, default=1.0, help="relative nonlinear coefficient")
    p.add_argument(
        "--defects",
        default="none",
        help="defect map CSV (position_um,width_um) or 'none'",
    )
    p.add_argument("--points", type=int, default=201, help="number of grid points (default 201)")
    p.add_argument(
        "--q-half-span",
        type=float,
        default=None,
        help="half-span of the grid around 1/period, in 1/um (default 10/L)",
    )
    p.add_argument(
        "--mode",
        choices=["peak_in_window", "at_nominal_q"],
        default="peak_in_window",
        help="where the summary relative efficiency is evaluated",
    )
    p.set_defaults(handler=_cmd_tuning_curve)

    p = sub.add_parser("mc", help="Monte Carlo yield over random defect maps")
    p.add_argument(
        "--defect-counts",
        required=True,
        help="comma list of defect counts, e.g. 0,1,2",
    )
    p.add_argument("--trials", type=int, required=True, help="trials per defect count (>= 100)")
    p.add_argument(
        "--seed",
        type=int,
        default=None,
        help=f"RNG seed (default: {SEED_ENV_VAR} environment variable, then {DEFAULT_SEED})",
    )
    p.add_argument("--length-mm", type=float, default=20.0, help="waveguide length in mm")
    p.add_argument("--period-um", type=float, default=3.07, help="poling period in um")
    p.add_argument(
        "--width-mean-um", type=float, default=12.3, help="mean defect width in um"
    )
    p.add_argument("--d-eff", type=float, default=1.0, help="relative nonlinear coefficient")
    p.add_argument(
        "--threshold",
        type=float,
        default=0.9,
        help="relative-efficiency success threshold (default 0.9)",
    )
    p.add_argument(
        "--mode",
        choices=["peak_in_window", "at_nominal_q"],
        default="peak_in_window",
        help="efficiency evaluation mode",
    )
    p.add_argument("--threads", type=int, default=1, help="worker threads (results identical)")
    p.add_argument(
        "--lengths-mm",
        default=None,
        help="comma list of lengths in mm; overrides --length-mm with a sweep",
    )
    p.set_defaults(handler=_cmd_mc)

    p = sub.add_parser("cme", help="internal efficiency from the coupled-mode integrator")
    _add_cme_flags(p)
    _add_pump_flags(p)
    p.add_argument(
        "--pump-reference",
        choices=["output", "launched"],
        default="output",
        help="whether pump powers are output-facet or launched values",
    )
    p.set_defaults(handler=_cmd_cme)

    p = sub.add_parser("noise", help="pump-induced noise rate")
    _add_noise_model_flags(p, required=True)
    p.add_argument(
        "--eta-nor",
        type=float,
        required=True,
        help="normalized efficiency in percent per (W cm^2)",
    )
    p.add_argument("--length-mm", type=float, required=True, help="waveguide length in mm")
    p.add_argument(
        "--model",
        choices=["lossy", "lossless"],
        default="lossy",
        help="noise model variant (default lossy)",
    )
    _add_pump_flags(p)
    p.set_defaults(handler=_cmd_noise)

    p = sub.add_parser("enr", help="efficiency-to-noise ratio across a pump sweep")
    _add_cme_flags(p)
    _add_noise_model_flags(p, required=True)
    _add_budget_flags(p)
    p.add_argument(
        "--sweep-mw",
        required=True,
        help="pump sweep in mW: start:stop:step (inclusive) or a comma list",
    )
    p.set_defaults(handler=_cmd_enr)

    p = sub.add_parser("fit", help="fit measured data to one of the named models")
    p.add_argument(
        "--model",
        choices=["sin2", "lowconv", "noise-lossless", "noise-lossy"],
        required=True,
        help="which fit to run",
    )
    p.add_argument("data", help="CSV data file (pump_mw,eta_int or pump_mw,counts_hz)")
    p.add_argument("--length-mm", type=float, default=None, help="waveguide length in mm")
    p.add_argument("--alpha1", type=float, default=None, help="input-wave loss in 1/cm")
    p.add_argument("--alpha2", type=float, default=None, help="pump loss in 1/cm")
    p.add_argument("--alpha3", type=float, default=None, help="converted-wave loss in 1/cm")
    p.add_argument(
        "--n-points",
        type=int,
        default=5,
        help="lowest-power points used by the lowconv fit (default 5)",
    )
    p.add_argument(
        "--pump-reference",
        choices=["output", "launched"],
        default="output",
        help="power axis of the data file (lowconv converts launched to output)",
    )
    _add_noise_model_flags(p, required=False)
    p.add_argument(
        "--eta-nor",
        type=float,
        default=None,
        help="fixed normalized efficiency in percent per (W cm^2) (noise fits)",
    )
    p.set_defaults(handler=_cmd_fit)

    p = sub.add_parser("loss", help="propagation-loss analyses")
    loss_sub = p.add_subparsers(dest="loss_command", required=True)

    q = loss_sub.add_parser("cutback", help="loss from transmission versus length")
    q.add_argument("data", help="CSV data file (length_cm,transmission)")
    q.set_defaults(handler=_cmd_loss_cutback, command_name="loss cutback")

    q = loss_sub.add_parser("fp", help="loss from facet-cavity fringe contrast")
    q.add_argument(
        "data",
        nargs="?",
        default=None,
        help="CSV spectrum file (frequency_ghz,transmission); omit with --contrast",
    )
    q.add_argument("--contrast", type=float, default=None, help="fringe contrast in (0, 1)")
    q.add_argument("--n", type=float, required=True, help="refractive index (> 1)")
    q.add_argument("--length-mm", type=float, required=True, help="waveguide length in mm")
    q.set_defaults(handler=_cmd_loss_fp, command_name="loss fp")

    p = sub.add_parser("detune", help="pump wavelength minimizing noise at the operating point")
    p.add_argument("profile", help="CSV noise profile (temperature_c,counts_hz)")
    p.add_argument("--lambda-ref", type=float, required=True, help="reference pump wavelength in nm")
    p.add_argument("--t-dfg-ref", type=float, required=True, help="phase-matching temperature at the reference, in C")
    p.add_argument("--slope-dfg", type=float, required=True, help="phase-matching temperature slope in C/pm")
    p.add_argument("--t-spdc-ref", type=float, required=True, help="noise-peak temperature at the reference, in C")
    p.add_argument(
        "--slope-spdc",
        type=float,
        default=0.02,
        help="noise-peak temperature slope in C/pm (default 0.02)",
    )
    p.add_argument("--lambda-min", type=float, required=True, help="search range lower edge in nm")
    p.add_argument("--lambda-max", type=float, required=True, help="search range upper edge in nm")
    p.add_argument("--grid-points", type=int, default=101, help="search grid size (default 101)")
    p.set_defaults(handler=_cmd_detune)

    p = sub.add_parser("serve", help="run the HTTP server")
    p.add_argument("--host", default="127.0.0.1", help="bind address (default 127.0.0.1)")
    p.add_argument("--port", type=int, default=8000, help="port (default 8000)")
    p.set_defaults(handler=_cmd_serve)

    return parser


def _print_error(exc: QfcsimError) -> None:
    print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
    if isinstance(exc, DataFormatError):
        for problem in exc.problems:
            print(f"  - {problem}", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 2
    try:
        if args.command == "serve":
            return _cmd_serve(args)
        seed = resolve_seed(getattr(args, "seed", None))
        command_name = getattr(args, "command_name", args.command)
        with ServiceClient(base_url=args.server) as client:
            payload, result, tables = args.handler(args, client)
        manifest = build_manifest(command_name, payload, seed)
        _emit(manifest, result, tables, args.out)
        return 0
    except NumericalError as exc:
        _print_error(exc)
        return 3
    except QfcsimError as exc:
        _print_error(exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
