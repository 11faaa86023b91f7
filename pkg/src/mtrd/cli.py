"""Command-line entry point.

Subcommands
-----------
region    trace rate-region boundaries for the requested feasible sets,
          write one CSV per set plus a metadata sidecar and nesting report
dpi       run the singular-value chain check on a three-variable joint
feasible  run membership tests for a channel against the requested sets
validate  screen induced n-letter channels against the single-letter tests

Exit codes are stable: 0 success / accepted / holds, 1 config or input
error, 2 nesting violation, 3 negative verdict (membership rejected, chain
condition violated, or validation failures).

Config files are JSON; see README for the schema. All randomness flows
from the single master seed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time

import numpy as np

from . import __version__
from ._core import backend_name
from .feasibility import AuxChannel, membership
from .oracles import common_info_channel, validate_single_letter_conditions
from .probability import (
    ProbTensor,
    SourceModel,
    dsbs,
    hamming,
    tensor_from_config,
)
from .regions import (
    CARDINALITY_CAVEAT,
    compare_regions,
    format_csv,
    trace_region,
)
from .spectral import dpi_check

log = logging.getLogger("mtrd")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NESTING = 2
EXIT_REJECTED = 3

SET_ORDER = ("in", "cap13", "out1", "out3")  # nested-first evaluation order
SUBSETS_OF = {"in": (), "cap13": ("in",), "out1": ("cap13", "in"), "out3": ("cap13", "in")}


class ConfigError(Exception):
    pass


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}")


def _build_source(cfg: dict) -> tuple[SourceModel, dict]:
    scfg = cfg.get("source", {"preset": "dsbs", "p": 0.1})
    if "preset" in scfg:
        if scfg["preset"] != "dsbs":
            raise ConfigError(f"unknown source preset {scfg['preset']!r}")
        p = scfg.get("p", 0.1)
        if not isinstance(p, (int, float)) or not 0 <= p <= 1:
            raise ConfigError(f"source.p must be a probability, got {p!r}")
        joint = dsbs(float(p))
    else:
        try:
            joint = tensor_from_config({"axes": ("U", "V"), **scfg})
        except KeyError:
            raise ConfigError("source needs 'preset' or 'values'")
        except ValueError as e:
            raise ConfigError(f"source.values invalid: {e}")
    nu, nv = joint.values.shape

    sizes = cfg.get("sizes", {})
    n_uhat = sizes.get("uhat") or nu
    n_vhat = sizes.get("vhat") or nv

    dcfg = cfg.get("distortion", {"preset": "hamming"})
    if "preset" in dcfg:
        if dcfg["preset"] != "hamming":
            raise ConfigError(f"unknown distortion preset {dcfg['preset']!r}")
        d1, d2 = hamming(nu, n_uhat), hamming(nv, n_vhat)
    else:
        try:
            d1 = np.asarray(dcfg["d1"], dtype=float)
            d2 = np.asarray(dcfg["d2"], dtype=float)
        except KeyError:
            raise ConfigError("distortion needs 'preset' or 'd1'/'d2'")
    try:
        src = SourceModel(p_uv=joint, d1=d1, d2=d2)
    except ValueError as e:
        raise ConfigError(f"distortion matrices invalid: {e}")
    resolved = {
        "source": scfg,
        "distortion": dcfg,
        "sizes": {
            "x1": sizes.get("x1") or nu + 1,
            "x2": sizes.get("x2") or nv + 1,
            "uhat": n_uhat,
            "vhat": n_vhat,
        },
    }
    return src, resolved


def _channel_from(cfg: dict) -> AuxChannel:
    if "channel" not in cfg:
        raise ConfigError("config needs a 'channel' entry (4-D nested array)")
    try:
        return AuxChannel(cfg["channel"], tol=1e-9)
    except ValueError as e:
        raise ConfigError(f"channel invalid: {e}")


def _config_sha(resolved: dict) -> str:
    blob = json.dumps(resolved, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def cmd_region(args) -> int:
    cfg = _load_config(args.config)
    src, resolved = _build_source(cfg)

    d_pair = cfg.get("D", [0.0, 0.0])
    if (
        not isinstance(d_pair, (list, tuple)) or len(d_pair) != 2
        or any(not isinstance(x, (int, float)) for x in d_pair)
        or min(d_pair) < 0
    ):
        raise ConfigError(f"D must be a pair of nonnegative reals, got {d_pair!r}")
    d_pair = (float(d_pair[0]), float(d_pair[1]))

    sets = args.set or cfg.get("sets", list(SET_ORDER))
    bad = [s for s in sets if s not in SET_ORDER]
    if bad:
        raise ConfigError(f"unknown set id(s) {bad}; choose from {list(SET_ORDER)}")
    sets = [s for s in SET_ORDER if s in sets]

    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    budget = args.budget if args.budget is not None else cfg.get("budget", 64)
    if budget < 1:
        raise ConfigError(f"budget must be >= 1, got {budget}")
    weights = cfg.get("weights", 17)
    if weights < 2:
        raise ConfigError(f"weights must be >= 2, got {weights}")
    eps = cfg.get("tolerances", {}).get("nesting", 1e-4)
    membership_tol = cfg.get("tolerances", {}).get("membership", 1e-7)
    refine_steps = cfg.get("refine_steps", 24)
    out_dir = args.out or cfg.get("out_dir", ".")
    os.makedirs(out_dir, exist_ok=True)

    sizes = (resolved["sizes"]["x1"], resolved["sizes"]["x2"])
    resolved.update(
        {"D": list(d_pair), "sets": sets, "seed": seed, "budget": budget,
         "weights": weights, "refine_steps": refine_steps,
         "tolerances": {"nesting": eps, "membership": membership_tol}}
    )
    sha = _config_sha(resolved)

    started = time.time()
    boundaries = {}
    extras_pool: dict[str, list] = {}
    for set_id in sets:
        extras = []
        seen = set()
        for sub in SUBSETS_OF[set_id]:
            for ch in extras_pool.get(sub, []):
                fid = ch.fingerprint()
                if fid not in seen:
                    seen.add(fid)
                    extras.append(ch)
        log.info("tracing %s (%d weights, budget %d, %d shared channels)",
                 set_id, weights, budget, len(extras))
        b = trace_region(
            set_id, src, d_pair, sizes, weights, budget, seed,
            extra_channels=extras, refine_steps=refine_steps,
            membership_tol=membership_tol,
        )
        boundaries[set_id] = b
        extras_pool[set_id] = b.winner_channels() + b.frontier_channels()

    meta = {
        "tool": "mtrd",
        "version": __version__,
        "backend": backend_name(),
        "config": resolved,
        "config_sha": sha,
        "master_seed": seed,
        "wall_clock_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "elapsed_s": None,
        "caveat": CARDINALITY_CAVEAT,
        "sets": {},
    }
    for set_id, b in boundaries.items():
        csv_name = f"region_{set_id}.csv"
        header = f"mtrd {__version__} set={set_id} seed={seed} config_sha={sha}"
        with open(os.path.join(out_dir, csv_name), "w", newline="") as fh:
            fh.write(format_csv(b, header))
        meta["sets"][set_id] = {
            "csv": csv_name,
            "source_sha": b.metadata["source_sha"],
            "hull_vertices": b.hull_vertices,
            "sweep": [
                {"theta": e.theta, "w1": e.w1, "w2": e.w2,
                 "value": None if e.value == float("inf") else e.value,
                 "status": e.status, "channel": e.channel_id,
                 "point": None if e.point is None else
                 {"R1": e.point.r1, "R2": e.point.r2,
                  "Ed1": e.point.ed1, "Ed2": e.point.ed2,
                  "vertex": e.point.vertex}}
                for e in b.sweep
            ],
        }

    report = compare_regions(boundaries.values(), eps=eps)
    meta["elapsed_s"] = round(time.time() - started, 3)
    with open(os.path.join(out_dir, "metadata.json"), "w") as fh:
        json.dump(meta, fh, indent=2)
    with open(os.path.join(out_dir, "nesting_report.json"), "w") as fh:
        json.dump(report.to_dict(), fh, indent=2)

    if not report.ok:
        log.error("nesting violations: %s", report.violations)
        return EXIT_NESTING
    log.info("wrote %d region CSV(s) to %s", len(boundaries), out_dir)
    return EXIT_OK


def cmd_dpi(args) -> int:
    cfg = _load_config(args.config)
    if "tensor" not in cfg:
        raise ConfigError("config needs a 'tensor' entry with axes/values")
    tcfg = cfg["tensor"]
    try:
        t = ProbTensor(tcfg.get("axes", ("X", "Y", "Z")), tcfg["values"])
    except (KeyError, ValueError) as e:
        raise ConfigError(f"tensor invalid: {e}")
    report = dpi_check(t, tol=cfg.get("tolerances", {}).get("sv", 1e-9))
    print(json.dumps(report.to_dict(), indent=2))
    return EXIT_OK if report.holds else EXIT_REJECTED


def cmd_feasible(args) -> int:
    cfg = _load_config(args.config)
    ch = _channel_from(cfg)
    sets = args.set or cfg.get("sets", ["in"])
    bad = [s for s in sets if s not in SET_ORDER]
    if bad:
        raise ConfigError(f"unknown set id(s) {bad}; choose from {list(SET_ORDER)}")
    tol = cfg.get("tolerances", {}).get("membership", 1e-7)
    src = None
    if any(s in ("out3", "cap13") for s in sets):
        src, _ = _build_source(cfg)
        if (src.nu, src.nv) != ch.shape[:2]:
            raise ConfigError(
                f"channel is sized for a {ch.shape[:2]} source, config source is "
                f"{(src.nu, src.nv)}"
            )
    reports = [membership(s, ch, src, tol) for s in sets]
    print(json.dumps([r.to_dict() for r in reports], indent=2))
    return EXIT_OK if all(r.accepted for r in reports) else EXIT_REJECTED


def cmd_validate(args) -> int:
    cfg = _load_config(args.config)
    src, resolved = _build_source(cfg)
    trials = cfg.get("trials", 100)
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    ns = cfg.get("n", [1, 2])
    if isinstance(ns, int):
        ns = [ns]
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    sizes = (resolved["sizes"]["x1"], resolved["sizes"]["x2"])
    out_dir = args.out or cfg.get("out_dir")
    failure_dir = os.path.join(out_dir, "failures") if out_dir else None

    adversarial = None
    if args.self_test:
        adversarial = common_info_channel(src, lambda u: u, lambda v: v, 2)

    reports = []
    for n in ns:
        rep = validate_single_letter_conditions(
            src, n, trials, seed, sizes=sizes,
            source_label=cfg.get("label", "source"),
            failure_dir=failure_dir,
            inject_adversarial=adversarial,
        )
        reports.append(rep)
    print(json.dumps([r.to_dict() for r in reports], indent=2))
    return EXIT_OK if all(r.ok for r in reports) else EXIT_REJECTED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtrd",
        description="Rate-region bounds for two correlated sources over finite alphabets",
    )
    parser.add_argument("--version", action="version", version=f"mtrd {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (
        ("region", cmd_region), ("dpi", cmd_dpi),
        ("feasible", cmd_feasible), ("validate", cmd_validate),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, help="master seed (overrides config)")
        p.add_argument("--budget", type=int, help="samples per weight (overrides config)")
        p.add_argument("--out", help="output directory")
        p.add_argument(
            "--set", action="append", choices=list(SET_ORDER),
            help="feasible set id (repeatable)",
        )
        p.add_argument("--self-test", action="store_true", dest="self_test",
                       help="inject a known non-member to confirm detection")
        p.set_defaults(handler=fn)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    threads = os.environ.get("MTRD_THREADS")
    if threads:
        log.debug("MTRD_THREADS=%s", threads)
    try:
        return args.handler(args)
    except ConfigError as e:
        log.error("%s", e)
        return EXIT_CONFIG
    except ValueError as e:
        log.error("%s", e)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
