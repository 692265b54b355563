"""Batch command-line front end.

Every command prints one JSON object ``{"status", "report", "diagnostics"}``
and exits 0 when the status is ``ok``, 1 when a checked property is false
(``violated``) and 2 on invalid input or a failed precondition (``error``).
Reports always embed the tolerance values used.  Tolerances come from the
``--tol-eq/--tol-fix/--tol-psd`` flags, falling back to the ``TOL_EQ``,
``TOL_FIX`` and ``TOL_PSD`` environment variables, then to the defaults.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import serialization as ser
from .channels import classify
from .choi import map_entropy
from .classical import corollary_check
from .entropy_analysis import (
    block_form_residual,
    decompose_fixed_point_algebra,
    entropy_preservation_report,
    fixed_point_space,
    map_entropy_preservation_report,
    parse_block_spec,
    synthesize_pair,
)
from .errors import QentropyError
from .generators import (
    random_bistochastic_channel,
    random_bistochastic_matrix,
    random_density,
    random_probability_vector,
    random_stochastic_channel,
    random_unitary,
)
from .states import state_spectrum, von_neumann_entropy
from .tolerances import DEFAULT_TOL, ToleranceConfig

__all__ = ["main", "CommandResult"]

_EXIT_CODES = {"ok": 0, "violated": 1, "error": 2}


@dataclass(frozen=True)
class CommandResult:
    status: str  # ok | violated | error
    report: dict
    diagnostics: list[str]

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "report": self.report,
            "diagnostics": list(self.diagnostics),
        }


def _resolve_tolerances(args) -> ToleranceConfig:
    changes: dict[str, float] = {}
    for field, env_name in (("eq", "TOL_EQ"), ("fix", "TOL_FIX"), ("psd", "TOL_PSD")):
        if env_name in os.environ:
            changes[field] = float(os.environ[env_name])
    for field, value in (
        ("eq", args.tol_eq),
        ("fix", args.tol_fix),
        ("psd", args.tol_psd),
    ):
        if value is not None:
            changes[field] = value
    return DEFAULT_TOL.replace(**changes) if changes else DEFAULT_TOL


def _cmd_analyze_state(args, tol: ToleranceConfig) -> CommandResult:
    rho = ser.state_from_obj(ser.load_json(args.state_file), tol)
    spectrum = state_spectrum(rho)
    report = {
        "dim": rho.dim,
        "entropy_bits": von_neumann_entropy(rho),
        "rank": int(np.sum(spectrum.eigenvalues > tol.psd)),
        "eigenvalues": [float(v) for v in spectrum.eigenvalues],
        "tolerances": tol.as_dict(),
    }
    return CommandResult("ok", report, [])


def _cmd_analyze_pair(args, tol: ToleranceConfig) -> CommandResult:
    phi = ser.channel_from_obj(ser.load_json(args.channel_file), tol)
    rho = ser.state_from_obj(ser.load_json(args.state_file), tol)
    cls = classify(phi, tol)
    if not cls.bistochastic:
        return CommandResult(
            "error",
            {"classification": cls.as_dict(), "tolerances": tol.as_dict()},
            ["NotBistochasticError: the channel is not bi-stochastic"],
        )
    report = entropy_preservation_report(phi, rho, tol).as_dict()
    report["tolerances"] = tol.as_dict()
    status = "ok" if report["entropy_preserved"] else "violated"
    return CommandResult(status, report, [])


def _cmd_decompose(args, tol: ToleranceConfig) -> CommandResult:
    phi = ser.channel_from_obj(ser.load_json(args.channel_file), tol)
    basis = fixed_point_space(phi, tol)
    structure = decompose_fixed_point_algebra(basis, tol, seed=args.seed)
    report = ser.block_structure_to_obj(structure)
    report["fixed_space_dimension"] = len(basis.basis)
    report["spectral_gap"] = basis.spectral_gap
    report["block_form_residual"] = block_form_residual(basis, structure)
    report["tolerances"] = tol.as_dict()
    return CommandResult("ok", report, [])


def _cmd_map_entropy(args, tol: ToleranceConfig) -> CommandResult:
    phi = ser.channel_from_obj(ser.load_json(args.channel_file), tol)
    if args.channel_file_2 is None:
        report = {
            "dim": phi.dim,
            "map_entropy_bits": map_entropy(phi, tol),
            "tolerances": tol.as_dict(),
        }
        return CommandResult("ok", report, [])
    psi = ser.channel_from_obj(ser.load_json(args.channel_file_2), tol)
    report = map_entropy_preservation_report(phi, psi, tol).as_dict()
    report["tolerances"] = tol.as_dict()
    status = "ok" if report["entropy_preserved"] else "violated"
    return CommandResult(status, report, [])


def _cmd_classical_check(args, tol: ToleranceConfig) -> CommandResult:
    batch = ser.load_classical_batch(args.batch_file, tol)
    rows = []
    preserved = disagreements = 0
    for b, p in batch:
        row = corollary_check(b, p, tol).as_dict()
        rows.append(row)
        preserved += int(row["entropy_preserved"])
        disagreements += int(not row["agreement"])
    report = {
        "instances": len(rows),
        "preserved": preserved,
        "disagreements": disagreements,
        "rows": rows,
        "tolerances": tol.as_dict(),
    }
    status = "violated" if disagreements else "ok"
    diagnostics = (
        [f"{disagreements} instance(s) show verdict disagreement"] if disagreements else []
    )
    return CommandResult(status, report, diagnostics)


def _cmd_synthesize(args, tol: ToleranceConfig) -> CommandResult:
    spec = parse_block_spec(args.spec)
    phi, rho, structure = synthesize_pair(spec, seed=args.seed, tol=tol)
    os.makedirs(args.out_dir, exist_ok=True)
    paths = {
        "channel": os.path.join(args.out_dir, "channel.json"),
        "state": os.path.join(args.out_dir, "state.json"),
        "structure": os.path.join(args.out_dir, "structure.json"),
    }
    ser.save_json(paths["channel"], ser.channel_to_obj(phi))
    ser.save_json(paths["state"], ser.state_to_obj(rho))
    ser.save_json(paths["structure"], ser.block_structure_to_obj(structure))
    self_check = entropy_preservation_report(phi, rho, tol).as_dict()
    report = {
        "dim": phi.dim,
        "block_dims": [list(d) for d in structure.block_dims],
        "files": paths,
        "self_check": self_check,
        "tolerances": tol.as_dict(),
    }
    status = "ok" if self_check["entropy_preserved"] else "violated"
    return CommandResult(status, report, [])


def _cmd_gen(args, tol: ToleranceConfig) -> CommandResult:
    kind = args.kind
    if kind == "density":
        rank = args.rank if args.rank is not None else args.dim
        obj = ser.state_to_obj(random_density(args.dim, rank, args.seed, tol))
    elif kind == "unitary":
        obj = {"dim": args.dim, "matrix": ser.matrix_to_obj(random_unitary(args.dim, args.seed))}
    elif kind == "bistochastic-channel":
        obj = ser.channel_to_obj(
            random_bistochastic_channel(args.dim, args.num_unitaries, args.seed, tol)
        )
    elif kind == "stochastic-channel":
        obj = ser.channel_to_obj(
            random_stochastic_channel(args.dim, args.env_dim, args.seed, tol)
        )
    elif kind == "bistochastic-matrix":
        matrix = random_bistochastic_matrix(args.dim, args.num_perms, args.seed, tol)
        obj = {"dim": matrix.dim, "matrix": [[float(x) for x in row] for row in matrix.matrix]}
    elif kind == "probability":
        vector = random_probability_vector(args.dim, args.seed, tol)
        obj = {"dim": vector.dim, "p": [float(x) for x in vector.entries]}
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown kind {kind!r}")
    if args.out is not None:
        ser.save_json(args.out, obj)
        report = {"kind": kind, "seed": args.seed, "file": args.out, "tolerances": tol.as_dict()}
    else:
        report = {"kind": kind, "seed": args.seed, "object": obj, "tolerances": tol.as_dict()}
    return CommandResult("ok", report, [])


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qentropy",
        description="Decide, certify and construct entropy-preserving quantum operations.",
    )
    parser.add_argument("--tol-eq", type=float, default=None, help="equality tolerance")
    parser.add_argument("--tol-fix", type=float, default=None, help="fixed-point tolerance")
    parser.add_argument("--tol-psd", type=float, default=None, help="positivity tolerance")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze-state", help="entropy, spectrum and support rank of a state")
    p.add_argument("state_file")
    p.set_defaults(handler=_cmd_analyze_state)

    p = sub.add_parser("analyze-pair", help="entropy preservation report for (channel, state)")
    p.add_argument("channel_file")
    p.add_argument("state_file")
    p.set_defaults(handler=_cmd_analyze_pair)

    p = sub.add_parser("decompose", help="block decomposition of a channel's fixed-point algebra")
    p.add_argument("channel_file")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=_cmd_decompose)

    p = sub.add_parser("map-entropy", help="map entropy, or its preservation under composition")
    p.add_argument("channel_file")
    p.add_argument("channel_file_2", nargs="?", default=None)
    p.set_defaults(handler=_cmd_map_entropy)

    p = sub.add_parser("classical-check", help="corollary check over a (B, p) batch file")
    p.add_argument("batch_file")
    p.set_defaults(handler=_cmd_classical_check)

    p = sub.add_parser("synthesize", help="synthesize an entropy-preserving pair from a spec")
    p.add_argument("--spec", required=True, help='block list such as "2x1,1x2"')
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(handler=_cmd_synthesize)

    p = sub.add_parser("gen", help="emit random objects in the shared JSON formats")
    p.add_argument(
        "kind",
        choices=[
            "density",
            "unitary",
            "bistochastic-channel",
            "stochastic-channel",
            "bistochastic-matrix",
            "probability",
        ],
    )
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rank", type=int, default=None, help="density: rank (default full)")
    p.add_argument("--num-unitaries", type=int, default=3)
    p.add_argument("--env-dim", type=int, default=2)
    p.add_argument("--num-perms", type=int, default=3)
    p.add_argument("--out", default=None, help="write the bare object to this file")
    p.set_defaults(handler=_cmd_gen)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        tol = _resolve_tolerances(args)
        result = args.handler(args, tol)
    except QentropyError as exc:
        result = CommandResult("error", {}, [f"{type(exc).__name__}: {exc}"])
    except (OSError, json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
        result = CommandResult("error", {}, [f"{type(exc).__name__}: {exc}"])
    sys.stdout.write(ser.dumps(result.as_dict()))
    sys.stdout.write("\n")
    return _EXIT_CODES[result.status]


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
