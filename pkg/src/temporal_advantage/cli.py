"""Command-line client for the temporal-advantage service.

All computation happens behind the HTTP API; by default the client runs the
service in-process, and ``--server URL`` points it at a running instance
instead.  Exit codes: 0 success, 1 validation or reduction failure, 2 data
integrity failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

USAGE_EXIT = 64
VALIDATION_EXIT = 1
INTEGRITY_EXIT = 2

_ERROR_EXITS = {
    "structure": VALIDATION_EXIT,
    "degenerate": VALIDATION_EXIT,
    "non-commuting": VALIDATION_EXIT,
    "data-integrity": INTEGRITY_EXIT,
    "resource": USAGE_EXIT,
}


class CliError(Exception):
    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


class Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 64 instead of argparse's 2
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


class Client:
    """Minimal HTTP wrapper: in-process app by default, remote via base URL."""

    def __init__(self, server: str | None = None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=None)
        else:
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore", DeprecationWarning)
                from fastapi.testclient import TestClient

            from .service.app import app

            self._client = TestClient(app)

    def request(self, method: str, path: str, payload: dict | None = None) -> dict:
        response = self._client.request(method, path, json=payload)
        try:
            body = response.json()
        except ValueError:
            raise CliError(
                f"server returned non-JSON response (status {response.status_code})",
                VALIDATION_EXIT,
            )
        if response.status_code >= 400:
            if response.status_code == 422:
                raise CliError(f"bad request: {body}", USAGE_EXIT)
            kind = body.get("kind", "")
            raise CliError(
                body.get("detail", str(body)), _ERROR_EXITS.get(kind, VALIDATION_EXIT)
            )
        return body


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise CliError(f"no such file: {path}", USAGE_EXIT)
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: not valid JSON: {exc}", VALIDATION_EXIT)


def _write_or_print(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def _model_json(body: dict) -> str:
    return json.dumps(body["model"], indent=2) + "\n"


def build_parser() -> Parser:
    parser = Parser(prog="temporal-advantage")
    parser.add_argument("--server", help="base URL of a running service (default: in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a model file's physicality constraints")
    p.add_argument("--model", required=True)
    p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("eval", help="probability of an outcome sequence for a model file")
    p.add_argument("--model", required=True)
    p.add_argument("--sequence", required=True)
    p.add_argument("--no-channel", action="store_true", help="iterate the instrument alone")

    p = sub.add_parser("effective", help="extract the branch-statistics classical model")
    p.add_argument("--model", required=True)
    p.add_argument("--out")

    p = sub.add_parser("construct", help="emit a built-in model family as JSON")
    p.add_argument("family", choices=["one-way", "cyclic", "etf", "diagonal"])
    p.add_argument("--L", type=int, help="sequence length (one-way)")
    p.add_argument("--m", type=int, help="number of states (cyclic)")
    p.add_argument("--d", type=int, help="Hilbert dimension (etf)")
    p.add_argument("--tick-index", type=int, default=0, help="basis index firing outcome 1 (etf)")
    p.add_argument("--model", help="classical model file (diagonal)")
    p.add_argument("--out")

    p = sub.add_parser("reduce", help="rewrite a commuting channel with d branches")
    p.add_argument("--model", required=True, help="channel or quantum model JSON")
    p.add_argument("--route", choices=["auto", "states", "povm"], default="auto")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out")

    p = sub.add_parser("optimize", help="maximize a sequence probability")
    p.add_argument("--config", help="JSON config; flags override its fields")
    p.add_argument("--sequence")
    p.add_argument("--d", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--target", choices=["quantum", "classical"], default=None)
    p.add_argument("--mode", choices=["rank1", "full"], default=None)
    p.add_argument("--iters", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--lr-start", type=float)
    p.add_argument("--lr-end", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="best model JSON path")
    p.add_argument("--log", help="run log CSV path")

    p = sub.add_parser("table1", help="summary table: classical bounds vs quantum values")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--optimize", action="store_true", help="fresh optimizer runs instead of builtins")
    p.add_argument("--trials", type=int)
    p.add_argument("--iters", type=int)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("fig3", help="classical bound vs frame-construction value per length")
    p.add_argument("--Lmin", type=int, default=3)
    p.add_argument("--Lmax", type=int, default=7)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("verify-appendix", help="verify the bundled optimized models")
    p.add_argument("label", nargs="?", default="all", choices=["all", "L4", "L5"])
    p.add_argument("--out", help="JSON report path")

    p = sub.add_parser("dc", help="deterministic complexity of a sequence")
    p.add_argument("--sequence", required=True)
    p.add_argument("--d", type=int, default=8, help="largest machine size searched")

    return parser


def _cmd_validate(client: Client, args) -> int:
    body = client.request("POST", "/validate", {"model": _load_json(args.model), "tol": args.tol})
    if body["ok"]:
        print(f"valid (max residual {body['max_residual']:.3e}, tol {body['tol']:.1e})")
        return 0
    print(f"invalid at tol {body['tol']:.1e}:")
    for violation in body["violations"]:
        detail = f" ({violation['detail']})" if violation["detail"] else ""
        print(f"  {violation['name']}: residual {violation['residual']:.6g}{detail}")
    return VALIDATION_EXIT


def _cmd_eval(client: Client, args) -> int:
    body = client.request(
        "POST",
        "/eval",
        {
            "model": _load_json(args.model),
            "sequence": args.sequence,
            "use_channel": not args.no_channel,
        },
    )
    print(f"{body['probability']:.17g}")
    return 0


def _cmd_effective(client: Client, args) -> int:
    body = client.request("POST", "/effective", {"model": _load_json(args.model)})
    _write_or_print(_model_json(body), args.out)
    return 0


def _cmd_construct(client: Client, args) -> int:
    payload: dict = {"family": args.family, "tick_index": args.tick_index}
    if args.family == "one-way":
        if args.L is None:
            raise CliError("construct one-way needs --L", USAGE_EXIT)
        payload["length"] = args.L
    elif args.family == "cyclic":
        if args.m is None:
            raise CliError("construct cyclic needs --m", USAGE_EXIT)
        payload["states"] = args.m
    elif args.family == "etf":
        if args.d is None:
            raise CliError("construct etf needs --d", USAGE_EXIT)
        payload["d"] = args.d
    else:
        if args.model is None:
            raise CliError("construct diagonal needs --model", USAGE_EXIT)
        payload["model"] = _load_json(args.model)
    body = client.request("POST", "/construct", payload)
    _write_or_print(_model_json(body), args.out)
    return 0


def _cmd_reduce(client: Client, args) -> int:
    body = client.request(
        "POST",
        "/reduce",
        {"model": _load_json(args.model), "route": args.route, "tol": args.tol},
    )
    print(f"route: {body['route']}", file=sys.stderr)
    print(f"max action residual over probes: {body['max_residual']:.3e}", file=sys.stderr)
    _write_or_print(json.dumps({"channel": body["channel"]}, indent=2) + "\n", args.out)
    return 0


def _cmd_optimize(client: Client, args) -> int:
    payload: dict = {}
    if args.config:
        payload.update(_load_json(args.config))
    overrides = {
        "sequence": args.sequence,
        "d": args.d,
        "m": args.m,
        "target": args.target,
        "mode": args.mode,
        "iterations": args.iters,
        "trials": args.trials,
        "seed": args.seed,
        "lr_start": args.lr_start,
        "lr_end": args.lr_end,
        "workers": args.workers,
    }
    payload.update({k: v for k, v in overrides.items() if v is not None})
    if "sequence" not in payload or "d" not in payload:
        raise CliError("optimize needs --sequence and --d (flags or config file)", USAGE_EXIT)
    body = client.request("POST", "/optimize", payload)
    print(
        f"best probability {body['probability']:.9f} "
        f"(trial {body['best_trial']} of {len(body['trials'])})",
        file=sys.stderr,
    )
    if body.get("povm_residual") is not None:
        print(
            f"povm residual {body['povm_residual']:.3e}, "
            f"instrument residual {body['instrument_residual']:.3e}",
            file=sys.stderr,
        )
    if args.log:
        Path(args.log).write_text(body["run_log_csv"])
    _write_or_print(_model_json(body), args.out)
    return 0


def _cmd_table1(client: Client, args) -> int:
    query = [f"seed={args.seed}", f"optimize={'true' if args.optimize else 'false'}"]
    if args.trials is not None:
        query.append(f"trials={args.trials}")
    if args.iters is not None:
        query.append(f"iterations={args.iters}")
    body = client.request("GET", "/table1?" + "&".join(query))
    if args.format == "json":
        _write_or_print(json.dumps(body["rows"], indent=2) + "\n", args.out)
    else:
        _write_or_print(body["csv"], args.out)
    return 0


def _cmd_fig3(client: Client, args) -> int:
    body = client.request("GET", f"/fig3?l_min={args.Lmin}&l_max={args.Lmax}")
    if args.format == "json":
        _write_or_print(json.dumps(body["points"], indent=2) + "\n", args.out)
    else:
        _write_or_print(body["csv"], args.out)
    return 0


def _cmd_verify_appendix(client: Client, args) -> int:
    labels = ["L4", "L5"] if args.label == "all" else [args.label]
    reports = []
    all_ok = True
    for label in labels:
        body = client.request("GET", f"/verify-appendix/{label}")
        reports.append(body)
        print(body["text"])
        all_ok = all_ok and body["ok"]
    if args.out:
        Path(args.out).write_text(json.dumps(reports, indent=2) + "\n")
    return 0 if all_ok else INTEGRITY_EXIT


def _cmd_dc(client: Client, args) -> int:
    body = client.request("POST", "/dc", {"sequence": args.sequence, "d_max": args.d})
    if body["exceeds_d_max"]:
        print(f"exceeds d_max={args.d}")
    else:
        print(body["complexity"])
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "eval": _cmd_eval,
    "effective": _cmd_effective,
    "construct": _cmd_construct,
    "reduce": _cmd_reduce,
    "optimize": _cmd_optimize,
    "table1": _cmd_table1,
    "fig3": _cmd_fig3,
    "verify-appendix": _cmd_verify_appendix,
    "dc": _cmd_dc,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        client = Client(args.server)
        return _COMMANDS[args.command](client, args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
