"""Command-line interface.

The CLI is a thin client: every command calls the HTTP service (hosted
in-process by default, or remotely with --server) and renders the
response. Exit codes: 0 success, 1 validation findings, 2 usage or input
error, 3 numeric divergence during integration.
"""

import argparse
import sys
from pathlib import Path

from .client import ServiceClient

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

_EXIT_BY_ERROR_CODE = {
    "preset-not-found": EXIT_USAGE,
    "catalog-parse-error": EXIT_USAGE,
    "invalid-input": EXIT_USAGE,
    "bridge-error": EXIT_USAGE,
    "numeric-divergence": EXIT_NUMERIC,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modbot",
        description="Gait synthesis and trajectory-streaming simulation "
        "for modular robots.",
    )
    parser.add_argument(
        "--server",
        help="base URL of a running service (default: run the service in-process)",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    gaits = commands.add_parser("gaits", help="inspect and check gait presets")
    gaits_cmds = gaits.add_subparsers(dest="gaits_command", required=True)
    glist = gaits_cmds.add_parser("list", help="list presets with validation status")
    glist.add_argument("--file", help="catalog file (default: shipped catalog)")
    gvalidate = gaits_cmds.add_parser("validate", help="validate a catalog file")
    gvalidate.add_argument("--file", required=True, help="catalog file to check")

    sim = commands.add_parser("simulate", help="run a gait simulation")
    sim.add_argument("--preset", help="preset name")
    sim.add_argument("--file", help="catalog file to load the preset from")
    sim.add_argument("--duration", type=float, default=10.0, help="run length, s")
    sim.add_argument("--dt", type=float, default=0.002, help="integration step, s")
    sim.add_argument("--seed", type=int, default=0, help="channel RNG seed")
    sim.add_argument(
        "--mode", choices=("direct", "networked"), default="direct",
        help="direct integration or full master/slave pipeline",
    )
    sim.add_argument("--loss", type=float, default=0.0, help="packet loss probability")
    sim.add_argument("--latency-ms", type=float, default=0.0, help="channel latency")
    sim.add_argument("--jitter-ms", type=float, default=0.0, help="latency jitter half-width")
    sim.add_argument("--out", default="out", help="directory for trace artifacts")
    sim.add_argument("--gamma", type=float, default=2.0, help="inter-module pull gain")
    sim.add_argument(
        "--injection", choices=("first", "mean"), default="first",
        help="where the high-level phase pull enters each module",
    )

    serve = commands.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _fail(body: dict) -> int:
    error = body.get("error", {}) if isinstance(body, dict) else {}
    message = error.get("message", "request failed")
    code = error.get("code", "invalid-input")
    details = []
    if error.get("location"):
        details.append(f"at {error['location']}")
    if error.get("t") is not None:
        details.append(f"t={error['t']:.6f} s")
    suffix = f" ({', '.join(details)})" if details else ""
    print(f"error: {message}{suffix}", file=sys.stderr)
    return _EXIT_BY_ERROR_CODE.get(code, EXIT_USAGE)


def _read_file(path: str) -> str | None:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        print(f"error: cannot read {path}: {e}", file=sys.stderr)
        return None


def _catalog_report(client: ServiceClient, file: str | None) -> tuple[int, dict] | int:
    """Fetch a catalog report for the shipped catalog or a file."""
    if file is None:
        return client.list_gaits()
    content = _read_file(file)
    if content is None:
        return EXIT_USAGE
    return client.parse_catalog(content)


def cmd_gaits_list(client: ServiceClient, args) -> int:
    fetched = _catalog_report(client, args.file)
    if isinstance(fetched, int):
        return fetched
    status, body = fetched
    if status != 200:
        return _fail(body)
    presets = body["presets"]
    if presets:
        width = max(len(p["name"]) for p in presets)
        for p in presets:
            state = "valid" if p["valid"] else "INVALID"
            print(
                f"{p['name']:<{width}}  modules={p['module_count']}  "
                f"period={p['period_s']:g}s  {state}"
            )
    print(f"{len(presets)} preset(s)")
    return EXIT_OK


def cmd_gaits_validate(client: ServiceClient, args) -> int:
    fetched = _catalog_report(client, args.file)
    if isinstance(fetched, int):
        return fetched
    status, body = fetched
    if status != 200:
        return _fail(body)
    violations = [
        f"{p['name']}: {v}" for p in body["presets"] for v in p["violations"]
    ]
    for line in violations:
        print(line)
    if violations:
        print(f"{len(violations)} violation(s)")
        return EXIT_VALIDATION
    print(f"all {body['count']} preset(s) valid")
    return EXIT_OK


def cmd_simulate(client: ServiceClient, args) -> int:
    request = {
        "duration_s": args.duration,
        "dt_s": args.dt,
        "seed": args.seed,
        "mode": args.mode,
        "loss": args.loss,
        "latency_ms": args.latency_ms,
        "jitter_ms": args.jitter_ms,
        "gamma": args.gamma,
        "injection": args.injection,
    }
    if args.preset:
        request["preset"] = args.preset
    if args.file:
        content = _read_file(args.file)
        if content is None:
            return EXIT_USAGE
        request["catalog"] = content
    if not args.preset and not args.file:
        print("error: provide --preset and/or --file", file=sys.stderr)
        return EXIT_USAGE
    status, body = client.simulate(request)
    if status != 200:
        return _fail(body)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, content in body["artifacts"].items():
        (out_dir / name).write_bytes(content.encode("utf-8"))
    summary = body["summary"]
    print(f"preset {summary['preset']}: {summary['mode']} run, "
          f"{summary['duration_s']:g}s @ dt={summary['dt_s']:g}s")
    print(f"  residual intra max: {summary['residual_intra_max_rad']:.3e} rad")
    print(f"  residual inter max: {summary['residual_inter_max_rad']:.3e} rad")
    conv = summary["convergence_time_s"]
    print(f"  convergence time:   "
          f"{'not reached' if conv is None else f'{conv:g} s'}")
    if summary["mode"] == "networked":
        print(f"  tracking error max: {summary['max_tracking_error_rad']:.3e} rad "
              f"(bound {summary['interpolation_bound_rad']:.3e})")
        print(f"  messages: {summary['messages_sent']} sent, "
              f"{summary['messages_dropped']} dropped")
    for name in body["artifacts"]:
        print(f"  wrote {out_dir / name}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        return cmd_serve(args)
    with ServiceClient(args.server) as client:
        if args.command == "gaits":
            if args.gaits_command == "list":
                return cmd_gaits_list(client, args)
            return cmd_gaits_validate(client, args)
        return cmd_simulate(client, args)


if __name__ == "__main__":
    sys.exit(main())
