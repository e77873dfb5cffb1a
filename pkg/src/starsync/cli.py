"""Command-line front end: a thin client of the HTTP service.

The CLI reads one TOML config, posts it to the service (in-process by
default, or a remote instance via ``--server``), and writes the returned
artifacts and JSON report to the output directory.  Exit status is 0 on
success, 1 for configuration/parameter problems and 2 for numeric or
resource failures.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import load_config
from .errors import ParameterError, StarsyncError, exit_code_for
from .reporting import json_text, write_artifacts

RUN_COMMANDS = ("modes", "sweep", "evolve", "oracle")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="starsync",
        description="Star-network oscillator spectra, sweeps and open dynamics",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("modes", "write the spectrum report (perturbative + exact)"),
        ("sweep", "sweep the coupling strength and fit the frequency spread"),
        ("evolve", "run the Gaussian engine and write trajectories"),
        ("oracle", "compare the Fock oracle against the Gaussian engine"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="TOML run configuration")
        cmd.add_argument("--out", default=None, help="output directory (default: from config)")
        cmd.add_argument(
            "--server",
            default=None,
            help="base URL of a running service; defaults to in-process execution",
        )
    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _make_client(server: str | None):
    if server is None:
        import warnings

        with warnings.catch_warnings():
            # some fastapi/starlette combinations warn on this import
            warnings.simplefilter("ignore")
            from fastapi.testclient import TestClient

        from .service import app

        return TestClient(app, raise_server_exceptions=False)
    import httpx

    return httpx.Client(base_url=server, timeout=600.0)


def _fail(message: str, code: str, out_dir: Path | None, status: int) -> int:
    print(f"starsync: error [{code}]: {message}", file=sys.stderr)
    if out_dir is not None:
        try:
            write_artifacts(
                out_dir,
                {"error.json": json_text({"error": {"code": code, "message": message}})},
            )
        except OSError:
            pass
    return status


def _run_command(args: argparse.Namespace) -> int:
    try:
        cfg = load_config(args.config)
    except ParameterError as exc:
        return _fail(str(exc), exc.code, Path(args.out) if args.out else None, 1)

    out_dir = Path(args.out) if args.out else Path(cfg.output.directory)
    client = _make_client(args.server)
    try:
        response = client.post(f"/v1/{args.command}", json=cfg.model_dump(mode="json"))
    except Exception as exc:  # connection problems to a remote server
        return _fail(str(exc), "connection_error", out_dir, 2)
    finally:
        client.close()

    if response.status_code == 200:
        body = response.json()
        artifacts = dict(body["artifacts"])
        artifacts["report.json"] = json_text(body["report"])
        written = write_artifacts(out_dir, artifacts)
        for path in sorted(written):
            print(path)
        return 0

    try:
        payload = response.json()
    except ValueError:
        payload = {}
    error = payload.get("error") or {
        "code": "validation_error",
        "message": str(payload.get("detail", response.text)),
    }
    status = 1 if response.status_code in (400, 422) else 2
    return _fail(error["message"], error["code"], out_dir, status)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0
    try:
        return _run_command(args)
    except StarsyncError as exc:  # defensive: runners are behind the service
        return _fail(str(exc), exc.code, None, exit_code_for(exc))


if __name__ == "__main__":
    sys.exit(main())
