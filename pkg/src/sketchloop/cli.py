"""Command line entry points: serve, replay, render."""

import argparse
import sys
from pathlib import Path

from .config import ServiceConfig
from .serialize import sha256_hex


def _add_config_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", default=None,
                        help="path to a JSON config file (default: $SKETCHLOOP_CONFIG or built-ins)")


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    config = ServiceConfig.load(args.config)
    if args.live:
        config.provider_mode = "live"
    app = create_app(config, data_dir=args.data_dir, static_dir=args.static_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def cmd_replay(args) -> int:
    from .providers.mock import MockScripts
    from .replay import replay_path

    scripts = MockScripts.from_file(args.scripts) if args.scripts else None
    session = replay_path(args.log, scripts)
    snapshot = session.snapshot_bytes()
    if args.out:
        Path(args.out).write_bytes(snapshot)
    print(f"replayed {len(session.log.records)} records")
    print(f"snapshot sha256: {sha256_hex(snapshot)}")
    return 0


def cmd_render(args) -> int:
    from .canvas.raster import rasterize
    from .errors import CorruptLog
    from .eventlog import BlobStore, read_log
    from .replay import BLOB_DIRNAME, LOG_FILENAME, replay_records

    path = Path(args.log)
    log_file = path / LOG_FILENAME if path.is_dir() else path
    records = read_log(log_file)
    if args.at is not None:
        if not 0 <= args.at < len(records):
            raise CorruptLog(f"--at {args.at} outside log range 0..{len(records) - 1}")
        records = records[: args.at + 1]
    blobs = BlobStore(log_file.parent / BLOB_DIRNAME)
    session = replay_records(records, blobs)
    raster = rasterize(session.doc, args.scale, store=session.artifacts)
    Path(args.out).write_bytes(raster.data)
    print(f"wrote {raster.width_px}x{raster.height_px} canvas to {args.out} "
          f"(after record {records[-1].seq})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sketchloop",
        description="Sketch-while-talking ideation service",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the session server")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8700)
    serve.add_argument("--data-dir", default=None,
                       help="directory for per-session event logs (default: in-memory)")
    serve.add_argument("--static-dir", default=None,
                       help="serve a built frontend from this directory")
    serve.add_argument("--live", action="store_true",
                       help="use live HTTP providers instead of mocks")
    _add_config_arg(serve)
    serve.set_defaults(fn=cmd_serve)

    replay = sub.add_parser("replay", help="rebuild a session from its event log")
    replay.add_argument("log", help="log directory or events.ndjson path")
    replay.add_argument("scripts", nargs="?", default=None,
                        help="mock scripts file to verify provider responses against")
    replay.add_argument("--out", default=None, help="write the snapshot JSON here")
    replay.set_defaults(fn=cmd_replay)

    render = sub.add_parser("render", help="render the canvas at a point in the log")
    render.add_argument("log", help="log directory or events.ndjson path")
    render.add_argument("--at", type=int, default=None, help="last record seq to apply")
    render.add_argument("--out", default="canvas.png")
    render.add_argument("--scale", type=float, default=1.0)
    render.set_defaults(fn=cmd_render)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except Exception as exc:  # surface one-line errors, not tracebacks
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
