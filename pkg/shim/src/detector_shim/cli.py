"""Serve a transformer detector behind the wire protocol."""

from __future__ import annotations

import argparse
import sys

import uvicorn

from .app import DEFAULT_MAX_CHARS, create_app
from .model import DetectorModel, ModelLoadError


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="detector-shim")
    parser.add_argument("--model", required=True, help="model path or hub identifier")
    parser.add_argument("--machine-label", default=None,
                        help="label name or index of the machine class")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--max-chars", type=int, default=DEFAULT_MAX_CHARS)
    args = parser.parse_args(argv)

    try:
        model = DetectorModel(args.model, machine_label=args.machine_label)
    except ModelLoadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    app = create_app(model, max_chars=args.max_chars)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


if __name__ == "__main__":
    sys.exit(main())
