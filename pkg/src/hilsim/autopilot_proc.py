"""Autopilot process entry point.

Run as ``python -m hilsim.autopilot_proc tcp:HOST:PORT``. The link
descriptor is the only argument and the wire link is the only I/O this
process performs; everything it knows arrives as protocol frames. This is
the enforced stand-in for the isolated autopilot hardware.
"""

from __future__ import annotations

import sys
import time

from .autopilot import Autopilot
from .link import LinkClosed, connect


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: python -m hilsim.autopilot_proc tcp:HOST:PORT",
              file=sys.stderr)
        return 2
    try:
        link = connect(argv[0])
    except OSError as e:
        print(f"autopilot: cannot reach harness at {argv[0]}: {e}",
              file=sys.stderr)
        return 1

    autopilot = Autopilot()
    try:
        while True:
            try:
                messages = link.poll(timeout=10.0)
            except LinkClosed:
                return 0
            for msg in messages:
                started = time.perf_counter()
                replies = autopilot.handle_message(msg)
                if replies:
                    autopilot.loop_load_pct = min(
                        255, int(100.0 * (time.perf_counter() - started) / 0.02))
                autopilot.link_errors = link.stats.frames_corrupted
                for reply in replies:
                    link.send(reply)
    except (LinkClosed, KeyboardInterrupt):
        return 0
    finally:
        link.close()


if __name__ == "__main__":
    sys.exit(main())
