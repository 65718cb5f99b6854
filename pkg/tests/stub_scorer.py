"""Minimal framed-protocol scorer used by the test suite.

Implements the wire framing by hand on purpose: length line, JSON payload,
trailing newline.  Modes let tests exercise both happy paths and protocol
violations.
"""

import argparse
import json
import sys


def read_message(stream):
    header = stream.readline()
    if not header:
        return None
    length = int(header.strip())
    payload = stream.read(length)
    stream.read(1)  # trailing newline
    return json.loads(payload.decode("utf-8"))


def write_message(stream, record):
    payload = json.dumps(record, separators=(",", ":")).encode("utf-8")
    stream.write(b"%d\n" % len(payload))
    stream.write(payload)
    stream.write(b"\n")
    stream.flush()


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--mode", default="zeros",
                    choices=["zeros", "index", "wrong-count", "error"])
    args = ap.parse_args()
    stdin, stdout = sys.stdin.buffer, sys.stdout.buffer
    while True:
        rec = read_message(stdin)
        if rec is None:
            return
        n = len(rec.get("candidates", [0])) or 1
        if args.mode == "error":
            write_message(stdout, {"v": 1, "kind": "error", "message": "stub failure"})
        elif args.mode == "wrong-count":
            write_message(stdout, {"v": 1, "kind": "q", "values": [0.0] * (n + 1)})
        elif args.mode == "index":
            write_message(stdout, {"v": 1, "kind": "q", "values": [float(i) for i in range(n)]})
        else:
            write_message(stdout, {"v": 1, "kind": "q", "values": [0.0] * n})


if __name__ == "__main__":
    main()
