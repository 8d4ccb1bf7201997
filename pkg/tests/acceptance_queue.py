#!/usr/bin/env python3
"""Populate the acceptance cache, cheapest units first.

Safe to interrupt and rerun: finished units are skipped, each unit's
arrays are written atomically.  A unit that fails caches its traceback
so the corresponding acceptance test reports the failure instead of
skipping; delete the .npz to retry it.
"""

import os
import sys
import time

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import acceptance_lib as acc


def main(names=None):
    names = names or acc.QUEUE_ORDER
    unknown = [n for n in names if n not in acc.UNITS]
    if unknown:
        sys.exit(f"unknown units: {unknown}; known: {sorted(acc.UNITS)}")
    print(f"[queue] {len(names)} units, cache at {acc.CACHE_DIR}", flush=True)
    for pos, name in enumerate(names, 1):
        tag = f"[queue {pos}/{len(names)}] {name}"
        if acc.have(name):
            print(f"{tag}: already cached", flush=True)
            continue
        print(f"{tag}: computing...", flush=True)
        t0 = time.monotonic()
        data = acc.ensure(name, compute=True)
        took = time.monotonic() - t0
        if "error" in data:
            first = str(data["error"]).strip().splitlines()[-1]
            print(f"{tag}: FAILED after {took:.0f}s: {first}", flush=True)
        else:
            print(f"{tag}: done in {took:.0f}s", flush=True)
    print("[queue] finished", flush=True)


if __name__ == "__main__":
    main(sys.argv[1:] or None)
