#!/usr/bin/env python3
"""Fetch the BCSSTK13/BCSSTM13 structural-engineering pair (n = 2003).

Downloads the gzipped Matrix Market files, decompresses them into
tests/fixtures/, and pins their SHA-256 checksums in the manifest next to
this script.  On the first successful fetch the recorded checksums are
written back; later fetches (and the test suite) verify against them.

Usage: python scripts/fetch_bcsst13.py [--dest DIR]
"""

import argparse
import gzip
import hashlib
import io
import json
import sys
import tarfile
import urllib.request
from pathlib import Path

HERE = Path(__file__).resolve().parent
MANIFEST = HERE / "bcsst13_manifest.json"
DEFAULT_DEST = HERE.parent / "tests" / "fixtures"


def sha256_of(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def fetch(entry, dest):
    target = dest / entry["filename"]
    last_error = None
    for url in entry["urls"]:
        try:
            print("fetching %s" % url)
            with urllib.request.urlopen(url, timeout=60) as resp:
                blob = resp.read()
            if url.endswith(".tar.gz"):
                with tarfile.open(fileobj=io.BytesIO(blob), mode="r:gz") as tf:
                    member = next(m for m in tf.getmembers()
                                  if m.name.endswith(entry["filename"]))
                    blob = tf.extractfile(member).read()
            elif url.endswith(".gz"):
                blob = gzip.decompress(blob)
            target.write_bytes(blob)
            return target
        except (OSError, StopIteration) as exc:
            last_error = exc
            print("  failed: %s" % exc)
    raise SystemExit("could not fetch %s: %s" % (entry["filename"],
                                                 last_error))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--dest", type=Path, default=DEFAULT_DEST)
    args = parser.parse_args()
    args.dest.mkdir(parents=True, exist_ok=True)
    manifest = json.loads(MANIFEST.read_text())
    changed = False
    for entry in manifest["files"]:
        target = args.dest / entry["filename"]
        if not target.exists():
            fetch(entry, args.dest)
        digest = sha256_of(target)
        if entry.get("sha256"):
            if digest != entry["sha256"]:
                raise SystemExit(
                    "%s checksum mismatch:\n  expected %s\n  got      %s"
                    % (entry["filename"], entry["sha256"], digest))
            print("%s: checksum ok" % entry["filename"])
        else:
            entry["sha256"] = digest
            changed = True
            print("%s: checksum pinned (%s)" % (entry["filename"], digest))
    if changed:
        MANIFEST.write_text(json.dumps(manifest, indent=2) + "\n")
        print("manifest updated: %s" % MANIFEST)
    return 0


if __name__ == "__main__":
    sys.exit(main())
