#!/usr/bin/env python
"""
Build the arteria documentation with Sphinx.

Usage:
    python docs/make.py [target]

Targets:
    html      - HTML pages (default)
    doctest   - run the examples embedded in docstrings and pages
    linkcheck - check external links
    clean     - remove the build directory
"""

import os
import shutil
import subprocess
import sys

TARGETS = ("html", "doctest", "linkcheck")


def main():
    docs_dir = os.path.dirname(os.path.abspath(__file__))
    build_dir = os.path.join(docs_dir, "_build")
    target = sys.argv[1] if len(sys.argv) > 1 else "html"

    if target == "clean":
        shutil.rmtree(build_dir, ignore_errors=True)
        return 0
    if target not in TARGETS:
        print(__doc__)
        return 0 if target == "help" else 1

    out_dir = os.path.join(build_dir, target)
    cmd = ["sphinx-build", "-b", target, docs_dir, out_dir]
    print(f"Building {target} documentation...")
    subprocess.run(cmd, check=True)
    print(f"Build finished. Output is in {out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
