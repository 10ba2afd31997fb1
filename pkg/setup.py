#!/usr/bin/env python3
"""
Setup script for tubelab

Checks the numerical stack against requirements.txt, offers to install what
is missing, smoke-tests the geometry package and writes a starter config.
"""

import json
import os
import re
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent
OPTIONAL = {"psutil", "pytest", "hypothesis", "jsonschema"}
STARTER_CONFIG = {
    "family": "timelike",
    "r": 0.5,
    "curvatures": {
        "k1": {"kind": "sinusoid", "a": 0.3, "b": 0.1, "omega": 1.0},
        "k2": {"kind": "constant", "c": 0.2},
        "k3": {"kind": "constant", "c": 0.1},
    },
    "grid": {"s": 6, "t": 8, "w": 8},
    "output_dir": "out",
}


def read_requirements(path=ROOT / "requirements.txt"):
    """(name, spec) pairs, e.g. ('numpy', '>=1.24')"""
    pairs = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.split("#")[0].strip()
        if not line:
            continue
        match = re.match(r"([A-Za-z0-9_.\-]+)\s*(.*)", line)
        pairs.append((match.group(1), match.group(2)))
    return pairs


def installed_version(name):
    try:
        from importlib.metadata import PackageNotFoundError, version
    except ImportError:
        return None
    try:
        return version(name)
    except PackageNotFoundError:
        return None


def pip_install(specs):
    """One pip call for every requirement string"""
    if not specs:
        return True
    try:
        subprocess.check_call([sys.executable, "-m", "pip", "install", *specs])
        return True
    except subprocess.CalledProcessError:
        return False


def check_dependencies():
    """Report each requirement; install missing required ones, offer the optional ones"""
    print("🔍 Checking the numerical stack...")
    missing, missing_optional = [], []
    for name, spec in read_requirements():
        found = installed_version(name)
        optional = name.lower() in OPTIONAL
        if found:
            print(f"✅ {name} {found}" + (" (optional)" if optional else ""))
        elif optional:
            print(f"⚠️  {name}{spec} - missing (optional)")
            missing_optional.append(name + spec)
        else:
            print(f"❌ {name}{spec} - missing")
            missing.append(name + spec)

    if missing:
        print(f"\n📦 Installing: {', '.join(missing)}")
        if not pip_install(missing):
            print("❌ pip could not install the required packages")
            return False

    if missing_optional:
        answer = input(f"\n🔧 Install optional {', '.join(missing_optional)}? (y/N): ").strip().lower()
        if answer in ("y", "yes") and not pip_install(missing_optional):
            print("⚠️  Optional packages not installed; tests or core detection may be unavailable")
    return True


def smoke_test():
    """Import the library and check two identities it must satisfy"""
    sys.path.insert(0, str(ROOT))
    try:
        from geometry.minkowski import basis, inner, triple_cross
        from geometry.tubes import ALL_FAMILIES
    except ImportError as e:
        print(f"❌ geometry package failed to import: {e}")
        return False
    if inner(basis(1), basis(1)) != -1.0 or triple_cross(basis(2), basis(3), basis(4))[0] != -1.0:
        print("❌ Minkowski algebra check failed")
        return False
    print(f"✅ geometry package OK ({len(ALL_FAMILIES)} tube families)")
    return True


def write_starter_files():
    out = ROOT / "out"
    out.mkdir(exist_ok=True)
    print(f"📁 Output directory: {out}")

    config = ROOT / "run.json"
    if config.exists():
        print(f"ℹ️  Keeping existing {config.name}")
    else:
        config.write_text(json.dumps(STARTER_CONFIG, indent=2) + "\n", encoding="utf-8")
        print(f"📝 Wrote starter {config.name}")

    if os.name == "nt":
        (ROOT / "run.bat").write_text('@echo off\r\npython "%~dp0main.py" %*\r\n', encoding="utf-8")
        print("✅ Created run.bat")
    else:
        launcher = ROOT / "run.sh"
        launcher.write_text('#!/bin/bash\n'
                            '# tubelab launcher: ./run.sh <frame|lk|classify|mesh> [--config PATH]\n'
                            'exec python3 "$(dirname "$0")/main.py" "$@"\n', encoding="utf-8")
        launcher.chmod(0o755)
        print("✅ Created run.sh")


def main():
    print("🚀 tubelab setup")
    print("=" * 50)

    if sys.version_info < (3, 8):
        print(f"❌ Python 3.8 or higher required, found {sys.version.split()[0]}")
        return False
    print(f"✅ Python {sys.version.split()[0]}")

    if not check_dependencies() or not smoke_test():
        return False
    write_starter_files()

    print("\n🎉 Ready. Try:")
    print("  ./run.sh frame    --config run.json   frame drift per curve case")
    print("  ./run.sh lk       --config run.json   L1N / L2N tables against the closed forms")
    print("  ./run.sh classify --config run.json   Gauss map classification suite")
    print("  ./run.sh mesh     --config run.json   OBJ slices plus vertex table")
    print("  python -m pytest tests                 test suite")
    return True


if __name__ == "__main__":
    sys.exit(0 if main() else 1)
