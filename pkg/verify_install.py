#!/usr/bin/env python3
"""Verify all required packages are installed."""

import shutil
import sys


def check_imports():
    """Test import of all runtime and test packages."""
    results = {}

    packages = {
        # Core
        "pydantic": "pydantic",
        "numpy": "numpy",
        "yaml": "pyyaml",
        "loguru": "loguru",

        # Testing
        "pytest": "pytest",
        "pytest_asyncio": "pytest-asyncio",
        "hypothesis": "hypothesis",
    }

    print("=" * 60)
    print("VERIFYING PACKAGE INSTALLATIONS")
    print("=" * 60)

    for module, name in packages.items():
        try:
            __import__(module)
            results[name] = "✅ INSTALLED"
            print(f"✅ {name:30} OK")
        except ImportError as e:
            results[name] = f"❌ MISSING: {e}"
            print(f"❌ {name:30} MISSING")

    print("\n" + "=" * 60)
    print("\nSPECIAL CHECKS:")
    print("=" * 60)

    try:
        import pydantic
        major = int(pydantic.VERSION.split(".")[0])
        print(f"{'✅' if major >= 2 else '❌'} pydantic v{pydantic.VERSION} (v2 API required)")
        if major < 2:
            results["pydantic"] = "❌ MISSING: v2 required"
    except Exception as e:
        print(f"❌ pydantic version check failed: {e}")

    try:
        from stashkit import __version__
        print(f"✅ stashkit {__version__} importable")
    except ImportError as e:
        print(f"❌ stashkit not importable: {e}")
        results["stashkit"] = f"❌ MISSING: {e}"

    # Reference cpio is optional; enables the interop test
    if shutil.which("cpio"):
        print("✅ cpio found (interop test enabled)")
    else:
        print("⚠️  cpio not found (interop test will be skipped)")

    print("\n" + "=" * 60)
    print("SUMMARY")
    print("=" * 60)

    missing = [k for k, v in results.items() if "MISSING" in v]
    if missing:
        print(f"❌ {len(missing)} package(s) missing:")
        for pkg in missing:
            print(f"   - {pkg}")
        return 1
    else:
        print("✅ All required packages installed!")
        return 0


if __name__ == "__main__":
    sys.exit(check_imports())
