#!/usr/bin/env python3
"""
Development utility script for the dcmi estimator.
Provides commands for installing, testing, linting and reproducing results.
"""

import shutil
import subprocess
import sys
from pathlib import Path

SOURCES = [
    "cli.py",
    "dataset.py",
    "distributions.py",
    "errors.py",
    "experiments.py",
    "kde.py",
    "mi.py",
    "quadrature.py",
    "rng.py",
    "run_settings.py",
    "settings.py",
    "significance.py",
]


def install_dependencies():
    """Install the package with its development extras."""
    print("📦 Installing dependencies...")
    try:
        subprocess.run(
            [sys.executable, "-m", "pip", "install", "-e", ".[dev]"], check=True
        )
        print("✅ Dependencies installed successfully!")
        return True
    except subprocess.CalledProcessError as e:
        print(f"❌ Failed to install dependencies: {e}")
        return False


def run_tests(extra_args):
    """Run the test suite; pass 'fast' to skip the slow statistical checks."""
    print("🧪 Running tests...")
    args = [sys.executable, "-m", "pytest"]
    if extra_args and extra_args[0] == "fast":
        args += ["-m", "not slow"]
        extra_args = extra_args[1:]
    try:
        subprocess.run(args + list(extra_args), check=True)
        print("✅ All tests passed!")
        return True
    except subprocess.CalledProcessError as e:
        print(f"❌ Tests failed: {e}")
        return False


def lint():
    """Run pylint over the package modules."""
    print("🔍 Linting...")
    try:
        subprocess.run([sys.executable, "-m", "pylint", *SOURCES], check=True)
        print("✅ Lint clean!")
        return True
    except subprocess.CalledProcessError as e:
        print(f"❌ Lint failed: {e}")
        return False


def format_code():
    """Format sources and tests with black."""
    print("🎨 Formatting...")
    tests = sorted(str(p) for p in Path(".").glob("test_*.py"))
    try:
        subprocess.run(
            [sys.executable, "-m", "black", *SOURCES, "conftest.py", *tests],
            check=True,
        )
        return True
    except subprocess.CalledProcessError as e:
        print(f"❌ Formatting failed: {e}")
        return False


def reproduce(seed):
    """Print the three-row MI and significance table."""
    print(f"📊 Reproducing the significance table (seed {seed})...")
    try:
        subprocess.run(
            [sys.executable, "cli.py", "experiment", "--table1", "--seed", str(seed)],
            check=True,
        )
        return True
    except subprocess.CalledProcessError as e:
        print(f"❌ Reproduction failed: {e}")
        return False


def clean_project():
    """Clean up caches and build artifacts."""
    print("🧹 Cleaning up project...")

    removed_files = []

    for build_dir in ["build", "dist", ".pytest_cache", ".hypothesis", "dcmi.egg-info"]:
        build_path = Path(build_dir)
        if build_path.exists():
            shutil.rmtree(build_path)
            removed_files.append(f"{build_dir}/")

    for cache in Path(".").glob("__pycache__"):
        shutil.rmtree(cache)
        removed_files.append(f"{cache}/")

    if removed_files:
        print(f"✅ Removed {len(removed_files)} artifacts:")
        for file in removed_files:
            print(f"   • {file}")
    else:
        print("✅ Project already clean!")

    return True


def show_help():
    """Show help information."""
    print("📐 dcmi Development Tool")
    print("=" * 40)
    print("Available commands:")
    print("")
    print("🧪 Quality:")
    print("  test [fast] - Run tests (fast skips slow statistical checks)")
    print("  lint        - Run pylint")
    print("  format      - Format with black")
    print("")
    print("📊 Results:")
    print("  table [SEED] - Print the MI / significance table")
    print("")
    print("🔧 Setup:")
    print("  install     - Install package and dev dependencies")
    print("  clean       - Remove caches and build artifacts")
    print("")
    print("💡 Quick Start:")
    print("  python dev.py install")
    print("  python dev.py test fast")
    print("  python cli.py oracle --dist exponential")


def main():
    """Main entry point."""
    if len(sys.argv) < 2:
        show_help()
        return

    command = sys.argv[1]

    print(f"🔧 Executing: {command}")
    print("-" * 30)

    ok = True
    if command == "install":
        ok = install_dependencies()
    elif command == "test":
        ok = run_tests(sys.argv[2:])
    elif command == "lint":
        ok = lint()
    elif command == "format":
        ok = format_code()
    elif command == "table":
        ok = reproduce(sys.argv[2] if len(sys.argv) > 2 else 0)
    elif command == "clean":
        ok = clean_project()
    elif command == "help":
        show_help()
    else:
        print(f"❌ Unknown command: {command}")
        print("💡 Use 'python dev.py help' for available commands")
        sys.exit(1)

    if not ok:
        sys.exit(1)


if __name__ == "__main__":
    main()
