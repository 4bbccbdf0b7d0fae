#!/usr/bin/env python3
"""
Test runner for the A-infinity workbench: picks test groups by marker and collects a pass/fail summary.
"""

import argparse
import subprocess
import sys
import time
from pathlib import Path
from typing import Any

PROJECT_NAME = "A-infinity Workbench"


class TestRunner:
    """Run pytest groups, linting and type checking in subprocesses."""

    def __init__(self) -> None:
        self.project_root = Path(__file__).parent.parent
        self.results: dict[str, bool] = {}

    def run_command(self, cmd: list[str]) -> subprocess.CompletedProcess:
        print(f"Running: {' '.join(cmd)}")
        return subprocess.run(cmd, cwd=self.project_root)

    def _pytest(self, name: str, extra: list[str], verbose: bool = False) -> bool:
        cmd = [sys.executable, "-m", "pytest", *extra]
        if verbose:
            cmd.append("-v")
        result = self.run_command(cmd)
        self.results[name] = result.returncode == 0
        return result.returncode == 0

    def run_unit_tests(self, verbose: bool = False) -> bool:
        print("🧪 Running unit tests...")
        return self._pytest("unit_tests", ["tests/unit/", "-m", "unit"], verbose)

    def run_integration_tests(self, verbose: bool = False, include_slow: bool = False) -> bool:
        print("🔗 Running integration tests...")
        marker = "integration" if include_slow else "integration and not slow"
        return self._pytest("integration_tests", ["tests/integration/", "-m", marker], verbose)

    def run_smoke_tests(self, verbose: bool = False) -> bool:
        print("💨 Running smoke tests...")
        return self._pytest("smoke_tests", ["-m", "smoke", "--no-cov"], verbose)

    def run_all_tests(self, verbose: bool = False, coverage: bool = True, fast: bool = False) -> bool:
        print("🚀 Running all tests...")
        extra = [] if coverage else ["--no-cov"]
        if fast:
            extra += ["-m", "not slow"]
        return self._pytest("all_tests", extra, verbose)

    def run_specific_test(self, test_path: str, verbose: bool = False) -> bool:
        print(f"🎯 Running specific test: {test_path}")
        return self._pytest(f"specific_test_{test_path}", [test_path], verbose)

    def run_linting(self) -> bool:
        print("🔍 Running linting...")
        black = self.run_command([sys.executable, "-m", "black", "--check", "."]).returncode == 0
        print("  ✅ Black formatting OK" if black else "  ❌ Black formatting issues found")
        ruff = self.run_command([sys.executable, "-m", "ruff", "check", "."]).returncode == 0
        print("  ✅ Ruff linting OK" if ruff else "  ❌ Ruff linting issues found")
        self.results["linting"] = black and ruff
        return black and ruff

    def run_type_checking(self) -> bool:
        print("🔎 Running type checking...")
        success = self.run_command([sys.executable, "-m", "mypy", "algebra", "services", "utils"]).returncode == 0
        print("  ✅ Type checking OK" if success else "  ❌ Type checking issues found")
        self.results["type_checking"] = success
        return success

    def generate_report(self) -> dict[str, Any]:
        passed = sum(1 for ok in self.results.values() if ok)
        return {
            "timestamp": time.strftime("%Y-%m-%d %H:%M:%S"),
            "project": PROJECT_NAME,
            "results": self.results,
            "summary": {"total_checks": len(self.results), "passed": passed, "failed": len(self.results) - passed},
        }

    def print_summary(self) -> bool:
        print("\n" + "=" * 60)
        print("📊 TEST SUMMARY")
        print("=" * 60)
        for name, success in self.results.items():
            print(f"  {name}: {'✅ PASS' if success else '❌ FAIL'}")
        summary = self.generate_report()["summary"]
        print("\n" + "-" * 60)
        print(f"📈 Total checks: {summary['total_checks']}")
        print(f"✅ Passed: {summary['passed']}")
        print(f"❌ Failed: {summary['failed']}")
        print("-" * 60)
        if summary["failed"] == 0:
            print("🎉 All tests passed!")
        else:
            print(f"⚠️ {summary['failed']} check(s) failed")
        return summary["failed"] == 0


def main() -> None:
    parser = argparse.ArgumentParser(description=f"{PROJECT_NAME} Test Runner")
    parser.add_argument("--unit", action="store_true", help="Run unit tests only")
    parser.add_argument("--integration", action="store_true", help="Run integration tests only")
    parser.add_argument("--slow", action="store_true", help="Include slow integration tests")
    parser.add_argument("--smoke", action="store_true", help="Run smoke tests only")
    parser.add_argument("--all", action="store_true", help="Run all tests")
    parser.add_argument("--fast", action="store_true", help="Run all tests except the slow ones")
    parser.add_argument("--lint", action="store_true", help="Run linting")
    parser.add_argument("--type-check", action="store_true", help="Run type checking")
    parser.add_argument("--test", type=str, help="Run specific test file or function")
    parser.add_argument("--verbose", "-v", action="store_true", help="Verbose output")
    parser.add_argument("--no-coverage", action="store_true", help="Skip coverage reporting")
    args = parser.parse_args()

    runner = TestRunner()
    print(f"{PROJECT_NAME} Test Runner")
    print("=" * 50)

    if args.unit:
        runner.run_unit_tests(verbose=args.verbose)
    if args.integration:
        runner.run_integration_tests(verbose=args.verbose, include_slow=args.slow)
    if args.smoke:
        runner.run_smoke_tests(verbose=args.verbose)
    if args.all or args.fast:
        runner.run_all_tests(verbose=args.verbose, coverage=not args.no_coverage, fast=args.fast)
    if args.test:
        runner.run_specific_test(args.test, verbose=args.verbose)
    if args.lint:
        runner.run_linting()
    if args.type_check:
        runner.run_type_checking()
    if not runner.results:
        print("🎯 Running default test suite...")
        runner.run_all_tests(verbose=args.verbose, coverage=not args.no_coverage, fast=True)

    sys.exit(0 if runner.print_summary() else 1)


if __name__ == "__main__":
    main()
