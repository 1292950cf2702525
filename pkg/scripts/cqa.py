#!/usr/bin/env python3
"""
CQA Command Line Wrapper

Runs the `cqa` command from a source checkout without installing the package.

Usage:
    python scripts/cqa.py classify -q tests/fixtures/c3.cqa
    python scripts/cqa.py eval -q tests/fixtures/c3.cqa -d tests/fixtures/fig1.facts --trace
"""

import sys
from pathlib import Path

# Add parent directory to path to import cqa_engine
sys.path.insert(0, str(Path(__file__).parent.parent))

from cqa_engine.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
