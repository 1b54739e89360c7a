#!/usr/bin/env python3
"""
Support selection and exact solves for simultaneous independent wagers.

Usage:
    python scripts/kelly_support.py solve --input data/markets/two_events.json
"""

import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from dotenv import load_dotenv

# Load environment variables (KELLY_SUPPORT_THREADS and friends)
load_dotenv()

from packages.cli.app import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
