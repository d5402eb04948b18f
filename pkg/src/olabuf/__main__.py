"""Module entry point so ``python -m olabuf`` works like the console script."""

import sys

from .cli import main

sys.exit(main())
