"""``python -m psrsim``."""
import sys

from .cli import main

sys.exit(main())
