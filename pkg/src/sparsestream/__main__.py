"""Allow ``python -m sparsestream``."""

import sys

from sparsestream.cli import main

sys.exit(main())
