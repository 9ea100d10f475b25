"""Allow ``python -m change_faithfulness``."""

import sys

from .cli import main

sys.exit(main())
