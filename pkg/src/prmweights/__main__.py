import sys

from .verification_harness.cli import main

sys.exit(main())
