import sys

from todjumps.cli import main

sys.exit(main())
