import sys

from pinsker.cli import main

sys.exit(main())
