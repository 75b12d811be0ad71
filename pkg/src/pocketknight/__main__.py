import sys

from pocketknight.cli import main

sys.exit(main())
