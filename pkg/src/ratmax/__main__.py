import sys

from ratmax.cli import main

sys.exit(main())
