import sys

from igabem.cli import main

sys.exit(main())
