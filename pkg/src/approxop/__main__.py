import sys

from approxop.cli import main

sys.exit(main())
