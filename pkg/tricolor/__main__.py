import sys

from tricolor.cli import main

sys.exit(main())
