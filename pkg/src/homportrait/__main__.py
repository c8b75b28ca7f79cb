import sys

from homportrait.cli import main

sys.exit(main())
