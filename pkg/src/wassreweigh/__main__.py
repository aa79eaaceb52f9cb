import sys

from wassreweigh.cli import main

sys.exit(main())
