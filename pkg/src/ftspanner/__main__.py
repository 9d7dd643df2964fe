import sys

from ftspanner.cli import main

sys.exit(main())
