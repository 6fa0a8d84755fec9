import sys

from ffql.cli import main

sys.exit(main())
