import sys

from bdtwist.cli import main

sys.exit(main())
