import sys

from hbinterp.cli import main

sys.exit(main())
