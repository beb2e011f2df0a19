import sys

from hawkesrank.cli import main

sys.exit(main())
