import sys

from piano_pairs.cli import main

sys.exit(main())
