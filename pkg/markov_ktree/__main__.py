import sys

from markov_ktree.cli import main

sys.exit(main())
