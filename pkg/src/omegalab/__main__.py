import sys

from omegalab.cli import main

sys.exit(main())
