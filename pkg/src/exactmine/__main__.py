import sys

from .mine import main

sys.exit(main())
