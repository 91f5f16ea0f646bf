# The MIT License (MIT)
# Copyright © 2025 <kisa134>

import sys

from dpgda.cli import main

if __name__ == "__main__":
    sys.exit(main())
