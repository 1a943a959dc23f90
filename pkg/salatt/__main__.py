import sys

from salatt.main import main

sys.exit(main())
