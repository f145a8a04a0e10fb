"""The entry point of the process."""

import sys

from pslab import framework

sys.exit(framework.main())
