import sys

from pmkrsa.cli import main

sys.exit(main())
