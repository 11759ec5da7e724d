"""Allow ``python -m eigenacs``."""
from .cli import main

raise SystemExit(main())
