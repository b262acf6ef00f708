"""Run the saddle_rotor command line."""
import sys

from .cli import main

sys.exit(main())
