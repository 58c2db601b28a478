"""Allow ``python -m hilsim <subcommand>`` as an alias for the hilsim CLI."""

from .harness.cli import main

main()
