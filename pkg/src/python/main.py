# src/python/main.py

import sys

from .cli import run
from .utils.error_handler import install_system_exception_hook

def main() -> None:
    """
    The entry point of the ``evalkit`` command.

    :rtype: None
    """
    install_system_exception_hook()
    sys.exit(run(sys.argv[1:]))

if __name__ == '__main__':
    main()
