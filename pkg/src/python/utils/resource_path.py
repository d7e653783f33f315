# src/python/utils/resource_path.py

import os

_PROJECT_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', '..', '..'))

def get_resource_path(relative_path: str) -> str:
    """
    Get absolute path to a packaged resource (``config/`` files).

    :param relative_path: The path of the resource relative to the project root.
    :type relative_path: str
    :returns: The absolute path to the resource.
    :rtype: str
    """
    return os.path.join(_PROJECT_ROOT, relative_path)
