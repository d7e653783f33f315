# src/python/utils/_version.py

"""
Defines the single source of truth for the toolkit's version number.
"""

__version__ = "0.3.0"
"""
:py:class:`str`: The semantic version string of the toolkit.
"""
