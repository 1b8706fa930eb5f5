"""CLI package

Exposes ``main`` so the ``edgepose.cli:main`` and
``edgepose.cli.cli:main`` entry points both work.
"""

from .cli import main

__all__ = ["main"]
