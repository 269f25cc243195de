"""Entry point for the polygonal billiards command line."""
from __future__ import annotations

from polybilliards.main import main


if __name__ == "__main__":
    main()
