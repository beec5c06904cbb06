"""Entry point for python -m arteria."""

from arteria.launcher import main

if __name__ == "__main__":
    main()
