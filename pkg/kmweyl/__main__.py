"""python -m kmweyl."""

from kmweyl.cli import main

if __name__ == "__main__":
    main()
