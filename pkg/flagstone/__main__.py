if __name__ == "__main__":
    import sys

    import flagstone.cli

    sys.exit(flagstone.cli.main())
