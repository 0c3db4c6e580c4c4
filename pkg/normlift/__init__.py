"""normlift: truncated p-adic power series, lifts of Galois actions, norm operators and logarithms."""

__version__ = "0.1.0"
APP_NAME = "normlift"
