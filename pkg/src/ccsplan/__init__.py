"""Plan-sketch programs with open continuous parameters, solved by sampling in a tabletop simulator."""

__version__ = "0.1.0"
