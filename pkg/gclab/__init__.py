"""gclab: a laboratory for Glivenko-Cantelli behaviour of mixing sequences."""

__version__ = "0.3.0"
