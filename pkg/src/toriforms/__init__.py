"""Classification machinery for twisted forms of split toric varieties."""

__version__ = "0.1.0"
